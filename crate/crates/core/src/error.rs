use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite or unrepresentable input: {0}")]
    NonFiniteInput(String),
    #[error("sampled domain too short: {0}")]
    InsufficientDomain(String),
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("merge at level {level} needs a neighbor beyond the chain end")]
    WindowExhausted { level: f64 },
    #[error("event at height {height} does not exceed current level {level}")]
    NonMonotoneEvent { height: f64, level: f64 },
    #[error("operation unsupported: {0}")]
    Unsupported(String),
    #[error("{0} is outside the admissible domain")]
    DomainError(String),
    #[error("series did not converge within {terms} terms at t = {t}")]
    TruncationNotConverged { t: f64, terms: usize },
    #[error("only {hits} exceedances observed (need at least {needed})")]
    InsufficientHits { hits: u64, needed: u64 },
    #[error("empty input")]
    EmptyInput,
    #[error("log complete only up to {complete}, asked for {requested}")]
    BeyondLog { requested: f64, complete: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
