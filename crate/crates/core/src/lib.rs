//! Renormalization of the localization process `b` of a diffusion in a
//! two-sided Brownian environment.
//!
//! * [`envgrid`] samples environments and cuts them into x-slopes.
//! * [`coarsen`] raises the level event by event and logs sign changes of `b`.
//! * [`laws`] holds the closed forms those simulations are compared with.
//! * [`renewal`] simulates sign changes directly from their renewal law.
//! * [`verify`] and [`report`] turn runs into pass/fail evidence.
//! * [`cli`] is the `sinai` command-line front end.

// `!(a < b)` guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod coarsen;
pub mod envgrid;
pub mod error;
mod heap;
pub mod laws;
pub mod quad;
pub mod renewal;
pub mod report;
pub mod rng;
pub mod verify;

pub use coarsen::{Engine, Sign, SignChangeLog, SyntheticBatch};
pub use envgrid::{Direction, Path, Slope, SlopeChain};
pub use error::{Error, Result};
