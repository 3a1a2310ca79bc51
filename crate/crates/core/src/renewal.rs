//! Direct simulation of the sign-change levels through their multiplicative
//! renewal structure: `X_1` from its closed-form law, then
//! `X_{k+1} = X_k r_k` with i.i.d. ratios. Independent of the coarsening
//! engine, so the two can be checked against each other.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coarsen::{Sign, SignChangeLog};
use crate::error::{Error, Result};
use crate::laws;
use crate::rng::{self, Stream};
use crate::verify::Estimate;

/// Minimum number of exceedances for a tail-rate estimate.
pub const MIN_HITS: u64 = 20;

#[derive(Clone, Debug, PartialEq)]
pub struct RenewalRun {
    pub seed: u64,
    pub x_max: f64,
    pub log: SignChangeLog,
}

pub fn simulate_sign_changes(x_max: f64, seed: u64) -> Result<SignChangeLog> {
    simulate_with(&mut rng::stream(seed, 0), x_max)
}

pub fn simulate_with(rng: &mut Stream, x_max: f64) -> Result<SignChangeLog> {
    if !(x_max >= 1.0) {
        return Err(Error::InvalidArgument(format!("x_max = {x_max} < 1")));
    }
    let sign = if rng.random::<bool>() {
        Sign::Plus
    } else {
        Sign::Minus
    };
    let mut log = SignChangeLog::new(sign, 1.0);
    let mut x = laws::sample_first_flip(rng);
    while x <= x_max {
        log.levels.push(x);
        x *= laws::sample_ratio(rng);
    }
    log.x_max = x_max;
    Ok(log)
}

/// Run `i` reads stream `i` of `seed`.
pub fn run_batch(x_max: f64, runs: u64, seed: u64) -> Result<Vec<RenewalRun>> {
    (0..runs)
        .into_par_iter()
        .map(|i| {
            let log = simulate_with(&mut rng::stream(seed, i), x_max)?;
            Ok(RenewalRun { seed, x_max, log })
        })
        .collect()
}

pub fn count_flips(log: &SignChangeLog, x: f64) -> Result<usize> {
    log.count_flips(x)
}

/// `k(e^t)` for one run, without storing levels. Stops early once the
/// count reaches `stop_at`.
fn count_log_level(rng: &mut Stream, t: f64, stop_at: usize) -> usize {
    let _sign: bool = rng.random();
    let mut log_x = laws::sample_first_flip(rng).ln();
    let mut k = 0;
    while log_x <= t && k < stop_at {
        k += 1;
        log_x += laws::sample_ratio(rng).ln();
    }
    k
}

/// Mean of `k(e^t)` over `runs` independent runs.
pub fn mean_count(t: f64, runs: u64, seed: u64) -> Result<Estimate> {
    let counts: Vec<f64> = (0..runs)
        .into_par_iter()
        .map(|i| count_log_level(&mut rng::stream(seed, i), t, usize::MAX) as f64)
        .collect();
    Estimate::mean_of(counts)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailEstimate {
    pub a: f64,
    pub t: f64,
    pub n: u64,
    pub hits: u64,
    /// `-(1/t) log P(k(e^t) >= a t)`.
    pub rate: f64,
    /// Delta-method standard error of `rate`.
    pub stderr: f64,
}

pub fn ldp_tail_estimate(a: f64, t: f64, n: u64, seed: u64) -> Result<TailEstimate> {
    if !(a > 1.0 / 3.0 && t > 0.0) {
        return Err(Error::InvalidArgument(format!("a = {a}, t = {t}")));
    }
    let need = (a * t).ceil() as usize;
    let hits = (0..n)
        .into_par_iter()
        .filter(|&i| count_log_level(&mut rng::stream(seed, i), t, need) >= need)
        .count() as u64;
    if hits < MIN_HITS {
        return Err(Error::InsufficientHits {
            hits,
            needed: MIN_HITS,
        });
    }
    let p = hits as f64 / n as f64;
    Ok(TailEstimate {
        a,
        t,
        n,
        hits,
        rate: -p.ln() / t,
        stderr: ((1.0 - p) / hits as f64).sqrt() / t,
    })
}
