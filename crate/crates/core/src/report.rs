//! The acceptance suite. Each criterion is recomputed from scratch under a
//! seed derived from the report seed and compared with its target.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use crate::cli::{self, ExperimentConfig, Format};
use crate::coarsen::{Engine, ReplicaRun, SyntheticBatch};
use crate::envgrid::{self, Direction};
use crate::error::{Error, Result};
use crate::verify::{self, Estimate};
use crate::{laws, renewal, rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Full sample sizes; targets are calibrated for these.
    Desk,
    /// Small smoke run with the same targets; expect noise failures.
    Quick,
}

/// Sample sizes of one profile.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Sizes {
    pub replicas: u64,
    pub window: usize,
    pub small_window: usize,
    pub ratio_replicas: u64,
    pub growth_runs: u64,
    pub grid_paths: u64,
    pub commute_paths: u64,
    pub ldp_n: u64,
    pub ldp_trend_n15: u64,
    pub ldp_trend_n20: u64,
    pub draws: u64,
    pub repro_replicas: u64,
}

impl Profile {
    pub fn sizes(self) -> Sizes {
        match self {
            Profile::Desk => Sizes {
                replicas: 100_000,
                window: 10_001,
                small_window: 1_001,
                ratio_replicas: 20_000,
                growth_runs: 10_000,
                grid_paths: 5_000,
                commute_paths: 100,
                ldp_n: 1_000_000,
                ldp_trend_n15: 10_000_000,
                ldp_trend_n20: 40_000_000,
                draws: 1_000_000,
                repro_replicas: 200,
            },
            Profile::Quick => Sizes {
                replicas: 4_000,
                window: 1_001,
                small_window: 101,
                ratio_replicas: 4_000,
                growth_runs: 2_000,
                grid_paths: 300,
                commute_paths: 20,
                ldp_n: 100_000,
                ldp_trend_n15: 300_000,
                ldp_trend_n20: 1_000_000,
                draws: 100_000,
                repro_replicas: 20,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `|measured - target| <= tolerance`
    Within,
    /// `measured <= target`
    AtMost,
    /// `measured >= target`
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub rule: Rule,
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    pub fn within(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            rule: Rule::Within,
            measured,
            target,
            tolerance,
            pass: (measured - target).abs() <= tolerance,
            note: None,
        }
    }

    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Check {
        Check {
            name: name.into(),
            rule: Rule::AtMost,
            measured,
            target: bound,
            tolerance: 0.0,
            pass: measured <= bound,
            note: None,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Check {
        Check {
            name: name.into(),
            rule: Rule::AtLeast,
            measured,
            target: bound,
            tolerance: 0.0,
            pass: measured >= bound,
            note: None,
        }
    }

    /// A check whose measurement could not be made.
    pub fn errored(name: impl Into<String>, target: f64, tolerance: f64, err: &Error) -> Check {
        Check {
            name: name.into(),
            rule: Rule::Within,
            measured: f64::NAN,
            target,
            tolerance,
            pass: false,
            note: Some(err.to_string()),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Check {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    /// Measured value, target and tolerance of the first failing check, or
    /// of the first check when all pass.
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl Criterion {
    fn new(id: u32, name: &'static str, checks: Vec<Check>, started: Instant) -> Criterion {
        let lead = checks
            .iter()
            .find(|c| !c.pass)
            .or(checks.first())
            .cloned()
            .unwrap_or_else(|| Check::at_least("no checks", 0.0, 1.0));
        Criterion {
            id,
            name,
            pass: !checks.is_empty() && checks.iter().all(|c| c.pass),
            measured: lead.measured,
            target: lead.target,
            tolerance: lead.tolerance,
            checks,
            seconds: started.elapsed().as_secs_f64(),
        }
    }

    /// One line per criterion followed by one indented line per check.
    pub fn line(&self) -> String {
        let mut s = format!(
            "{} {:>2} {} ({:.1}s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds
        );
        for c in &self.checks {
            let rule = match c.rule {
                Rule::Within => format!("target {} +- {}", num(c.target), num(c.tolerance)),
                Rule::AtMost => format!("at most {}", num(c.target)),
                Rule::AtLeast => format!("at least {}", num(c.target)),
            };
            s.push_str(&format!(
                "\n       {} {}: measured {} ({rule})",
                if c.pass { "ok  " } else { "MISS" },
                c.name,
                num(c.measured)
            ));
            if let Some(n) = &c.note {
                s.push_str(&format!(" [{n}]"));
            }
        }
        s
    }
}

fn num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.0}")
    } else if v.abs() >= 1e-3 && v.abs() < 1e6 {
        format!("{v:.6}")
    } else {
        format!("{v:.3e}")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub profile: Profile,
    pub seed: u64,
    pub sizes: Sizes,
    pub criteria: Vec<Criterion>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.criteria.iter().all(|c| c.pass)
    }

    pub fn summary(&self) -> String {
        let passed = self.criteria.iter().filter(|c| c.pass).count();
        let failed: Vec<String> = self
            .criteria
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.id.to_string())
            .collect();
        if failed.is_empty() {
            format!("{passed}/{} criteria passed", self.criteria.len())
        } else {
            format!(
                "{passed}/{} criteria passed; failed: {}",
                self.criteria.len(),
                failed.join(", ")
            )
        }
    }
}

const SURVIVAL_LEVELS: [f64; 5] = [10.0, 30.0, 100.0, 300.0, 1000.0];

fn survival_estimate(runs: &[ReplicaRun], x: f64) -> Result<Estimate> {
    let counts = counts_at(runs, x)?;
    verify::estimate_genfun(&counts, 0.0)
}

fn counts_at(runs: &[ReplicaRun], x: f64) -> Result<Vec<usize>> {
    runs.iter().map(|r| r.log.count_flips(x)).collect()
}

fn per_replica(runs: &[ReplicaRun], f: impl Fn(&ReplicaRun) -> u64) -> f64 {
    runs.iter().map(f).sum::<u64>() as f64 / runs.len().max(1) as f64
}

fn survival_check(name: &str, runs: &Result<Vec<ReplicaRun>>) -> Check {
    let target = laws::survival(100.0);
    match runs
        .as_ref()
        .map_err(Clone::clone)
        .and_then(|r| survival_estimate(r, 100.0))
    {
        Ok(p) => Check::within(name, p.value, target, 3.0 * p.stderr)
            .with_note(format!("n = {}, s.e. = {:.5}", p.n, p.stderr)),
        Err(e) => Check::errored(name, target, f64::NAN, &e),
    }
}

fn sign_survival(runs: &Result<Vec<ReplicaRun>>) -> Vec<Check> {
    let mut check = survival_check("P(k(100) = 0)", runs);
    if let Ok(r) = runs {
        let note = check.note.take().unwrap_or_default();
        check.note = Some(format!(
            "{note}; per replica: {:.2} replenishments, {:.2} refreshes",
            per_replica(r, |x| x.replenishments),
            per_replica(r, |x| x.refreshes)
        ));
    }
    vec![check]
}

fn generating_function(runs: &Result<Vec<ReplicaRun>>) -> Vec<Check> {
    [10.0, 100.0]
        .iter()
        .map(|&x| {
            let name = format!("E 0.5^k({x})");
            let target = laws::genfun_real(x, 0.5).unwrap_or(f64::NAN);
            let est = runs
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|r| verify::estimate_genfun(&counts_at(r, x)?, 0.5));
            match est {
                Ok(e) => Check::within(name, e.value, target, 3.0 * e.stderr),
                Err(e) => Check::errored(name, target, f64::NAN, &e),
            }
        })
        .collect()
}

fn survival_exponent(runs: &Result<Vec<ReplicaRun>>) -> Vec<Check> {
    let target = laws::zero_exponents().lambda1;
    let slope = runs.as_ref().map_err(Clone::clone).and_then(|r| {
        let pts = SURVIVAL_LEVELS
            .iter()
            .map(|&x| Ok((x, survival_estimate(r, x)?.value)))
            .collect::<Result<Vec<_>>>()?;
        verify::loglog_slope(&pts)
    });
    vec![match slope {
        Ok(s) => Check::within("log-log slope of P(k(x) = 0)", s, target, 0.02),
        Err(e) => Check::errored("log-log slope of P(k(x) = 0)", target, 0.02, &e),
    }]
}

fn ratio_law(sz: &Sizes, seed: u64) -> Vec<Check> {
    let mut batch = SyntheticBatch::new(sz.small_window, sz.ratio_replicas, 1000.0, seed);
    // Chase one sign change past x_max so no ratio is censored.
    batch.overshoot_flips = 1;
    batch.overshoot_cap = 1e12;
    let runs = match batch.run() {
        Ok(r) => r,
        Err(e) => return vec![Check::errored("ratio batch", 0.0, 0.0, &e)],
    };
    let mut ratios = Vec::new();
    let mut pairs = Vec::new();
    for run in &runs {
        let before = ratios.len();
        ratios.extend(run.log.ratios());
        let logs: Vec<f64> = ratios[before..].iter().map(|r| r.ln()).collect();
        pairs.extend(logs.windows(2).map(|w| (w[0], w[1])));
    }
    let mut checks = vec![Check::at_least("pooled ratios", ratios.len() as f64, 1e4)];
    checks.push(match verify::ks_unsorted(&mut ratios, laws::ratio_cdf) {
        Ok(d) => Check::at_most("KS distance to the ratio law", d, 0.02),
        Err(e) => Check::errored("KS distance to the ratio law", 0.0, 0.02, &e),
    });
    checks.push(match verify::correlation(&pairs) {
        Ok(rho) => Check::within("correlation of consecutive log-ratios", rho, 0.0, 0.03)
            .with_note(format!("{} pairs", pairs.len())),
        Err(e) => Check::errored("correlation of consecutive log-ratios", 0.0, 0.03, &e),
    });
    checks
}

fn growth_rate(sz: &Sizes, seed: u64) -> Vec<Check> {
    // The same runs at every t, so the slope sees little noise.
    let pts: Result<Vec<(f64, f64)>> = [20.0, 25.0, 30.0, 35.0, 40.0]
        .iter()
        .map(|&t| Ok((t, renewal::mean_count(t, sz.growth_runs, seed)?.value)))
        .collect();
    vec![match pts.and_then(|p| verify::linear_slope(&p)) {
        Ok(s) => Check::within("slope of E k(e^t) in t", s, 1.0 / 3.0, 0.01),
        Err(e) => Check::errored("slope of E k(e^t) in t", 1.0 / 3.0, 0.01, &e),
    }]
}

fn grid_statistics(sz: &Sizes, seed: u64) -> Vec<Check> {
    let cfg = ExperimentConfig {
        seed,
        replicas: sz.grid_paths,
        grid_step: 1e-3,
        half_length: 100.0,
        level: 1.0,
        ..ExperimentConfig::default()
    };
    let stats = match cli::grid_batch(&cfg) {
        Ok(s) if !s.is_empty() => s,
        Ok(_) => return vec![Check::errored("grid paths", 0.0, 0.0, &Error::EmptyInput)],
        Err(e) => return vec![Check::errored("grid paths", 0.0, 0.0, &e)],
    };
    let n = stats.len() as f64;
    let mut central: Vec<f64> = stats.iter().map(|g| g.central.excess).collect();
    let mut neighbor: Vec<f64> = stats.iter().map(|g| g.neighbor_excess).collect();
    let mut rel: Vec<f64> = stats.iter().map(|g| g.central.rel_origin).collect();
    let mean = |f: &dyn Fn(&envgrid::GridStats) -> f64| stats.iter().map(f).sum::<f64>() / n;
    let ks =
        |name: &str, xs: &mut [f64], cdf: &dyn Fn(f64) -> f64| match verify::ks_unsorted(xs, cdf) {
            Ok(d) => Check::at_most(name, d, 0.03),
            Err(e) => Check::errored(name, 0.0, 0.03, &e),
        };
    let up = stats
        .iter()
        .filter(|g| g.central.direction == Direction::Up)
        .count() as f64;
    vec![
        ks("KS central excess", &mut central, &laws::central_excess_cdf).with_note(format!(
            "{} of {} paths usable",
            stats.len(),
            sz.grid_paths
        )),
        ks("KS neighbor excess vs Exp(1)", &mut neighbor, &|y| {
            1.0 - (-y.max(0.0)).exp()
        }),
        Check::within(
            "mean central length",
            mean(&|g| g.central.length),
            5.0 / 3.0,
            0.05,
        ),
        Check::within(
            "mean neighbor length",
            mean(&|g| g.neighbor_length),
            1.0,
            0.03,
        ),
        ks("KS origin position vs Uniform[0,1]", &mut rel, &|u| {
            u.clamp(0.0, 1.0)
        }),
        Check::within("P(central slope up)", up / n, 0.5, 0.02),
    ]
}

/// Level-2 chain by coarsening from level 1 and by direct extraction.
fn commutes(path: &envgrid::Path) -> Result<bool> {
    let direct = envgrid::extract_slopes(path, 2.0);
    let coarse = envgrid::extract_slopes(path, 1.0).and_then(|c| {
        let mut engine = Engine::from_chain(&c)?;
        engine.advance_to(2.0)?;
        engine.chain_at()
    });
    Ok(match (direct, coarse) {
        (Ok(a), Ok(b)) => a.extrema() == b.extrema() && a.central_index == b.central_index,
        (Err(Error::InsufficientDomain(_)), Err(Error::InsufficientDomain(_))) => true,
        (Err(e), _) | (_, Err(e)) if !matches!(e, Error::InsufficientDomain(_)) => return Err(e),
        _ => false,
    })
}

fn commutation(sz: &Sizes, seed: u64) -> Vec<Check> {
    let agree: Result<Vec<bool>> = (0..sz.commute_paths)
        .into_par_iter()
        .map(|i| commutes(&envgrid::sample_path_replica(100.0, 1e-3, seed, i)?))
        .collect();
    let n = sz.commute_paths as f64;
    vec![match agree {
        Ok(a) => Check::within(
            "paths with identical level-2 endpoints",
            a.iter().filter(|&&b| b).count() as f64,
            n,
            0.0,
        ),
        Err(e) => Check::errored("paths with identical level-2 endpoints", n, 0.0, &e),
    }]
}

fn residuals() -> Vec<Check> {
    let mut ode = 0.0f64;
    let mut initial = 0.0f64;
    let mut first_err = None;
    for x in [1.5, 2.0, 5.0, 10.0] {
        for z in [-0.5, 0.0, 0.5] {
            match laws::ode_residual(x, z) {
                Ok((a, b)) => ode = ode.max(a.abs()).max(b.abs()),
                Err(e) => first_err = first_err.or(Some(e)),
            }
        }
    }
    for y in [0.0, 1.0, 3.0] {
        for z in [-0.5, 0.0, 0.5] {
            match laws::initial_condition_residual(y, z) {
                Ok(r) => initial = initial.max(r.abs()),
                Err(e) => first_err = first_err.or(Some(e)),
            }
        }
    }
    let mut checks = vec![
        Check::at_most("max |ODE residual|", ode, 1e-9),
        match laws::pde_residual(2.0, 0.7, 0.3, 1e-4) {
            Ok(r) => Check::at_most("|PDE residual| at (2, 0.7, 0.3)", r.abs(), 1e-5),
            Err(e) => Check::errored("|PDE residual| at (2, 0.7, 0.3)", 0.0, 1e-5, &e),
        },
        Check::at_most("max |M(1, y, z) - initial condition|", initial, 1e-12),
    ];
    if let Some(e) = first_err {
        checks.push(Check::errored("residual evaluation", 0.0, 0.0, &e));
    }
    checks
}

fn large_deviations(sz: &Sizes, seed: u64) -> Vec<Check> {
    let target = laws::rate_function(1.0);
    let rate = |t: f64, n: u64, tag: u64| {
        renewal::ldp_tail_estimate(1.0, t, n, rng::derive(seed, tag)).map(|e| e.rate)
    };
    let mut checks =
        vec![
            match renewal::ldp_tail_estimate(1.0, 15.0, sz.ldp_n, rng::derive(seed, 0)) {
                Ok(e) => Check::within("rate at a = 1, t = 15", e.rate, target, 0.3 * target)
                    .with_note(format!("{} hits in {}", e.hits, e.n)),
                Err(e) => Check::errored("rate at a = 1, t = 15", target, 0.3 * target, &e)
                    .with_note(format!("{e} (n = {})", sz.ldp_n)),
            },
        ];
    let name = "|rate - I(1)| at t = 20 vs t = 15";
    checks.push(
        match (
            rate(15.0, sz.ldp_trend_n15, 1),
            rate(20.0, sz.ldp_trend_n20, 2),
        ) {
            (Ok(r15), Ok(r20)) => Check::at_most(name, (r20 - target).abs(), (r15 - target).abs())
                .with_note(format!("rates {r15:.4} (t = 15), {r20:.4} (t = 20)")),
            (Err(e), _) | (_, Err(e)) => Check::errored(name, 0.0, 0.0, &e),
        },
    );
    checks
}

fn samplers(sz: &Sizes, seed: u64) -> Vec<Check> {
    let n = sz.draws;
    let mut r = rng::stream(seed, 0);
    let log_ratio = (0..n).map(|_| laws::sample_ratio(&mut r).ln()).sum::<f64>() / n as f64;
    let mut r = rng::stream(seed, 1);
    let excess = (0..n)
        .map(|_| laws::sample_central_excess(&mut r))
        .sum::<f64>()
        / n as f64;
    let mut r = rng::stream(seed, 2);
    let mut first: Vec<f64> = (0..n).map(|_| laws::sample_first_flip(&mut r)).collect();
    let median = verify::median(&mut first).unwrap_or(f64::NAN);
    vec![
        Check::within("mean log ratio", log_ratio, 3.0, 0.02),
        Check::within("mean central excess", excess, 5.0 / 3.0, 0.01),
        Check::within("median first sign change", median, 6.49, 0.1),
    ]
}

fn slope_length_law() -> Vec<Check> {
    vec![
        Check::within(
            "integral of f_l",
            laws::length_expectation(|_| 1.0),
            1.0,
            1e-8,
        ),
        Check::within(
            "mean slope length",
            laws::length_expectation(|t| t),
            1.0,
            1e-8,
        ),
        Check::within(
            "E exp(-l/2) vs 1/cosh 1",
            laws::length_expectation(|t| (-t / 2.0).exp()),
            1.0 / 1f64.cosh(),
            1e-8,
        ),
    ]
}

/// Runs `tables` twice into fresh directories and counts byte-identical files.
fn identical_outputs(
    tables: impl Fn(&ExperimentConfig) -> Result<Vec<cli::Table>>,
    cfg: &ExperimentConfig,
    tag: &str,
) -> Result<(usize, usize)> {
    let base = std::env::temp_dir().join(format!("sinai-repro-{}-{tag}", std::process::id()));
    let dirs: Vec<PathBuf> = (0..2).map(|i| base.join(i.to_string())).collect();
    let mut written = Vec::new();
    for dir in &dirs {
        written.push(cli::write_tables(&tables(cfg)?, dir, Format::Csv)?);
    }
    let read = |p: &PathBuf| fs::read(p).map_err(|e| Error::InvalidArgument(e.to_string()));
    let mut same = 0;
    for (a, b) in written[0].iter().zip(&written[1]) {
        if read(a)? == read(b)? {
            same += 1;
        }
    }
    let _ = fs::remove_dir_all(&base);
    Ok((same, written[0].len()))
}

fn reproducibility(
    sz: &Sizes,
    seed: u64,
    big: &Result<Vec<ReplicaRun>>,
    small: &Result<Vec<ReplicaRun>>,
) -> Vec<Check> {
    let cfg = ExperimentConfig {
        seed,
        replicas: sz.repro_replicas,
        window: sz.small_window,
        x_max: 100.0,
        ..ExperimentConfig::default()
    };
    let grid = ExperimentConfig {
        replicas: 20,
        ..cfg.clone()
    };
    let mut total = (0, 0);
    let mut failure = None;
    for outcome in [
        identical_outputs(cli::coarsen_tables, &cfg, "coarsen"),
        identical_outputs(cli::renewal_tables, &cfg, "renewal"),
        identical_outputs(|c| Ok(cli::gridslopes_tables(c)?.0), &grid, "grid"),
    ] {
        match outcome {
            Ok((s, n)) => total = (total.0 + s, total.1 + n),
            Err(e) => failure = failure.or(Some(e)),
        }
    }
    let mut checks = vec![match failure {
        None => Check::within(
            "byte-identical CSV files",
            total.0 as f64,
            total.1 as f64,
            0.0,
        ),
        Some(e) => Check::errored("byte-identical CSV files", total.1 as f64, 0.0, &e),
    }];
    checks.push(survival_check(
        &format!("window {}: P(k(100) = 0)", sz.small_window),
        small,
    ));
    checks.push(survival_check(
        &format!("window {}: P(k(100) = 0)", sz.window),
        big,
    ));
    let name = "difference between windows";
    let diff = big.as_ref().map_err(Clone::clone).and_then(|b| {
        Ok((
            survival_estimate(b, 100.0)?,
            survival_estimate(small.as_ref().map_err(Clone::clone)?, 100.0)?,
        ))
    });
    checks.push(match diff {
        Ok((a, b)) => Check::within(name, a.value - b.value, 0.0, 3.0 * a.stderr.hypot(b.stderr)),
        Err(e) => Check::errored(name, 0.0, f64::NAN, &e),
    });
    checks
}

/// Runs every criterion in order, handing each result to `progress` as
/// soon as it is known.
pub fn run(profile: Profile, seed: u64, mut progress: impl FnMut(&Criterion)) -> Result<Report> {
    let sz = profile.sizes();
    let mut criteria = Vec::new();
    let mut push = |c: Criterion| {
        progress(&c);
        criteria.push(c);
    };

    let t = Instant::now();
    let big = SyntheticBatch::new(sz.window, sz.replicas, 1000.0, rng::derive(seed, 1)).run();
    push(Criterion::new(1, "sign survival", sign_survival(&big), t));
    let t = Instant::now();
    push(Criterion::new(
        2,
        "generating function",
        generating_function(&big),
        t,
    ));
    let t = Instant::now();
    push(Criterion::new(
        3,
        "survival exponent",
        survival_exponent(&big),
        t,
    ));
    let t = Instant::now();
    push(Criterion::new(
        4,
        "ratio law",
        ratio_law(&sz, rng::derive(seed, 4)),
        t,
    ));
    let t = Instant::now();
    push(Criterion::new(
        5,
        "growth rate",
        growth_rate(&sz, rng::derive(seed, 5)),
        t,
    ));
    let t = Instant::now();
    push(Criterion::new(
        6,
        "grid slope statistics",
        grid_statistics(&sz, rng::derive(seed, 6)),
        t,
    ));
    let t = Instant::now();
    push(Criterion::new(
        7,
        "commutation",
        commutation(&sz, rng::derive(seed, 7)),
        t,
    ));
    let t = Instant::now();
    push(Criterion::new(8, "PDE/ODE residuals", residuals(), t));
    let t = Instant::now();
    push(Criterion::new(
        9,
        "large deviations",
        large_deviations(&sz, rng::derive(seed, 9)),
        t,
    ));
    let t = Instant::now();
    push(Criterion::new(
        10,
        "samplers",
        samplers(&sz, rng::derive(seed, 10)),
        t,
    ));
    let t = Instant::now();
    push(Criterion::new(
        11,
        "slope length law",
        slope_length_law(),
        t,
    ));
    let t = Instant::now();
    let small =
        SyntheticBatch::new(sz.small_window, sz.replicas, 100.0, rng::derive(seed, 12)).run();
    push(Criterion::new(
        12,
        "reproducibility and window robustness",
        reproducibility(&sz, rng::derive(seed, 120), &big, &small),
        t,
    ));

    Ok(Report {
        profile,
        seed,
        sizes: sz,
        criteria,
    })
}
