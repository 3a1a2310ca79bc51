//! The `sinai` command line: experiment drivers, table output and the
//! acceptance report.
//!
//! Settings come from defaults, then an optional `--config` file of
//! `key=value` lines, then flags. All randomness derives from `seed` as
//! described in [`crate::rng`].

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::coarsen::{SignChangeLog, SyntheticBatch};
use crate::envgrid::{self, GridStats};
use crate::error::{Error, Result};
use crate::report::{self, Profile};
use crate::verify::{self, Estimate};
use crate::{laws, renewal};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ACCEPTANCE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Format> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidArgument(format!("unknown format {s:?}"))),
        }
    }
}

/// Resolved settings of one experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub replicas: u64,
    /// Synthetic window size (odd, at least 3).
    pub window: usize,
    pub x_max: f64,
    pub grid_step: f64,
    pub half_length: f64,
    /// Extraction level for `gridslopes`.
    pub level: f64,
    /// `None` lets each subcommand pick its own list.
    pub z_list: Option<Vec<f64>>,
    pub x_list: Option<Vec<f64>>,
    pub out_dir: PathBuf,
    pub format: Format,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            seed: 1,
            replicas: 1000,
            window: 10_001,
            x_max: 100.0,
            grid_step: 1e-3,
            half_length: 100.0,
            level: 1.0,
            z_list: None,
            x_list: None,
            out_dir: PathBuf::from("."),
            format: Format::Csv,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value {value:?} for {key}")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| parse(key, v)).collect()
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "seed" => self.seed = parse(key, value)?,
            "replicas" => self.replicas = parse(key, value)?,
            "window" => self.window = parse(key, value)?,
            "x_max" => self.x_max = parse(key, value)?,
            "grid_step" => self.grid_step = parse(key, value)?,
            "half_length" => self.half_length = parse(key, value)?,
            "level" => self.level = parse(key, value)?,
            "z_list" => self.z_list = Some(parse_list(key, value)?),
            "x_list" => self.x_list = Some(parse_list(key, value)?),
            "out_dir" => self.out_dir = PathBuf::from(value.trim()),
            "format" => self.format = value.trim().parse()?,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "unknown config key {key:?}"
                )))
            }
        }
        Ok(())
    }

    /// Applies a `key=value` file; blank lines and `#` comments are skipped.
    pub fn load(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidArgument(format!("config line {}: expected key=value", n + 1))
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicas < 1 {
            return Err(Error::InvalidArgument("replicas must be >= 1".into()));
        }
        if self.window < 3 || self.window.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "window must be odd and >= 3, got {}",
                self.window
            )));
        }
        if !(self.x_max >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "x_max must be >= 1, got {}",
                self.x_max
            )));
        }
        Ok(())
    }

    fn xs(&self, default: &[f64]) -> Vec<f64> {
        self.x_list.clone().unwrap_or_else(|| default.to_vec())
    }

    fn zs(&self, default: &[f64]) -> Vec<f64> {
        self.z_list.clone().unwrap_or_else(|| default.to_vec())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Word(&'static str),
}

impl Cell {
    fn csv(&self) -> String {
        match *self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits: every value round-trips.
            Cell::Real(v) => format!("{v:.16e}"),
            Cell::Word(w) => w.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match *self {
            Cell::Int(v) => v.into(),
            Cell::Real(v) => serde_json::Number::from_f64(v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Word(w) => w.into(),
        }
    }
}

/// A named output table with a fixed column order.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(name: &'static str, header: &'static [&'static str]) -> Table {
        Table {
            name,
            header,
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(k, c)| (k.to_string(), c.json()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("table rows serialize");
        s.push('\n');
        s
    }

    pub fn file_name(&self, format: Format) -> String {
        match format {
            Format::Csv => format!("{}.csv", self.name),
            Format::Json => format!("{}.json", self.name),
        }
    }

    pub fn write(&self, dir: &FsPath, format: Format) -> Result<PathBuf> {
        let path = dir.join(self.file_name(format));
        let body = match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        fs::write(&path, body)
            .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

pub fn write_tables(tables: &[Table], dir: &FsPath, format: Format) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", dir.display())))?;
    tables.iter().map(|t| t.write(dir, format)).collect()
}

const FLIPS: &[&str] = &["replica", "flip_index", "level"];
const SURVIVAL: &[&str] = &["x", "n", "p_hat", "stderr", "analytic"];
const GENFUN: &[&str] = &["x", "z", "n", "estimate", "stderr", "analytic"];
const GRIDSTATS: &[&str] = &[
    "path_id",
    "central_excess",
    "central_length",
    "direction",
    "rel_origin",
    "neighbor_excess",
];
const LDP: &[&str] = &["a", "t", "n", "hits", "rate", "stderr", "analytic"];
const PDECHECK: &[&str] = &["check", "x", "y", "z", "residual"];

const DEFAULT_XS: &[f64] = &[10.0, 30.0, 100.0];
const DEFAULT_ZS: &[f64] = &[0.5];

/// flips, survival and genfun tables for a set of complete logs.
fn log_tables(logs: &[SignChangeLog], xs: &[f64], zs: &[f64]) -> Result<Vec<Table>> {
    let mut flips = Table::new("flips", FLIPS);
    for (i, log) in logs.iter().enumerate() {
        for (k, &x) in log.levels.iter().enumerate() {
            flips.rows.push(vec![
                Cell::Int(i as u64),
                Cell::Int(k as u64 + 1),
                Cell::Real(x),
            ]);
        }
    }
    let mut survival = Table::new("survival", SURVIVAL);
    let mut genfun = Table::new("genfun", GENFUN);
    for &x in xs {
        let counts = logs
            .iter()
            .map(|l| l.count_flips(x))
            .collect::<Result<Vec<_>>>()?;
        let p = verify::estimate_genfun(&counts, 0.0)?;
        survival.rows.push(vec![
            Cell::Real(x),
            Cell::Int(p.n as u64),
            Cell::Real(p.value),
            Cell::Real(p.stderr),
            Cell::Real(laws::survival(x)),
        ]);
        for &z in zs {
            let e = verify::estimate_genfun(&counts, z)?;
            genfun.rows.push(genfun_row(x, z, Some(e))?);
        }
    }
    Ok(vec![flips, survival, genfun])
}

fn genfun_row(x: f64, z: f64, e: Option<Estimate>) -> Result<Vec<Cell>> {
    let (n, value, stderr) = e.map_or((0, f64::NAN, f64::NAN), |e| (e.n as u64, e.value, e.stderr));
    Ok(vec![
        Cell::Real(x),
        Cell::Real(z),
        Cell::Int(n),
        Cell::Real(value),
        Cell::Real(stderr),
        Cell::Real(laws::genfun_real(x, z)?),
    ])
}

fn check_levels(cfg: &ExperimentConfig, xs: &[f64]) -> Result<()> {
    if let Some(&x) = xs.iter().find(|&&x| !(x >= 1.0 && x <= cfg.x_max)) {
        return Err(Error::InvalidArgument(format!(
            "level {x} outside [1, x_max = {}]",
            cfg.x_max
        )));
    }
    Ok(())
}

pub fn coarsen_tables(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    cfg.validate()?;
    let xs = cfg.xs(DEFAULT_XS);
    check_levels(cfg, &xs)?;
    let runs = SyntheticBatch::new(cfg.window, cfg.replicas, cfg.x_max, cfg.seed).run()?;
    let logs: Vec<SignChangeLog> = runs.into_iter().map(|r| r.log).collect();
    log_tables(&logs, &xs, &cfg.zs(DEFAULT_ZS))
}

pub fn renewal_tables(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    cfg.validate()?;
    let xs = cfg.xs(DEFAULT_XS);
    check_levels(cfg, &xs)?;
    let runs = renewal::run_batch(cfg.x_max, cfg.replicas, cfg.seed)?;
    let logs: Vec<SignChangeLog> = runs.into_iter().map(|r| r.log).collect();
    log_tables(&logs, &xs, &cfg.zs(DEFAULT_ZS))
}

/// Monte Carlo and closed-form `E z^{k(x)}` on the `x_list` by `z_list`
/// grid, from synthetic coarsening run to the largest `x`.
pub fn genfun_tables(cfg: &ExperimentConfig) -> Result<Vec<Table>> {
    let xs = cfg.xs(DEFAULT_XS);
    let zs = cfg.zs(DEFAULT_ZS);
    let x_top = xs.iter().copied().fold(1.0, f64::max);
    let cfg = ExperimentConfig {
        x_max: x_top,
        ..cfg.clone()
    };
    cfg.validate()?;
    check_levels(&cfg, &xs)?;
    let runs = SyntheticBatch::new(cfg.window, cfg.replicas, x_top, cfg.seed).run()?;
    let mut table = Table::new("genfun", GENFUN);
    for &x in &xs {
        let counts = runs
            .iter()
            .map(|r| r.log.count_flips(x))
            .collect::<Result<Vec<_>>>()?;
        for &z in &zs {
            let e = if z.abs() <= 1.0 {
                Some(verify::estimate_genfun(&counts, z)?)
            } else {
                None
            };
            table.rows.push(genfun_row(x, z, e)?);
        }
    }
    Ok(vec![table])
}

pub fn gridslopes_tables(cfg: &ExperimentConfig) -> Result<(Vec<Table>, u64)> {
    cfg.validate()?;
    let stats = grid_batch(cfg)?;
    let failed = cfg.replicas - stats.len() as u64;
    let mut table = Table::new("gridstats", GRIDSTATS);
    for g in stats {
        table.rows.push(vec![
            Cell::Int(g.path_id),
            Cell::Real(g.central.excess),
            Cell::Real(g.central.length),
            Cell::Word(g.central.direction.as_str()),
            Cell::Real(g.central.rel_origin),
            Cell::Real(g.neighbor_excess),
        ]);
    }
    Ok((vec![table], failed))
}

/// Per-path statistics for paths `0..replicas`; paths whose domain is too
/// short are left out.
pub fn grid_batch(cfg: &ExperimentConfig) -> Result<Vec<GridStats>> {
    use rayon::prelude::*;
    let per_path: Vec<Result<Option<GridStats>>> = (0..cfg.replicas)
        .into_par_iter()
        .map(|i| {
            let path = envgrid::sample_path_replica(cfg.half_length, cfg.grid_step, cfg.seed, i)?;
            match envgrid::extract_slopes(&path, cfg.level).and_then(|c| envgrid::grid_stats(i, &c))
            {
                Ok(g) => Ok(Some(g)),
                Err(Error::InsufficientDomain(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    per_path.into_iter().filter_map(|r| r.transpose()).collect()
}

pub fn ldp_tables(cfg: &ExperimentConfig, a_list: &[f64], t: f64, n: u64) -> Result<Vec<Table>> {
    let mut table = Table::new("ldp", LDP);
    for &a in a_list {
        let e = renewal::ldp_tail_estimate(a, t, n, cfg.seed)?;
        table.rows.push(vec![
            Cell::Real(a),
            Cell::Real(t),
            Cell::Int(e.n),
            Cell::Int(e.hits),
            Cell::Real(e.rate),
            Cell::Real(e.stderr),
            Cell::Real(laws::rate_function(a)),
        ]);
    }
    Ok(vec![table])
}

pub fn pdecheck_tables(cfg: &ExperimentConfig, fd_step: f64) -> Result<Vec<Table>> {
    let xs = cfg.xs(&[1.5, 2.0, 5.0, 10.0]);
    let zs = cfg.zs(&[-0.5, 0.0, 0.5]);
    let mut table = Table::new("pdecheck", PDECHECK);
    for &x in &xs {
        for &z in &zs {
            let (ra, rb) = laws::ode_residual(x, z)?;
            for (check, r) in [("ode_a", ra), ("ode_b", rb)] {
                table.rows.push(vec![
                    Cell::Word(check),
                    Cell::Real(x),
                    Cell::Real(f64::NAN),
                    Cell::Real(z),
                    Cell::Real(r),
                ]);
            }
            for y in [0.3, 0.7, 2.0] {
                if x > 1.0 {
                    table.rows.push(vec![
                        Cell::Word("pde"),
                        Cell::Real(x),
                        Cell::Real(y),
                        Cell::Real(z),
                        Cell::Real(laws::pde_residual(x, y, z, fd_step)?),
                    ]);
                }
            }
        }
    }
    for &z in &zs {
        for y in [0.0, 1.0, 3.0] {
            table.rows.push(vec![
                Cell::Word("initial"),
                Cell::Real(1.0),
                Cell::Real(y),
                Cell::Real(z),
                Cell::Real(laws::initial_condition_residual(y, z)?),
            ]);
        }
    }
    Ok(vec![table])
}

#[derive(Parser, Debug)]
#[command(
    name = "sinai",
    version,
    about = "Coarsening simulations of the localization process and checks of its exact laws"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Level-x slope statistics of sampled grid environments.
    Gridslopes(CommonArgs),
    /// Synthetic coarsening runs: sign-change levels, survival, generating function.
    Coarsen(CommonArgs),
    /// Direct renewal simulation of the sign-change levels.
    Renewal(CommonArgs),
    /// Generating function E z^k(x), Monte Carlo against closed form.
    Genfun(CommonArgs),
    /// Tail frequency estimate of the large-deviation rate.
    Ldp(LdpArgs),
    /// Residuals of the PDE/ODE system at the closed-form solution.
    Pdecheck(PdeArgs),
    /// Run the acceptance suite.
    Report(ReportArgs),
}

#[derive(Args, Debug, Default, Clone)]
pub struct CommonArgs {
    /// key=value file; flags given here take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicas: Option<u64>,
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long)]
    pub half_length: Option<f64>,
    #[arg(long)]
    pub level: Option<f64>,
    /// Comma-separated z values.
    #[arg(
        long = "z",
        visible_alias = "z-list",
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    pub z_list: Option<Vec<f64>>,
    /// Comma-separated levels x.
    #[arg(long = "x", visible_alias = "x-list", value_delimiter = ',')]
    pub x_list: Option<Vec<f64>>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug)]
pub struct LdpArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated thresholds a (> 1/3).
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub a: Vec<f64>,
    #[arg(long, default_value_t = 15.0)]
    pub t: f64,
    /// Independent runs.
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
}

#[derive(Args, Debug)]
pub struct PdeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value_t = 1e-4)]
    pub fd_step: f64,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "desk")]
    pub profile: Profile,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::InvalidArgument(format!("cannot read {}: {e}", path.display()))
            })?;
            cfg.load(&text)?;
        }
        macro_rules! take {
            ($($f:ident),*) => {$(
                if let Some(v) = &self.$f {
                    cfg.$f = v.clone();
                }
            )*};
        }
        take!(
            seed,
            replicas,
            window,
            x_max,
            grid_step,
            half_length,
            level,
            out_dir,
            format
        );
        if self.z_list.is_some() {
            cfg.z_list = self.z_list.clone();
        }
        if self.x_list.is_some() {
            cfg.x_list = self.x_list.clone();
        }
        Ok(cfg)
    }
}

/// Caps the worker pool from `SINAI_THREADS` (unset or 0: rayon's default).
pub fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("SINAI_THREADS") else {
        return Ok(());
    };
    let n: usize = parse("SINAI_THREADS", &v)?;
    if n > 0 {
        // A pool built earlier in the process keeps its size.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn emit(tables: &[Table], cfg: &ExperimentConfig) -> Result<()> {
    for path in write_tables(tables, &cfg.out_dir, cfg.format)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn dispatch(command: Command) -> Result<i32> {
    configure_threads()?;
    match command {
        Command::Gridslopes(args) => {
            let cfg = args.resolve()?;
            let (tables, failed) = gridslopes_tables(&cfg)?;
            if failed > 0 {
                eprintln!(
                    "{failed} of {} paths too short for level {}",
                    cfg.replicas, cfg.level
                );
            }
            emit(&tables, &cfg)?;
        }
        Command::Coarsen(args) => {
            let cfg = args.resolve()?;
            emit(&coarsen_tables(&cfg)?, &cfg)?;
        }
        Command::Renewal(args) => {
            let cfg = args.resolve()?;
            emit(&renewal_tables(&cfg)?, &cfg)?;
        }
        Command::Genfun(args) => {
            let cfg = args.resolve()?;
            emit(&genfun_tables(&cfg)?, &cfg)?;
        }
        Command::Ldp(args) => {
            let cfg = args.common.resolve()?;
            emit(&ldp_tables(&cfg, &args.a, args.t, args.n)?, &cfg)?;
        }
        Command::Pdecheck(args) => {
            let cfg = args.common.resolve()?;
            emit(&pdecheck_tables(&cfg, args.fd_step)?, &cfg)?;
        }
        Command::Report(args) => {
            let cfg = args.common.resolve()?;
            let rep = report::run(args.profile, cfg.seed, |c| println!("{}", c.line()))?;
            fs::create_dir_all(&cfg.out_dir).map_err(|e| {
                Error::InvalidArgument(format!("cannot create {}: {e}", cfg.out_dir.display()))
            })?;
            let path = cfg.out_dir.join("report.json");
            let json = serde_json::to_string_pretty(&rep).expect("report serializes");
            fs::write(&path, json + "\n").map_err(|e| {
                Error::InvalidArgument(format!("cannot write {}: {e}", path.display()))
            })?;
            println!("{}", rep.summary());
            eprintln!("wrote {}", path.display());
            if !rep.all_pass() {
                return Ok(EXIT_ACCEPTANCE);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Parses `argv` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            let mut msg = String::new();
            let _ = write!(msg, "sinai: {e}");
            eprintln!("{msg}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_then_flags() {
        let mut cfg = ExperimentConfig::default();
        cfg.load("# run\nseed = 9\nreplicas=5\nz_list=0.1,0.2\n\nformat=json\n")
            .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.replicas, 5);
        assert_eq!(cfg.z_list, Some(vec![0.1, 0.2]));
        assert_eq!(cfg.format, Format::Json);
        assert!(cfg.clone().load("nonsense").is_err());
        assert!(cfg.clone().load("colour=red").is_err());
        assert!(cfg.clone().load("seed=-3").is_err());

        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.cfg");
        fs::write(&file, "seed=9\nreplicas=5\n").unwrap();
        let args = CommonArgs {
            config: Some(file),
            seed: Some(11),
            ..CommonArgs::default()
        };
        let cfg = args.resolve().unwrap();
        assert_eq!((cfg.seed, cfg.replicas), (11, 5));
    }

    #[test]
    fn validation() {
        let ok = ExperimentConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            ExperimentConfig {
                replicas: 0,
                ..ok.clone()
            },
            ExperimentConfig {
                window: 4,
                ..ok.clone()
            },
            ExperimentConfig {
                x_max: 0.5,
                ..ok.clone()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn csv_numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 6.02e23, -2.5e-300, 1.0] {
            let s = Cell::Real(v).csv();
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        let mut t = Table::new("t", &["a", "b", "c"]);
        t.rows
            .push(vec![Cell::Int(3), Cell::Word("up"), Cell::Real(0.5)]);
        assert_eq!(t.to_csv(), "a,b,c\n3,up,5.0000000000000000e-1\n");
        let json: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(json[0]["b"], "up");
        assert_eq!(json[0]["c"], 0.5);
    }

    #[test]
    fn genfun_at_one_is_exactly_one() {
        let cfg = ExperimentConfig {
            replicas: 50,
            window: 101,
            z_list: Some(vec![1.0]),
            x_list: Some(vec![50.0]),
            ..ExperimentConfig::default()
        };
        let t = &genfun_tables(&cfg).unwrap()[0];
        assert_eq!(t.rows[0][3], Cell::Real(1.0));
        assert_eq!(t.rows[0][5], Cell::Real(1.0));
    }

    #[test]
    fn log_tables_layout() {
        let cfg = ExperimentConfig {
            replicas: 30,
            window: 101,
            x_max: 50.0,
            x_list: Some(vec![1.0, 50.0]),
            ..ExperimentConfig::default()
        };
        let tables = coarsen_tables(&cfg).unwrap();
        let names: Vec<&str> = tables.iter().map(|t| t.name).collect();
        assert_eq!(names, ["flips", "survival", "genfun"]);
        assert_eq!(tables[1].rows[0][2], Cell::Real(1.0));
        assert!(tables[0]
            .rows
            .iter()
            .all(|r| matches!(r[2], Cell::Real(x) if x > 1.0 && x <= 50.0)));
        let too_far = ExperimentConfig {
            x_list: Some(vec![60.0]),
            ..cfg
        };
        assert!(coarsen_tables(&too_far).is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["sinai"]), EXIT_USAGE);
        assert_eq!(run(["sinai", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["sinai", "coarsen", "--replicas", "many"]), EXIT_USAGE);
        assert_eq!(run(["sinai", "coarsen", "--window", "4"]), EXIT_USAGE);
        assert_eq!(run(["sinai", "--help"]), EXIT_OK);
    }
}
