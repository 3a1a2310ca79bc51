//! Discrete two-sided Brownian environments and their x-extrema.
//!
//! A [`Path`] holds `w` on a uniform grid with `w(0) = 0`. The x-extrema of
//! the piecewise-linear interpolant are always grid points, so extraction
//! works on the samples directly: a point is an x-minimum when, walking
//! away from it on either side, the path rises by at least `x` before it
//! dips below the point's value. Witnesses must lie inside the sampled
//! domain.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Stream};

/// Largest supported number of grid points on one side of the origin.
const MAX_HALF_POINTS: f64 = (1u64 << 36) as f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Up,
    Down,
}

impl Direction {
    pub fn reversed(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    step: f64,
    origin_index: usize,
    values: Vec<f64>,
    seed: u64,
}

impl Path {
    pub fn new(step: f64, origin_index: usize, values: Vec<f64>, seed: u64) -> Result<Path> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::NonFiniteInput(format!("grid step {step}")));
        }
        if values.len() < 3 {
            return Err(Error::InvalidArgument(format!(
                "path needs at least 3 points, got {}",
                values.len()
            )));
        }
        // Only increments matter, so W(0) need not be 0.
        if origin_index >= values.len() {
            return Err(Error::InvalidArgument(format!(
                "origin index {origin_index} out of range"
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput(format!("value at grid index {i}")));
        }
        Ok(Path {
            step,
            origin_index,
            values,
            seed,
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn origin_index(&self) -> usize {
        self.origin_index
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Spatial coordinate of grid index `i`.
    pub fn position(&self, i: usize) -> f64 {
        (i as i64 - self.origin_index as i64) as f64 * self.step
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slope {
    pub left: f64,
    pub right: f64,
    pub height: f64,
    pub direction: Direction,
}

impl Slope {
    pub fn length(&self) -> f64 {
        self.right - self.left
    }
}

/// Alternating slopes between consecutive x-extrema, with the slope covering
/// the origin marked.
///
/// The margins describe what lies between the domain edge and the outermost
/// extrema: the largest rise (or fall) toward the edge, measured from the
/// outermost extremum. They let a grid chain be coarsened to higher levels
/// with the same boundary behavior as a fresh extraction. Hand-built chains
/// leave them unset, which makes the chain ends hard walls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeChain {
    pub level: f64,
    pub slopes: Vec<Slope>,
    pub central_index: usize,
    pub left_margin: Option<f64>,
    pub right_margin: Option<f64>,
}

impl SlopeChain {
    /// Builds a chain without boundary margins, checking every invariant.
    pub fn new(level: f64, slopes: Vec<Slope>, central_index: usize) -> Result<SlopeChain> {
        let chain = SlopeChain {
            level,
            slopes,
            central_index,
            left_margin: None,
            right_margin: None,
        };
        chain.validate()?;
        Ok(chain)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidChain(m));
        if !(self.level.is_finite() && self.level > 0.0) {
            return bad(format!("level {}", self.level));
        }
        if self.slopes.is_empty() {
            return bad("no slopes".into());
        }
        if self.central_index >= self.slopes.len() {
            return bad(format!("central index {} out of range", self.central_index));
        }
        for (i, s) in self.slopes.iter().enumerate() {
            if !(s.left < s.right) {
                return bad(format!("slope {i} has empty span"));
            }
            if !(s.height >= self.level) {
                return bad(format!("slope {i} height {} below level", s.height));
            }
        }
        for (i, pair) in self.slopes.windows(2).enumerate() {
            if pair[0].right != pair[1].left {
                return bad(format!("slopes {i} and {} are not contiguous", i + 1));
            }
            if pair[0].direction == pair[1].direction {
                return bad(format!("slopes {i} and {} do not alternate", i + 1));
            }
        }
        let c = &self.slopes[self.central_index];
        if !(c.left <= 0.0 && 0.0 < c.right) {
            return bad("central slope does not cover the origin".into());
        }
        for m in [self.left_margin, self.right_margin].into_iter().flatten() {
            if !(m >= self.level) {
                return bad(format!("boundary margin {m} below level"));
            }
        }
        Ok(())
    }

    pub fn central(&self) -> &Slope {
        &self.slopes[self.central_index]
    }

    /// Positions of the x-extrema, left to right.
    pub fn extrema(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.slopes.len() + 1);
        out.push(self.slopes[0].left);
        out.extend(self.slopes.iter().map(|s| s.right));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralStats {
    pub excess: f64,
    pub length: f64,
    pub direction: Direction,
    pub rel_origin: f64,
    pub b: f64,
}

/// Samples `w` on the grid `{k * step : |k * step| <= half_length}` (rounded
/// outward) from streams `0` and `1` of `seed`.
pub fn sample_path(half_length: f64, step: f64, seed: u64) -> Result<Path> {
    sample_path_replica(half_length, step, seed, 0)
}

/// Replica `replica` of a batch keyed by `seed`; see [`crate::rng`].
pub fn sample_path_replica(half_length: f64, step: f64, seed: u64, replica: u64) -> Result<Path> {
    let half = half_points(half_length, step)?;
    let (mut left, mut right) = rng::path_streams(seed, replica);
    let sd = step.sqrt();
    let mut values = vec![0.0; 2 * half + 1];
    fill_walk(values[..half].iter_mut().rev(), &mut left, sd);
    fill_walk(values[half + 1..].iter_mut(), &mut right, sd);
    Path::new(step, half, values, seed)
}

fn half_points(half_length: f64, step: f64) -> Result<usize> {
    if !(step.is_finite() && step > 0.0 && half_length.is_finite()) {
        return Err(Error::NonFiniteInput(format!(
            "half_length {half_length}, step {step}"
        )));
    }
    if half_length < step {
        return Err(Error::InvalidArgument(format!(
            "half_length {half_length} shorter than step {step}"
        )));
    }
    let ratio = half_length / step;
    if !(ratio < MAX_HALF_POINTS) {
        return Err(Error::NonFiniteInput(format!(
            "{ratio} grid points per side"
        )));
    }
    let nearest = ratio.round();
    let n = if (ratio - nearest).abs() <= 1e-9 * nearest {
        nearest
    } else {
        ratio.ceil()
    };
    Ok(n as usize)
}

fn fill_walk<'a>(slots: impl Iterator<Item = &'a mut f64>, rng: &mut Stream, sd: f64) {
    let mut w = 0.0;
    for slot in slots {
        let z: f64 = rng.sample(StandardNormal);
        w += sd * z;
        *slot = w;
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Trend {
    Unknown,
    Up,
    Down,
}

/// Grid indices of the x-extrema, left to right, with the kind of the first
/// one (`true` for a maximum).
///
/// Single forward pass. The candidate that opens the first trend never has a
/// left witness and the final unconfirmed candidate never has a right one,
/// so both are dropped. Ties keep the leftmost point.
pub fn extrema_indices(values: &[f64], level: f64) -> (Vec<usize>, bool) {
    let mut out = Vec::new();
    let mut first_is_max = false;
    let mut trend = Trend::Unknown;
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut cand = 0usize;
    for (i, &v) in values.iter().enumerate() {
        match trend {
            Trend::Unknown => {
                if v - values[lo] >= level {
                    trend = Trend::Up;
                    cand = i;
                } else if values[hi] - v >= level {
                    trend = Trend::Down;
                    cand = i;
                } else if v < values[lo] {
                    lo = i;
                } else if v > values[hi] {
                    hi = i;
                }
            }
            Trend::Up => {
                if v > values[cand] {
                    cand = i;
                } else if values[cand] - v >= level {
                    if out.is_empty() {
                        first_is_max = true;
                    }
                    out.push(cand);
                    trend = Trend::Down;
                    cand = i;
                }
            }
            Trend::Down => {
                if v < values[cand] {
                    cand = i;
                } else if v - values[cand] >= level {
                    out.push(cand);
                    trend = Trend::Up;
                    cand = i;
                }
            }
        }
    }
    (out, first_is_max)
}

pub fn extract_slopes(path: &Path, level: f64) -> Result<SlopeChain> {
    if !(level.is_finite() && level > 0.0) {
        return Err(Error::InvalidArgument(format!("level {level}")));
    }
    let v = path.values();
    let (ext, first_is_max) = extrema_indices(v, level);
    let origin = path.origin_index();
    let central_index = ext
        .windows(2)
        .position(|p| p[0] <= origin && origin < p[1])
        .ok_or_else(|| {
            Error::InsufficientDomain(format!(
                "{} interior {level}-extrema, none straddling the origin",
                ext.len()
            ))
        })?;

    let slopes = ext
        .windows(2)
        .map(|p| {
            let (a, b) = (v[p[0]], v[p[1]]);
            Slope {
                left: path.position(p[0]),
                right: path.position(p[1]),
                height: (b - a).abs(),
                direction: if b > a {
                    Direction::Up
                } else {
                    Direction::Down
                },
            }
        })
        .collect();

    let first = ext[0];
    let last = *ext.last().unwrap();
    let last_is_max = first_is_max == ((ext.len() - 1) % 2 == 0);
    let prefix = &v[..first];
    let suffix = &v[last + 1..];
    let left_margin = if first_is_max {
        v[first] - prefix.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        prefix.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v[first]
    };
    let right_margin = if last_is_max {
        v[last] - suffix.iter().copied().fold(f64::INFINITY, f64::min)
    } else {
        suffix.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v[last]
    };

    let chain = SlopeChain {
        level,
        slopes,
        central_index,
        left_margin: Some(left_margin),
        right_margin: Some(right_margin),
    };
    debug_assert!(chain.validate().is_ok());
    Ok(chain)
}

pub fn central_stats(chain: &SlopeChain) -> CentralStats {
    let c = chain.central();
    let length = c.length();
    CentralStats {
        excess: c.height - chain.level,
        length,
        direction: c.direction,
        rel_origin: (0.0 - c.left) / length,
        b: match c.direction {
            Direction::Up => c.left,
            Direction::Down => c.right,
        },
    }
}

/// The path `t -> w(c t) / a`. The grid is rescaled with it, so no
/// interpolation is needed.
pub fn rescale_path(path: &Path, a: f64, c: f64) -> Result<Path> {
    for (name, s) in [("a", a), ("c", c)] {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::NonFiniteInput(format!("scale {name} = {s}")));
        }
    }
    let values = path.values().iter().map(|v| v / a).collect();
    Path::new(path.step() / c, path.origin_index(), values, path.seed())
}

/// Per-path level-`level` summary used by the grid statistics suite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridStats {
    pub path_id: u64,
    pub central: CentralStats,
    pub neighbor_excess: f64,
    pub neighbor_length: f64,
}

/// Right neighbor of the central slope when it exists, else the left one.
pub fn grid_stats(path_id: u64, chain: &SlopeChain) -> Result<GridStats> {
    let c = chain.central_index;
    let neighbor = chain
        .slopes
        .get(c + 1)
        .or_else(|| c.checked_sub(1).and_then(|i| chain.slopes.get(i)))
        .ok_or_else(|| Error::InsufficientDomain("central slope has no neighbor".into()))?;
    Ok(GridStats {
        path_id,
        central: central_stats(chain),
        neighbor_excess: neighbor.height - chain.level,
        neighbor_length: neighbor.length(),
    })
}
