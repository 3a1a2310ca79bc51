//! Event-driven coarsening of a slope chain.
//!
//! Raising the level from `x` to `x'` removes every slope whose height falls
//! below the level, smallest first: the slope and its two neighbors fuse
//! into one slope of height `H_left + H_right - H_mid` oriented like the
//! neighbors. When the absorbed slope is the central one the localization
//! point jumps to the other side of the origin and a sign change is logged.
//!
//! Live nodes form a doubly linked list over a slab; every live node sits in
//! an indexed heap keyed by height and slot id. A merge reuses the left
//! neighbor's slot and drops the other two from the heap.
//!
//! Grid chains carry boundary stubs built from the extraction margins. A
//! stub is the partial excursion between the domain edge and the outermost
//! extremum: it can be a neighbor in a merge, and when the stub itself is the
//! lowest node the adjacent extremum loses its witness and the first real
//! slope turns into the new stub.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::envgrid::{Direction, Slope, SlopeChain};
use crate::error::{Error, Result};
use crate::heap::IndexedHeap;
use crate::laws;
use crate::rng::{self, Stream};

const NIL: u32 = u32::MAX;

/// A synthetic window is redrawn once fewer than this many slopes are live.
pub const REFRESH_BELOW: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn reversed(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Sign of `b` for a central slope of the given direction: an upward
    /// central slope has its minimum, hence `b`, at its left end (`b <= 0`).
    pub fn of_central(direction: Direction) -> Sign {
        match direction {
            Direction::Up => Sign::Minus,
            Direction::Down => Sign::Plus,
        }
    }
}

/// Levels at which `b` changed sign, complete on `(start, x_max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignChangeLog {
    pub initial_sign: Sign,
    pub start: f64,
    pub levels: Vec<f64>,
    pub x_max: f64,
}

impl SignChangeLog {
    pub fn new(initial_sign: Sign, start: f64) -> SignChangeLog {
        SignChangeLog {
            initial_sign,
            start,
            levels: Vec::new(),
            x_max: start,
        }
    }

    /// Number of sign changes at levels `<= x`.
    pub fn count_flips(&self, x: f64) -> Result<usize> {
        if x > self.x_max {
            return Err(Error::BeyondLog {
                requested: x,
                complete: self.x_max,
            });
        }
        Ok(self.levels.partition_point(|&l| l <= x))
    }

    /// Sign of `b` just after level `x`.
    pub fn sign_at(&self, x: f64) -> Result<Sign> {
        let k = self.count_flips(x)?;
        Ok(if k % 2 == 0 {
            self.initial_sign
        } else {
            self.initial_sign.reversed()
        })
    }

    /// Consecutive ratios `X_{k+1} / X_k`.
    pub fn ratios(&self) -> impl Iterator<Item = f64> + '_ {
        self.levels.windows(2).map(|p| p[1] / p[0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Slope,
    Stub,
}

#[derive(Clone, Copy, Debug)]
struct Node {
    height: f64,
    direction: Direction,
    left: f64,
    right: f64,
    prev: u32,
    next: u32,
    kind: Kind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Positions and lengths tracked; built from an extracted chain.
    Grid,
    /// Heights, directions and centrality only.
    Synthetic,
}

#[derive(Clone, Debug)]
pub struct Engine {
    nodes: Vec<Node>,
    head: u32,
    tail: u32,
    central: u32,
    level: f64,
    queue: IndexedHeap,
    replenish: bool,
    replenished: u64,
    window: usize,
    refresh_below: usize,
    refreshes: u64,
    merges: u64,
    live: usize,
    mode: Mode,
    flips: SignChangeLog,
    rng: Option<Stream>,
}

fn key(height: f64) -> u64 {
    // Positive finite doubles order like their bit patterns.
    height.to_bits()
}

impl Engine {
    /// Grid-mode engine over an extracted (or hand-built) chain. Chain
    /// margins become boundary stubs; without them the ends are hard.
    pub fn from_chain(chain: &SlopeChain) -> Result<Engine> {
        chain.validate()?;
        let mut nodes = Vec::with_capacity(chain.slopes.len() + 2);
        if let Some(m) = chain.left_margin {
            let first = &chain.slopes[0];
            nodes.push(stub(
                m,
                first.direction.reversed(),
                f64::NEG_INFINITY,
                first.left,
            ));
        }
        let offset = nodes.len();
        nodes.extend(chain.slopes.iter().map(|s| Node {
            height: s.height,
            direction: s.direction,
            left: s.left,
            right: s.right,
            prev: NIL,
            next: NIL,
            kind: Kind::Slope,
        }));
        if let Some(m) = chain.right_margin {
            let last = chain.slopes.last().unwrap();
            nodes.push(stub(
                m,
                last.direction.reversed(),
                last.right,
                f64::INFINITY,
            ));
        }
        let sign = Sign::of_central(chain.central().direction);
        Ok(Engine::assemble(
            nodes,
            (offset + chain.central_index) as u32,
            chain.level,
            Mode::Grid,
            sign,
            None,
        ))
    }

    /// Synthetic level-1 window of `n_slopes` (odd, at least 3) with the
    /// central node in the middle. Non-central excesses are Exp(1); the
    /// central excess has density `(2y+1) e^{-y} / 3`. Replenishment is on.
    pub fn synthetic(n_slopes: usize, seed: u64) -> Result<Engine> {
        Engine::synthetic_from_stream(n_slopes, rng::stream(seed, 0))
    }

    pub fn synthetic_from_stream(n_slopes: usize, mut rng: Stream) -> Result<Engine> {
        if n_slopes < 3 || n_slopes.is_multiple_of(2) || n_slopes >= NIL as usize {
            return Err(Error::InvalidArgument(format!(
                "synthetic window must be odd and >= 3, got {n_slopes}"
            )));
        }
        let central_dir = if rng.random::<bool>() {
            Direction::Up
        } else {
            Direction::Down
        };
        let central = 1.0 + laws::sample_central_excess(&mut rng);
        let mut nodes = Vec::with_capacity(n_slopes + 16);
        fresh_window(&mut nodes, n_slopes, 1.0, central, central_dir, &mut rng);
        let mut engine = Engine::assemble(
            nodes,
            (n_slopes / 2) as u32,
            1.0,
            Mode::Synthetic,
            Sign::of_central(central_dir),
            Some(rng),
        );
        engine.window = n_slopes;
        engine.refresh_below = default_refresh_below(n_slopes);
        Ok(engine)
    }

    fn assemble(
        mut nodes: Vec<Node>,
        central: u32,
        level: f64,
        mode: Mode,
        sign: Sign,
        rng: Option<Stream>,
    ) -> Engine {
        let n = nodes.len();
        let queue = link(&mut nodes);
        Engine {
            live: nodes.iter().filter(|n| n.kind == Kind::Slope).count(),
            nodes,
            head: 0,
            tail: n as u32 - 1,
            central,
            level,
            queue,
            replenish: mode == Mode::Synthetic,
            replenished: 0,
            window: n,
            refresh_below: 0,
            refreshes: 0,
            merges: 0,
            mode,
            flips: SignChangeLog::new(sign, level),
            rng,
        }
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn flips(&self) -> &SignChangeLog {
        &self.flips
    }

    pub fn into_flips(self) -> SignChangeLog {
        self.flips
    }

    /// Number of live slopes, boundary stubs excluded.
    pub fn live_slopes(&self) -> usize {
        self.live
    }

    pub fn merges(&self) -> u64 {
        self.merges
    }

    pub fn replenishments(&self) -> u64 {
        self.replenished
    }

    /// Number of times the window was redrawn around the central node.
    pub fn refreshes(&self) -> u64 {
        self.refreshes
    }

    /// Redraw the whole window once fewer than `below` slopes are live
    /// (synthetic mode only; 0 disables).
    pub fn set_refresh_below(&mut self, below: usize) -> Result<()> {
        if below > 0 && self.rng.is_none() {
            return Err(Error::Unsupported(
                "refreshing needs a synthetic engine's random stream".into(),
            ));
        }
        self.refresh_below = below;
        Ok(())
    }

    pub fn set_replenish(&mut self, on: bool) -> Result<()> {
        if on && self.rng.is_none() {
            return Err(Error::Unsupported(
                "replenishment needs a synthetic engine's random stream".into(),
            ));
        }
        self.replenish = on;
        Ok(())
    }

    pub fn central_direction(&self) -> Direction {
        self.nodes[self.central as usize].direction
    }

    /// Heights of the live nodes left to right (stubs excluded) and the
    /// position of the central one among them.
    pub fn heights(&self) -> (Vec<f64>, usize) {
        let mut out = Vec::with_capacity(self.live);
        let mut central = 0;
        let mut i = self.head;
        while i != NIL {
            let n = &self.nodes[i as usize];
            if n.kind == Kind::Slope {
                if i == self.central {
                    central = out.len();
                }
                out.push(n.height);
            }
            i = n.next;
        }
        (out, central)
    }

    /// Raises the level to `x_max`, merging every node whose height lies
    /// below it. Nodes with height exactly `x_max` survive, matching the
    /// non-strict threshold of extraction.
    pub fn advance_to(&mut self, x_max: f64) -> Result<&SignChangeLog> {
        if !(x_max >= self.level) {
            return Err(Error::InvalidArgument(format!(
                "target level {x_max} below current level {}",
                self.level
            )));
        }
        while self.step_below(x_max)?.is_some() {}
        self.level = x_max;
        self.flips.x_max = x_max;
        Ok(&self.flips)
    }

    /// Runs events until the next sign change, or until the level would
    /// reach `cap`. Returns the level of the sign change if one happened.
    pub fn advance_to_next_flip(&mut self, cap: f64) -> Result<Option<f64>> {
        let before = self.flips.levels.len();
        while self.step_below(cap)?.is_some() {
            if self.flips.levels.len() > before {
                let x = self.level;
                self.flips.x_max = x;
                return Ok(Some(x));
            }
        }
        self.level = cap.max(self.level);
        self.flips.x_max = self.level;
        Ok(None)
    }

    /// Pops and processes one event below `bound`; returns its level.
    fn step_below(&mut self, bound: f64) -> Result<Option<f64>> {
        let Some((k, id)) = self.queue.peek() else {
            return Ok(None);
        };
        let h = f64::from_bits(k);
        if !(h < bound) {
            return Ok(None);
        }
        self.queue.pop();
        if h < self.level {
            return Err(Error::NonMonotoneEvent {
                height: h,
                level: self.level,
            });
        }
        self.level = h;
        match self.nodes[id as usize].kind {
            Kind::Slope => self.merge(id)?,
            Kind::Stub => self.retreat_stub(id)?,
        }
        if self.live < self.refresh_below {
            self.refresh();
        }
        Ok(Some(h))
    }

    fn merge(&mut self, mid: u32) -> Result<()> {
        let l = self.neighbor(mid, Side::Left)?;
        let r = self.neighbor(mid, Side::Right)?;
        let (ln, mn, rn) = (
            self.nodes[l as usize],
            self.nodes[mid as usize],
            self.nodes[r as usize],
        );
        let height = ln.height + rn.height - mn.height;
        // Holds because `mid` was the lowest live node.
        assert!(
            height > ln.height.max(rn.height),
            "merged height {height} does not exceed neighbors {} and {}",
            ln.height,
            rn.height
        );
        let kind = if ln.kind == Kind::Stub || rn.kind == Kind::Stub {
            Kind::Stub
        } else {
            Kind::Slope
        };
        if kind == Kind::Stub && (self.central == mid || self.central == l || self.central == r) {
            return Err(Error::InsufficientDomain(format!(
                "central slope absorbed into the domain boundary at level {}",
                self.level
            )));
        }
        // The merged node takes over the left neighbor's slot.
        self.nodes[l as usize] = Node {
            height,
            direction: ln.direction,
            left: ln.left,
            right: rn.right,
            prev: ln.prev,
            next: rn.next,
            kind,
        };
        self.queue.remove(r);
        self.queue.update(l, key(height));
        if rn.next == NIL {
            self.tail = l;
        } else {
            self.nodes[rn.next as usize].prev = l;
        }
        if self.central == mid {
            self.flips.levels.push(self.level);
            self.central = l;
        } else if self.central == r {
            self.central = l;
        }
        let absorbed = [ln.kind, mn.kind, rn.kind]
            .iter()
            .filter(|&&k| k == Kind::Slope)
            .count();
        self.live = self.live + usize::from(kind == Kind::Slope) - absorbed;
        self.merges += 1;
        Ok(())
    }

    /// The outermost extremum next to a stub lost its witness: the stub
    /// swallows the adjacent slope and inherits its height.
    fn retreat_stub(&mut self, id: u32) -> Result<()> {
        let node = self.nodes[id as usize];
        let (inner, side) = if node.prev == NIL {
            (node.next, Side::Right)
        } else {
            (node.prev, Side::Left)
        };
        if inner == NIL || self.nodes[inner as usize].kind == Kind::Stub {
            return Err(Error::InsufficientDomain(format!(
                "no extrema left inside the domain at level {}",
                self.level
            )));
        }
        if inner == self.central {
            return Err(Error::InsufficientDomain(format!(
                "central slope lost its outer extremum at level {}",
                self.level
            )));
        }
        let inn = self.nodes[inner as usize];
        let (left, right, prev, next) = match side {
            Side::Right => (node.left, inn.right, NIL, inn.next),
            Side::Left => (inn.left, node.right, inn.prev, NIL),
        };
        self.nodes[id as usize] = Node {
            height: inn.height,
            direction: inn.direction,
            left,
            right,
            prev,
            next,
            kind: Kind::Stub,
        };
        self.queue.remove(inner);
        self.queue.push(id, key(inn.height));
        match side {
            Side::Right => self.nodes[next as usize].prev = id,
            Side::Left => self.nodes[prev as usize].next = id,
        }
        self.live -= 1;
        Ok(())
    }

    /// Keeps the central node and redraws every other one as a fresh
    /// slope at the current level.
    fn refresh(&mut self) {
        let c = self.nodes[self.central as usize];
        let rng = self.rng.as_mut().expect("refresh requires a stream");
        self.nodes.clear();
        fresh_window(
            &mut self.nodes,
            self.window,
            self.level,
            c.height,
            c.direction,
            rng,
        );
        self.queue = link(&mut self.nodes);
        self.head = 0;
        self.tail = self.window as u32 - 1;
        self.central = (self.window / 2) as u32;
        self.live = self.window;
        self.refreshes += 1;
    }

    fn push_node(&mut self, node: Node) -> u32 {
        let id = self.nodes.len() as u32;
        self.queue.push(id, key(node.height));
        self.nodes.push(node);
        id
    }

    /// Live neighbor on `side`, drawing a fresh slope at the window edge
    /// when replenishment is on.
    fn neighbor(&mut self, id: u32, side: Side) -> Result<u32> {
        let n = &self.nodes[id as usize];
        let link = match side {
            Side::Left => n.prev,
            Side::Right => n.next,
        };
        if link != NIL {
            return Ok(link);
        }
        if !self.replenish {
            return Err(Error::WindowExhausted { level: self.level });
        }
        let rng = self.rng.as_mut().expect("replenishment requires a stream");
        let excess: f64 = rng.sample(Exp1);
        let fresh = Node {
            height: self.level * (1.0 + excess),
            direction: n.direction.reversed(),
            left: f64::NAN,
            right: f64::NAN,
            prev: if side == Side::Right { id } else { NIL },
            next: if side == Side::Left { id } else { NIL },
            kind: Kind::Slope,
        };
        let new = self.push_node(fresh);
        match side {
            Side::Left => {
                self.nodes[id as usize].prev = new;
                self.head = new;
            }
            Side::Right => {
                self.nodes[id as usize].next = new;
                self.tail = new;
            }
        }
        self.live += 1;
        self.replenished += 1;
        Ok(new)
    }

    /// Snapshot of the live slopes as a chain at the current level.
    pub fn chain_at(&self) -> Result<SlopeChain> {
        if self.mode != Mode::Grid {
            return Err(Error::Unsupported(
                "synthetic engines do not track positions".into(),
            ));
        }
        let mut slopes = Vec::with_capacity(self.live);
        let (mut left_margin, mut right_margin) = (None, None);
        let mut central_index = 0;
        let mut i = self.head;
        while i != NIL {
            let n = &self.nodes[i as usize];
            match n.kind {
                Kind::Stub if slopes.is_empty() => left_margin = Some(n.height),
                Kind::Stub => right_margin = Some(n.height),
                Kind::Slope => {
                    if i == self.central {
                        central_index = slopes.len();
                    }
                    slopes.push(Slope {
                        left: n.left,
                        right: n.right,
                        height: n.height,
                        direction: n.direction,
                    });
                }
            }
            i = n.next;
        }
        let chain = SlopeChain {
            level: self.level,
            slopes,
            central_index,
            left_margin,
            right_margin,
        };
        chain.validate()?;
        Ok(chain)
    }
}

/// Refresh threshold used by synthetic engines.
pub fn default_refresh_below(window: usize) -> usize {
    (window / 4).clamp(3, REFRESH_BELOW)
}

/// `n` alternating nodes at `level` around a central node of the given
/// height and direction; non-central excesses are Exp(level).
fn fresh_window(
    nodes: &mut Vec<Node>,
    n: usize,
    level: f64,
    central: f64,
    central_dir: Direction,
    rng: &mut Stream,
) {
    let mid = n / 2;
    for i in 0..n {
        let height = if i == mid {
            central
        } else {
            level * (1.0 + rng.sample::<f64, _>(Exp1))
        };
        let direction = if (i + mid).is_multiple_of(2) {
            central_dir
        } else {
            central_dir.reversed()
        };
        nodes.push(Node {
            height,
            direction,
            left: f64::NAN,
            right: f64::NAN,
            prev: NIL,
            next: NIL,
            kind: Kind::Slope,
        });
    }
}

/// Links `nodes` left to right and queues all of them.
fn link(nodes: &mut [Node]) -> IndexedHeap {
    let n = nodes.len();
    for (i, node) in nodes.iter_mut().enumerate() {
        node.prev = if i == 0 { NIL } else { i as u32 - 1 };
        node.next = if i + 1 == n { NIL } else { i as u32 + 1 };
    }
    IndexedHeap::from_keys(nodes.iter().map(|node| key(node.height)))
}

fn stub(height: f64, direction: Direction, left: f64, right: f64) -> Node {
    Node {
        height,
        direction,
        left,
        right,
        prev: NIL,
        next: NIL,
        kind: Kind::Stub,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

/// Outcome of one synthetic replica.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplicaRun {
    pub log: SignChangeLog,
    pub replenishments: u64,
    pub refreshes: u64,
}

/// Settings for a batch of synthetic replicas.
#[derive(Clone, Copy, Debug)]
pub struct SyntheticBatch {
    pub window: usize,
    pub replicas: u64,
    pub x_max: f64,
    pub seed: u64,
    /// Extra sign changes to chase past `x_max` (for uncensored ratios).
    pub overshoot_flips: usize,
    /// Level at which the chase gives up.
    pub overshoot_cap: f64,
    /// Live-count threshold for window refreshes (0 disables).
    pub refresh_below: usize,
}

impl SyntheticBatch {
    pub fn new(window: usize, replicas: u64, x_max: f64, seed: u64) -> SyntheticBatch {
        SyntheticBatch {
            window,
            replicas,
            x_max,
            seed,
            overshoot_flips: 0,
            overshoot_cap: f64::INFINITY,
            refresh_below: default_refresh_below(window),
        }
    }

    /// Replica `i` reads stream `i` of `seed`.
    pub fn run_replica(&self, i: u64) -> Result<ReplicaRun> {
        let mut engine = Engine::synthetic_from_stream(self.window, rng::stream(self.seed, i))?;
        engine.set_refresh_below(self.refresh_below)?;
        engine.advance_to(self.x_max)?;
        for _ in 0..self.overshoot_flips {
            if engine.advance_to_next_flip(self.overshoot_cap)?.is_none() {
                break;
            }
        }
        Ok(ReplicaRun {
            replenishments: engine.replenishments(),
            refreshes: engine.refreshes(),
            log: engine.into_flips(),
        })
    }

    /// All replicas, in replica order regardless of scheduling.
    pub fn run(&self) -> Result<Vec<ReplicaRun>> {
        use rayon::prelude::*;
        (0..self.replicas)
            .into_par_iter()
            .map(|i| self.run_replica(i))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envgrid::{extract_slopes, sample_path, Path};
    use proptest::prelude::*;

    fn slope(left: f64, height: f64, direction: Direction) -> Slope {
        Slope {
            left,
            right: left + 1.0,
            height,
            direction,
        }
    }

    /// Alternating unit-length chain with the given heights; slope `c`
    /// covers the origin and points `central_dir`.
    fn chain(heights: &[f64], c: usize, central_dir: Direction, level: f64) -> SlopeChain {
        let slopes = heights
            .iter()
            .enumerate()
            .map(|(i, &h)| {
                let d = if (i + c).is_multiple_of(2) {
                    central_dir
                } else {
                    central_dir.reversed()
                };
                slope(i as f64 - c as f64 - 0.5, h, d)
            })
            .collect();
        SlopeChain::new(level, slopes, c).unwrap()
    }

    #[test]
    fn three_slope_chain_starts_clean() {
        let ch = chain(&[2.0, 3.0, 4.0], 1, Direction::Up, 1.0);
        let e = Engine::from_chain(&ch).unwrap();
        assert_eq!(e.live_slopes(), 3);
        assert!(e.flips().levels.is_empty());
        assert_eq!(e.chain_at().unwrap(), ch);
    }

    #[test]
    fn broken_chain_is_refused() {
        let mut ch = chain(&[2.0, 3.0, 4.0], 1, Direction::Up, 1.0);
        ch.slopes[2].direction = ch.slopes[1].direction;
        assert!(Engine::from_chain(&ch).is_err());
    }

    #[test]
    fn advancing_to_current_level_is_a_no_op() {
        let ch = chain(&[2.0, 1.5, 4.0], 1, Direction::Up, 1.5);
        let mut e = Engine::from_chain(&ch).unwrap();
        assert!(e.advance_to(1.5).unwrap().levels.is_empty());
        assert_eq!(e.merges(), 0);
        assert_eq!(e.chain_at().unwrap().slopes, ch.slopes);
    }

    #[test]
    fn central_absorption_flips_sign() {
        let ch = chain(&[4.0, 2.5, 2.2, 3.0, 4.0], 2, Direction::Up, 2.0);
        let mut e = Engine::from_chain(&ch).unwrap();
        assert_eq!(e.flips().initial_sign, Sign::Minus);
        let log = e.advance_to(3.2).unwrap().clone();
        assert_eq!(log.levels, vec![2.2]);
        let (h, c) = e.heights();
        assert_eq!(c, 1);
        assert!((h[1] - 3.3).abs() < 1e-12);
        assert_eq!(e.central_direction(), Direction::Down);
        assert_eq!(log.sign_at(3.2).unwrap(), Sign::Plus);
        let snap = e.chain_at().unwrap();
        assert_eq!(snap.slopes.len(), 3);
        assert_eq!(snap.slopes[1].length(), 3.0);
    }

    #[test]
    fn neighbor_absorption_keeps_sign() {
        let ch = chain(&[4.0, 2.1, 2.6, 3.0, 4.0], 2, Direction::Down, 2.0);
        let mut e = Engine::from_chain(&ch).unwrap();
        e.advance_to(2.5).unwrap();
        assert!(e.flips().levels.is_empty());
        let (h, c) = e.heights();
        assert_eq!(h.len(), 3);
        assert_eq!(c, 0);
        assert!((h[0] - (4.0 + 2.6 - 2.1)).abs() < 1e-12);
        assert_eq!(e.central_direction(), Direction::Down);
    }

    #[test]
    fn hard_ends_exhaust() {
        let ch = chain(&[1.5, 3.0, 4.0], 1, Direction::Up, 1.0);
        let mut e = Engine::from_chain(&ch).unwrap();
        assert!(matches!(
            e.advance_to(2.0),
            Err(Error::WindowExhausted { .. })
        ));
        assert!(e.set_replenish(true).is_err());
    }

    #[test]
    fn synthetic_window_shape() {
        assert!(Engine::synthetic(4, 0).is_err());
        assert!(Engine::synthetic(1, 0).is_err());
        let e = Engine::synthetic(3, 5).unwrap();
        let (h, c) = e.heights();
        assert_eq!(c, 1);
        assert!(h.iter().all(|&x| x > 1.0));
        assert!(e.chain_at().is_err());
    }

    #[test]
    fn synthetic_initial_excess_means() {
        let n = 1_000_000usize;
        let mut e = Engine::synthetic(n + 1, 11).unwrap();
        e.set_replenish(false).unwrap();
        let (h, c) = e.heights();
        let others: f64 = h
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != c)
            .map(|(_, x)| x - 1.0)
            .sum::<f64>()
            / n as f64;
        assert!((others - 1.0).abs() < 0.01, "{others}");
        let mut rng = rng::stream(12, 0);
        let central = (0..n)
            .map(|_| laws::sample_central_excess(&mut rng))
            .sum::<f64>()
            / n as f64;
        assert!((central - 5.0 / 3.0).abs() < 0.01, "{central}");
    }

    #[test]
    fn synthetic_runs_are_deterministic_and_monotone() {
        let batch = SyntheticBatch::new(1001, 50, 500.0, 3);
        let a = batch.run().unwrap();
        let b = batch.run().unwrap();
        assert_eq!(a, b);
        for run in &a {
            assert!(run.log.levels.windows(2).all(|p| p[0] < p[1]));
            assert!(run.log.levels.iter().all(|&l| l > 1.0 && l <= 500.0));
        }
    }

    #[test]
    fn small_window_refreshes_and_keeps_alternating() {
        let mut e = Engine::synthetic(11, 4).unwrap();
        e.advance_to(1e4).unwrap();
        assert!(e.refreshes() > 0);
        assert!(e.live_slopes() >= 3);
        let (h, _) = e.heights();
        assert!(h.iter().all(|&x| x >= e.level()));
        let levels = &e.flips().levels;
        assert!(levels.windows(2).all(|p| p[0] < p[1]));
        assert!(levels.iter().all(|&l| l > 1.0 && l <= 1e4));
    }

    #[test]
    fn refresh_needs_a_stream() {
        let ch = chain(&[2.0, 3.0, 4.0], 1, Direction::Up, 1.0);
        let mut e = Engine::from_chain(&ch).unwrap();
        assert!(e.set_refresh_below(3).is_err());
    }

    #[test]
    fn overshoot_extends_log_past_x_max() {
        let mut batch = SyntheticBatch::new(101, 20, 10.0, 8);
        batch.overshoot_flips = 1;
        for run in batch.run().unwrap() {
            let log = run.log;
            if log.x_max > 10.0 {
                assert_eq!(*log.levels.last().unwrap(), log.x_max);
            }
            assert!(log.count_flips(10.0).is_ok());
        }
    }

    #[test]
    fn commutes_with_extraction_on_sampled_paths() {
        for seed in 0..25 {
            let p = sample_path(40.0, 1e-2, seed).unwrap();
            let (Ok(c1), Ok(c2)) = (extract_slopes(&p, 1.0), extract_slopes(&p, 2.0)) else {
                continue;
            };
            let mut e = Engine::from_chain(&c1).unwrap();
            e.advance_to(2.0).unwrap();
            let snap = e.chain_at().unwrap();
            assert_eq!(snap.extrema(), c2.extrema(), "seed {seed}");
            assert_eq!(snap.central_index, c2.central_index);
        }
    }

    fn walk_path(steps: &[f64], origin_frac: f64) -> Path {
        let mut v: Vec<f64> = steps
            .iter()
            .scan(0.0, |w, s| {
                *w += s;
                Some(*w)
            })
            .collect();
        let origin = ((v.len() - 1) as f64 * origin_frac) as usize;
        let shift = v[origin];
        v.iter_mut().for_each(|u| *u -= shift);
        Path::new(0.25, origin, v, 0).unwrap()
    }

    proptest! {
        #[test]
        fn coarsening_matches_fresh_extraction(
            steps in prop::collection::vec(-1.0f64..1.0, 20..400),
            origin_frac in 0.0f64..1.0,
            lo in 0.2f64..1.0,
            ratio in 1.0f64..4.0,
        ) {
            let p = walk_path(&steps, origin_frac);
            let hi = lo * ratio;
            let Ok(start) = extract_slopes(&p, lo) else { return Ok(()) };
            let mut e = Engine::from_chain(&start).unwrap();
            let fresh = extract_slopes(&p, hi);
            match (e.advance_to(hi).map(|_| ()), fresh) {
                (Ok(()), Ok(fresh)) => {
                    let snap = e.chain_at().unwrap();
                    prop_assert_eq!(snap.extrema(), fresh.extrema());
                    prop_assert_eq!(snap.central_index, fresh.central_index);
                    let dirs: Vec<_> = snap.slopes.iter().map(|s| s.direction).collect();
                    let fresh_dirs: Vec<_> = fresh.slopes.iter().map(|s| s.direction).collect();
                    prop_assert_eq!(dirs, fresh_dirs);
                    for (a, b) in snap.slopes.iter().zip(&fresh.slopes) {
                        prop_assert!((a.height - b.height).abs() < 1e-9);
                    }
                }
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "engine {:?} vs extraction {:?}", a, b.map(|c| c.extrema())),
            }
        }

        #[test]
        fn interior_merges_conserve_length(
            inner in prop::collection::vec(1.0f64..5.0, 1..60),
            c_frac in 0.0f64..1.0,
            x in 1.0f64..6.0,
        ) {
            let mut heights = vec![1e3];
            heights.extend(inner);
            heights.push(1e3);
            let c = 1 + ((heights.len() - 3) as f64 * c_frac) as usize;
            let ch = chain(&heights, c, Direction::Up, 1.0);
            let mut e = Engine::from_chain(&ch).unwrap();
            let before = e.live_slopes();
            e.advance_to(x).unwrap();
            let snap = e.chain_at().unwrap();
            let total: f64 = snap.slopes.iter().map(Slope::length).sum();
            prop_assert_eq!(total, heights.len() as f64);
            prop_assert_eq!(before - snap.slopes.len(), 2 * e.merges() as usize);
            prop_assert!(snap.slopes.windows(2).all(|p| p[0].direction != p[1].direction));
        }

        #[test]
        fn merges_are_monotone_and_alternating(seed in 0u64..1000) {
            let mut e = Engine::synthetic(201, seed).unwrap();
            let mut last = e.level();
            let mut merges = e.merges();
            for x in [1.5, 2.0, 4.0, 8.0, 30.0] {
                e.advance_to(x).unwrap();
                prop_assert!(e.level() >= last);
                last = e.level();
                prop_assert!(e.merges() >= merges);
                merges = e.merges();
                let (h, _) = e.heights();
                prop_assert!(h.iter().all(|&y| y >= x));
            }
        }
    }
}
