//! Deterministic tuple streams for the auditors.
//!
//! Every strategy is prefix-stable: the i-th tuple depends on the seed,
//! strategy, domain and arity but never on `count`, so a run with a larger
//! count evaluates a superset of the tuples of a smaller one.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CsError, Result};
use crate::spaces::PointDomain;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_COUNT: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Seeded uniform draws.
    UniformRandom,
    /// Nested dyadic grid on intervals, shell-ordered enumeration on discrete
    /// domains (exhaustive once the count covers the whole product).
    StratifiedGrid,
    /// Grid and uniform tuples interleaved, grid first.
    #[default]
    GridPlusRandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub count: usize,
    pub strategy: Strategy,
    /// Tuples evaluated before the generated ones, e.g. a known witness.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pinned: Vec<Vec<f64>>,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: DEFAULT_SEED,
            count: DEFAULT_COUNT,
            strategy: Strategy::default(),
            pinned: Vec::new(),
        }
    }
}

impl SampleConfig {
    pub fn new(seed: u64, count: usize, strategy: Strategy) -> Self {
        SampleConfig {
            seed,
            count,
            strategy,
            pinned: Vec::new(),
        }
    }

    /// Only the given tuples, nothing generated.
    pub fn explicit(tuples: Vec<Vec<f64>>) -> Self {
        SampleConfig {
            seed: DEFAULT_SEED,
            count: 0,
            strategy: Strategy::default(),
            pinned: tuples,
        }
    }

    pub fn with_pinned(mut self, tuple: Vec<f64>) -> Self {
        self.pinned.push(tuple);
        self
    }

    /// The tuple stream over `domain^arity`. Pinned tuples must have the
    /// right arity and lie in the domain.
    pub fn tuples<'a>(
        &'a self,
        domain: &'a PointDomain,
        arity: usize,
    ) -> Result<Box<dyn Iterator<Item = Vec<f64>> + 'a>> {
        if self.count == 0 && self.pinned.is_empty() {
            return Err(CsError::Config(
                "empty sample: count is 0 and no pinned tuples".into(),
            ));
        }
        for t in &self.pinned {
            if t.len() != arity {
                return Err(CsError::Config(format!(
                    "pinned tuple {t:?} has arity {}, expected {arity}",
                    t.len()
                )));
            }
            for &x in t {
                domain.check(x)?;
            }
        }
        let generated = stream(domain, arity, self.strategy, self.seed).take(self.count);
        Ok(Box::new(self.pinned.iter().cloned().chain(generated)))
    }
}

/// Unbounded tuple stream (finite only for an exhausted discrete grid).
pub fn stream(
    domain: &PointDomain,
    arity: usize,
    strategy: Strategy,
    seed: u64,
) -> Box<dyn Iterator<Item = Vec<f64>> + '_> {
    match strategy {
        Strategy::UniformRandom => Box::new(RandomTuples::new(domain, arity, seed)),
        Strategy::StratifiedGrid => grid(domain, arity),
        Strategy::GridPlusRandom => Box::new(Interleave {
            grid: grid(domain, arity),
            random: RandomTuples::new(domain, arity, seed),
            grid_turn: true,
            grid_done: false,
        }),
    }
}

fn grid(domain: &PointDomain, arity: usize) -> Box<dyn Iterator<Item = Vec<f64>> + '_> {
    match domain {
        PointDomain::RealInterval { lo, hi } => Box::new(DyadicGrid::new(*lo, *hi, arity)),
        _ => Box::new(ShellGrid::new(
            domain.discrete_points().unwrap_or_default(),
            arity,
        )),
    }
}

struct RandomTuples {
    rng: ChaCha8Rng,
    arity: usize,
    kind: Draw,
}

enum Draw {
    Interval(f64, f64),
    Points(Vec<f64>),
}

impl RandomTuples {
    fn new(domain: &PointDomain, arity: usize, seed: u64) -> Self {
        let kind = match domain {
            PointDomain::RealInterval { lo, hi } => Draw::Interval(*lo, *hi),
            _ => Draw::Points(domain.discrete_points().unwrap_or_default()),
        };
        RandomTuples {
            rng: ChaCha8Rng::seed_from_u64(seed),
            arity,
            kind,
        }
    }
}

impl Iterator for RandomTuples {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let rng = &mut self.rng;
        let t = match &self.kind {
            Draw::Interval(lo, hi) => (0..self.arity)
                .map(|_| (lo + (hi - lo) * rng.gen::<f64>()).min(*hi))
                .collect(),
            Draw::Points(p) if p.is_empty() => return None,
            Draw::Points(p) => (0..self.arity)
                .map(|_| p[rng.gen_range(0..p.len())])
                .collect(),
        };
        Some(t)
    }
}

/// Odometer over `{0, ..., base - 1}^arity`, lexicographic.
fn advance(idx: &mut [usize], base: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < base {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Level L holds the points lo + (hi - lo)·i/2^L; each level emits only the
/// tuples not already emitted by a coarser level.
struct DyadicGrid {
    lo: f64,
    hi: f64,
    level: u32,
    idx: Vec<usize>,
    fresh: bool,
}

impl DyadicGrid {
    const MAX_LEVEL: u32 = 52;

    fn new(lo: f64, hi: f64, arity: usize) -> Self {
        DyadicGrid {
            lo,
            hi,
            level: 0,
            idx: vec![0; arity],
            fresh: true,
        }
    }

    fn point(&self, i: usize) -> f64 {
        let n = (1u64 << self.level) as f64;
        if i as f64 == n {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * (i as f64 / n)
        }
    }
}

impl Iterator for DyadicGrid {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        loop {
            if !self.fresh {
                let base = (1usize << self.level) + 1;
                if !advance(&mut self.idx, base) {
                    if self.level == Self::MAX_LEVEL {
                        return None;
                    }
                    self.level += 1;
                }
            }
            self.fresh = false;
            if self.level == 0 || self.idx.iter().any(|i| i % 2 == 1) {
                return Some(self.idx.iter().map(|&i| self.point(i)).collect());
            }
        }
    }
}

/// Enumerates `points^arity` shell by shell: all tuples whose largest index
/// is s, for s = 0, 1, ... so every prefix ending a shell is a full sub-cube.
struct ShellGrid {
    points: Vec<f64>,
    shell: usize,
    idx: Vec<usize>,
    fresh: bool,
}

impl ShellGrid {
    fn new(points: Vec<f64>, arity: usize) -> Self {
        ShellGrid {
            points,
            shell: 0,
            idx: vec![0; arity],
            fresh: true,
        }
    }
}

impl Iterator for ShellGrid {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        loop {
            if self.shell >= self.points.len() {
                return None;
            }
            if !self.fresh && !advance(&mut self.idx, self.shell + 1) {
                self.shell += 1;
                self.idx.iter_mut().for_each(|i| *i = 0);
                self.fresh = true;
                continue;
            }
            self.fresh = false;
            if self.idx.contains(&self.shell) || self.idx.is_empty() {
                return Some(self.idx.iter().map(|&i| self.points[i]).collect());
            }
        }
    }
}

struct Interleave<'a> {
    grid: Box<dyn Iterator<Item = Vec<f64>> + 'a>,
    random: RandomTuples,
    grid_turn: bool,
    grid_done: bool,
}

impl Iterator for Interleave<'_> {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        let take_grid = self.grid_turn && !self.grid_done;
        self.grid_turn = !self.grid_turn;
        if take_grid {
            match self.grid.next() {
                Some(t) => return Some(t),
                None => self.grid_done = true,
            }
        }
        self.random.next()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn collect(cfg: &SampleConfig, d: &PointDomain, arity: usize) -> Vec<Vec<f64>> {
        cfg.tuples(d, arity).unwrap().collect()
    }

    #[test]
    fn dyadic_levels() {
        let d = PointDomain::interval(0.0, 1.0).unwrap();
        let cfg = SampleConfig::new(1, 5, Strategy::StratifiedGrid);
        let got: Vec<f64> = collect(&cfg, &d, 1).into_iter().map(|t| t[0]).collect();
        assert_eq!(got, vec![0.0, 1.0, 0.5, 0.25, 0.75]);
        let cfg = SampleConfig::new(1, 9, Strategy::StratifiedGrid);
        let pairs = collect(&cfg, &d, 2);
        assert_eq!(
            pairs[..4],
            [
                vec![0.0, 0.0],
                vec![0.0, 1.0],
                vec![1.0, 0.0],
                vec![1.0, 1.0]
            ]
        );
        assert_eq!(pairs[4], vec![0.0, 0.5]);
    }

    #[test]
    fn shell_grid_is_exhaustive() {
        let d = PointDomain::naturals(4).unwrap();
        let cfg = SampleConfig::new(1, 1_000, Strategy::StratifiedGrid);
        let mut all = collect(&cfg, &d, 3);
        assert_eq!(all.len(), 125);
        // shell prefix: first 8 tuples are {0,1}^3
        assert!(all[..8].iter().all(|t| t.iter().all(|&x| x <= 1.0)));
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        all.dedup();
        assert_eq!(all.len(), 125);
    }

    #[test]
    fn grid_plus_random_interleaves() {
        let d = PointDomain::interval(1.0, 100.0).unwrap();
        let cfg = SampleConfig::new(9, 6, Strategy::GridPlusRandom);
        let t = collect(&cfg, &d, 1);
        assert_eq!(t[0], vec![1.0]);
        assert_eq!(t[2], vec![100.0]);
        assert_eq!(t[4], vec![50.5]);
        assert!(t.iter().all(|x| d.contains(x[0])));
    }

    #[test]
    fn pinned_first_and_validated() {
        let d = PointDomain::interval(1.0, 100.0).unwrap();
        let cfg = SampleConfig::new(3, 2, Strategy::UniformRandom).with_pinned(vec![4.0, 5.0]);
        let t = collect(&cfg, &d, 2);
        assert_eq!(t.len(), 3);
        assert_eq!(t[0], vec![4.0, 5.0]);
        let bad = SampleConfig::explicit(vec![vec![0.5, 5.0]]);
        assert!(bad.tuples(&d, 2).is_err());
        let wrong_arity = SampleConfig::explicit(vec![vec![4.0]]);
        assert!(wrong_arity.tuples(&d, 2).is_err());
        let empty = SampleConfig::new(3, 0, Strategy::UniformRandom);
        assert!(matches!(empty.tuples(&d, 2), Err(CsError::Config(_))));
    }

    #[test]
    fn seeds_differ() {
        let d = PointDomain::interval(0.0, 1.0).unwrap();
        let a = collect(&SampleConfig::new(1, 10, Strategy::UniformRandom), &d, 2);
        let b = collect(&SampleConfig::new(2, 10, Strategy::UniformRandom), &d, 2);
        assert_ne!(a, b);
    }
}
