use std::sync::Arc;

use rand::RngCore;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::{LatticeDisc, LatticePoint, UNIT_STEPS};
use crate::error::{precondition, Error, Result};
use crate::rng::{rng_from_seed, SimRng};

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Seeded,
    Injected(Arc<[LatticePoint]>),
}

/// A simple random walk on Z², regenerated on demand from its seed.
///
/// Positions are streamed rather than stored; every call to
/// [`positions`](WalkRun::positions) replays the identical sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkRun {
    pub seed: u64,
    pub steps: u64,
    pub start: LatticePoint,
    source: Source,
}

/// `steps` uniform nearest-neighbour steps from `start`.
pub fn simulate_srw(seed: u64, steps: u64, start: LatticePoint) -> WalkRun {
    WalkRun { seed, steps, start, source: Source::Seeded }
}

impl WalkRun {
    /// Wraps a fixed nearest-neighbour path (mainly for tests).
    pub fn injected(path: Vec<LatticePoint>) -> Result<Self> {
        let Some(&start) = path.first() else {
            return Err(precondition("injected path must contain at least one point"));
        };
        if let Some(i) = path.windows(2).position(|w| !w[0].is_adjacent(w[1])) {
            return Err(precondition(format!("positions {i} and {} are not lattice neighbours", i + 1)));
        }
        Ok(Self { seed: 0, steps: path.len() as u64 - 1, start, source: Source::Injected(path.into()) })
    }

    /// The `steps + 1` positions `X_0, ..., X_steps`.
    pub fn positions(&self) -> Positions {
        let inner = match &self.source {
            Source::Seeded => PositionsInner::Seeded(StepSource::new(self.seed)),
            Source::Injected(path) => PositionsInner::Injected(path.clone()),
        };
        Positions { inner, current: self.start, emitted: 0, total: self.steps + 1 }
    }
}

/// Two random bits per step, 32 steps per 64-bit draw.
#[derive(Debug, Clone)]
pub struct StepSource {
    rng: SimRng,
    bits: u64,
    left: u32,
}

impl StepSource {
    pub fn new(seed: u64) -> Self {
        Self::from_rng(rng_from_seed(seed))
    }

    pub fn from_rng(rng: SimRng) -> Self {
        Self { rng, bits: 0, left: 0 }
    }

    #[inline]
    pub fn next_step(&mut self) -> LatticePoint {
        if self.left == 0 {
            self.bits = self.rng.next_u64();
            self.left = 32;
        }
        let dir = (self.bits & 3) as usize;
        self.bits >>= 2;
        self.left -= 1;
        UNIT_STEPS[dir]
    }
}

#[derive(Debug, Clone)]
enum PositionsInner {
    Seeded(StepSource),
    Injected(Arc<[LatticePoint]>),
}

/// Iterator over the positions of a [`WalkRun`].
#[derive(Debug, Clone)]
pub struct Positions {
    inner: PositionsInner,
    current: LatticePoint,
    emitted: u64,
    total: u64,
}

impl Iterator for Positions {
    type Item = LatticePoint;

    #[inline]
    fn next(&mut self) -> Option<LatticePoint> {
        if self.emitted >= self.total {
            return None;
        }
        let out = match &mut self.inner {
            PositionsInner::Injected(path) => path[self.emitted as usize],
            PositionsInner::Seeded(steps) => {
                if self.emitted > 0 {
                    self.current = self.current.offset(steps.next_step());
                }
                self.current
            }
        };
        self.emitted += 1;
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.emitted) as usize;
        (left, Some(left))
    }
}

/// Visit counts `L_n(x) = #{ 0 <= i <= n : X_i = x }` of one walk.
#[derive(Debug, Clone, Default)]
pub struct LocalTimeField {
    counts: FxHashMap<u64, u32>,
    total_steps: u64,
    max: u32,
}

impl LocalTimeField {
    /// Field of the zero-step walk sitting at `start`.
    pub fn starting_at(start: LatticePoint) -> Self {
        let mut counts = FxHashMap::default();
        counts.insert(start.pack(), 1);
        Self { counts, total_steps: 0, max: 1 }
    }

    /// Extends the walk by one step landing on `p`.
    #[inline]
    pub fn visit(&mut self, p: LatticePoint) {
        let c = self.counts.entry(p.pack()).or_insert(0);
        *c += 1;
        self.max = self.max.max(*c);
        self.total_steps += 1;
    }

    pub fn from_positions(mut positions: impl Iterator<Item = LatticePoint>) -> Option<Self> {
        let mut field = Self::starting_at(positions.next()?);
        let (lo, _) = positions.size_hint();
        field.counts.reserve(lo / 8);
        for p in positions {
            field.visit(p);
        }
        Some(field)
    }

    pub fn get(&self, p: LatticePoint) -> u32 {
        self.counts.get(&p.pack()).copied().unwrap_or(0)
    }

    /// The horizon `n`; counts sum to `n + 1`.
    pub fn total_steps(&self) -> u64 {
        self.total_steps
    }

    /// Number of distinct visited points.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `max_x L_n(x)`.
    pub fn max_count(&self) -> u32 {
        self.max
    }

    pub fn iter(&self) -> impl Iterator<Item = (LatticePoint, u32)> + '_ {
        self.counts.iter().map(|(&k, &c)| (LatticePoint::unpack(k), c))
    }

    pub(crate) fn raw(&self) -> &FxHashMap<u64, u32> {
        &self.counts
    }
}

/// Local times of `run` up to step `n`.
pub fn local_time_field(run: &WalkRun, n: u64) -> Result<LocalTimeField> {
    if n > run.steps {
        return Err(Error::OutOfRange(format!("horizon {n} exceeds walk length {}", run.steps)));
    }
    Ok(LocalTimeField::from_positions(run.positions().take(n as usize + 1))
        .expect("a walk has at least one position"))
}

/// Outcome of running a walk until it leaves a disc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExitRecord {
    /// First index whose position lies outside the disc.
    pub exit_step: u64,
    /// Visits to the origin at indices `0..exit_step`.
    pub visits_to_origin: u64,
    pub exit_point: LatticePoint,
}

/// Runs a seeded walk from `start` until its first position outside `D_0(radius)`.
pub fn run_until_exit(seed: u64, radius: f64, start: LatticePoint) -> Result<ExitRecord> {
    let disc = LatticeDisc::centered(radius);
    if !disc.contains(start) {
        return Err(precondition(format!("start {start:?} is not inside D_0({radius})")));
    }
    let mut steps = StepSource::new(seed);
    Ok(exit_from(&mut steps, radius, start))
}

pub(crate) fn exit_from(steps: &mut StepSource, radius: f64, start: LatticePoint) -> ExitRecord {
    let r2 = radius * radius;
    let mut p = start;
    let mut index = 0u64;
    let mut visits = 0u64;
    while (p.norm2() as f64) < r2 {
        if p == LatticePoint::ORIGIN {
            visits += 1;
        }
        p = p.offset(steps.next_step());
        index += 1;
    }
    ExitRecord { exit_step: index, visits_to_origin: visits, exit_point: p }
}
