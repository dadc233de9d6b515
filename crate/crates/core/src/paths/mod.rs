//! Time-discretized planar paths: Brownian motion, isotropic stable
//! processes, and occupation measures of discs and K-sets.

mod kset;
mod occupation;
mod sim;

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

pub use kset::{KSet, DEFAULT_CELL};
pub use occupation::{
    exit_index, occupation_measure, occupation_profile, CenterGrid, OccupationProfile, OccupationQuery, Region,
};
pub use sim::{sample_positive_stable, simulate_bm, simulate_bm_from, simulate_stable, Stop};

/// A point of the real plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist2(self, other: Point2) -> f64 {
        (self - other).norm2()
    }

    pub fn rotate(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: c * self.x - s * self.y, y: s * self.x + c * self.y }
    }

    pub fn polar(r: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: r * c, y: r * s }
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2 { x: self.x + o.x, y: self.y + o.y }
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2 { x: self.x - o.x, y: self.y - o.y }
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, c: f64) -> Point2 {
        Point2 { x: self.x * c, y: self.y * c }
    }
}

/// Generator that produced a [`PlanarPath`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PathKind {
    Brownian,
    Stable { beta: f64 },
    Injected,
}

/// Positions sampled every `dt` time units, starting at time 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarPath {
    dt: f64,
    points: Vec<Point2>,
    kind: PathKind,
}

impl PlanarPath {
    pub fn new(dt: f64, points: Vec<Point2>, kind: PathKind) -> crate::Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(crate::Error::Precondition(format!("dt must be positive, got {dt}")));
        }
        if points.is_empty() {
            return Err(crate::Error::Precondition("a path needs at least one point".into()));
        }
        Ok(Self { dt, points, kind })
    }

    pub fn injected(dt: f64, points: Vec<Point2>) -> crate::Result<Self> {
        Self::new(dt, points, PathKind::Injected)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn kind(&self) -> PathKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> Point2 {
        *self.points.last().expect("non-empty")
    }

    /// Time of the last sample.
    pub fn duration(&self) -> f64 {
        (self.points.len() - 1) as f64 * self.dt
    }

    /// Brownian scaling: positions times `c`, time step times `c²`.
    pub fn scaled(&self, c: f64) -> Self {
        Self { dt: self.dt * c * c, points: self.points.iter().map(|&p| p * c).collect(), kind: self.kind }
    }

    pub fn rotated(&self, angle: f64) -> Self {
        Self { dt: self.dt, points: self.points.iter().map(|p| p.rotate(angle)).collect(), kind: self.kind }
    }

    /// Prefix of the first `len` samples.
    pub fn truncated(&self, len: usize) -> Self {
        Self { dt: self.dt, points: self.points[..len.clamp(1, self.points.len())].to_vec(), kind: self.kind }
    }

    /// Per-step displacement vectors.
    pub fn increments(&self) -> impl Iterator<Item = Point2> + '_ {
        self.points.windows(2).map(|w| w[1] - w[0])
    }
}
