use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::lattice::{LatticeDisc, LatticePoint};
use crate::paths::{PlanarPath, Point2};

/// Which crossings of an annulus are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExcursionMode {
    /// Arrivals at the inner circle, each after the path was last at the
    /// outer circle (or at the start).
    OuterToInner,
    /// Completed inner-to-outer traversals after touching the inner circle.
    RoundTrip,
}

/// Position of a sample relative to an annulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    Inner,
    Between,
    Outer,
}

/// Crossing state machine over a zone sequence.
#[derive(Debug, Clone, Copy)]
pub struct ExcursionCounter {
    mode: ExcursionMode,
    armed: bool,
    count: u64,
}

impl ExcursionCounter {
    pub fn new(mode: ExcursionMode) -> Self {
        let armed = matches!(mode, ExcursionMode::OuterToInner);
        Self { mode, armed, count: 0 }
    }

    #[inline]
    pub fn feed(&mut self, zone: Zone) {
        match (self.mode, zone) {
            (ExcursionMode::OuterToInner, Zone::Inner) if self.armed => {
                self.count += 1;
                self.armed = false;
            }
            (ExcursionMode::OuterToInner, Zone::Outer) => self.armed = true,
            (ExcursionMode::RoundTrip, Zone::Inner) => self.armed = true,
            (ExcursionMode::RoundTrip, Zone::Outer) if self.armed => {
                self.count += 1;
                self.armed = false;
            }
            _ => {}
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

pub fn count_zones(zones: impl IntoIterator<Item = Zone>, mode: ExcursionMode) -> u64 {
    let mut c = ExcursionCounter::new(mode);
    zones.into_iter().for_each(|z| c.feed(z));
    c.count()
}

#[inline]
pub(crate) fn continuum_zone(p: Point2, center: Point2, r2: f64, big_r2: f64) -> Zone {
    let d2 = p.dist2(center);
    if d2 <= r2 {
        Zone::Inner
    } else if d2 >= big_r2 {
        Zone::Outer
    } else {
        Zone::Between
    }
}

/// Excursions of a continuum path across the annulus `r < |W - z| < R`.
///
/// Inner means `|W - z| <= r`, outer means `|W - z| >= R`; crossings are
/// read off the samples with no interpolation.
pub fn excursion_count(path: &PlanarPath, center: Point2, r: f64, big_r: f64, mode: ExcursionMode) -> Result<u64> {
    if !(r > 0.0 && r < big_r) {
        return Err(precondition(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
    }
    let (r2, big_r2) = (r * r, big_r * big_r);
    Ok(count_zones(path.points().iter().map(|&p| continuum_zone(p, center, r2, big_r2)), mode))
}

/// Lattice zone: inner is `D_z(r) ∪ ∂D_z(r)` (any walk arriving from
/// outside first lands on `∂D_z(r)`), outer is the complement of `D_z(R)`.
pub struct LatticeAnnulus {
    inner: LatticeDisc,
    outer: LatticeDisc,
}

impl LatticeAnnulus {
    pub fn new(center: LatticePoint, r: f64, big_r: f64) -> Result<Self> {
        if !(r > 0.0 && r < big_r) {
            return Err(precondition(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
        }
        Ok(Self { inner: LatticeDisc::new(center, r), outer: LatticeDisc::new(center, big_r) })
    }

    #[inline]
    pub fn zone(&self, p: LatticePoint) -> Zone {
        if self.inner.contains(p) || self.inner.on_boundary(p) {
            Zone::Inner
        } else if !self.outer.contains(p) {
            Zone::Outer
        } else {
            Zone::Between
        }
    }
}

/// Excursions of a lattice path between `∂D_z(r)` and `∂D_z(R)`.
pub fn lattice_excursion_count(
    positions: impl IntoIterator<Item = LatticePoint>,
    center: LatticePoint,
    r: f64,
    big_r: f64,
    mode: ExcursionMode,
) -> Result<u64> {
    let ann = LatticeAnnulus::new(center, r, big_r)?;
    Ok(count_zones(positions.into_iter().map(|p| ann.zone(p)), mode))
}
