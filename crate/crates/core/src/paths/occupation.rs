use serde::{Deserialize, Serialize};

use super::{KSet, PlanarPath, Point2};
use crate::bins::SpatialBins;
use crate::error::{precondition, Error, Result};

/// Shape whose scaled copy `x + εR` is measured.
#[derive(Debug, Clone, Copy)]
pub enum Region<'a> {
    Disc,
    KSet(&'a KSet),
}

impl Region<'_> {
    #[inline]
    pub fn contains(&self, p: Point2, center: Point2, eps: f64) -> bool {
        match self {
            Region::Disc => p.dist2(center) < eps * eps,
            Region::KSet(k) => k.contains_scaled(p, center, eps),
        }
    }

    /// `|K| / π`, the area of the region relative to the unit disc.
    pub fn relative_area(&self) -> f64 {
        match self {
            Region::Disc => 1.0,
            Region::KSet(k) => k.area() / std::f64::consts::PI,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OccupationQuery<'a> {
    pub center: Point2,
    pub eps: f64,
    pub region: Region<'a>,
}

/// Time spent by samples `0..=horizon` in `x + εR`, as `dt × count`.
pub fn occupation_measure(path: &PlanarPath, query: &OccupationQuery<'_>, horizon: usize) -> Result<f64> {
    if horizon >= path.len() {
        return Err(Error::OutOfRange(format!("horizon {horizon} past last sample {}", path.len() - 1)));
    }
    if !(query.eps > 0.0) {
        return Err(precondition(format!("scale must be positive, got {}", query.eps)));
    }
    let count = path.points()[..=horizon]
        .iter()
        .filter(|&&p| query.region.contains(p, query.center, query.eps))
        .count();
    Ok(count as f64 * path.dt())
}

/// Index of the first sample with `|W| >= r`.
pub fn exit_index(path: &PlanarPath, r: f64) -> Option<usize> {
    path.points().iter().position(|p| p.norm2() >= r * r)
}

/// A rectangular lattice of query centres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterGrid {
    /// Lower-left centre.
    pub origin: Point2,
    pub pitch: f64,
    pub nx: usize,
    pub ny: usize,
}

impl CenterGrid {
    /// Grid of pitch `pitch` covering the square `[-half, half]²`.
    pub fn square(half: f64, pitch: f64) -> Self {
        let n = (2.0 * half / pitch).floor() as usize + 1;
        Self { origin: Point2::new(-half, -half), pitch, nx: n, ny: n }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn centers(&self) -> Vec<Point2> {
        let mut out = Vec::with_capacity(self.len());
        for j in 0..self.ny {
            for i in 0..self.nx {
                out.push(Point2::new(
                    self.origin.x + i as f64 * self.pitch,
                    self.origin.y + j as f64 * self.pitch,
                ));
            }
        }
        out
    }
}

/// Normalized occupations `μ(x + εR) / (ε² (log 1/ε)² · |R|/π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationProfile {
    pub eps: Vec<f64>,
    pub centers: Vec<Point2>,
    /// `ratios[e][c]` for scale `eps[e]` and centre `centers[c]`.
    pub ratios: Vec<Vec<f64>>,
    /// Supremum over centres, per scale.
    pub sup: Vec<f64>,
}

/// Occupation profile of a whole path over a grid of centres.
///
/// Every scale must exceed both `2·sqrt(dt)` and the grid pitch, and be
/// below one so that `log 1/ε > 0`.
pub fn occupation_profile(
    path: &PlanarPath,
    grid: &CenterGrid,
    eps_list: &[f64],
    region: Region<'_>,
) -> Result<OccupationProfile> {
    let floor = (2.0 * path.dt().sqrt()).max(grid.pitch);
    let bad: Vec<f64> = eps_list.iter().copied().filter(|&e| !(e > floor && e < 1.0)).collect();
    if !bad.is_empty() {
        return Err(precondition(format!(
            "scales {bad:?} violate the resolution guard: need max(2·sqrt(dt), pitch) = {floor} < ε < 1"
        )));
    }
    let centers = grid.centers();
    let pts = path.points();
    let mut ratios = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let bins = SpatialBins::new(pts, eps);
        let norm = eps * eps * (1.0 / eps).ln().powi(2) * region.relative_area();
        let row: Vec<f64> = centers
            .iter()
            .map(|&c| {
                let mut count = 0usize;
                bins.for_each_near(c, eps, |i| {
                    if region.contains(pts[i], c, eps) {
                        count += 1;
                    }
                });
                count as f64 * path.dt() / norm
            })
            .collect();
        ratios.push(row);
    }
    let sup = ratios.iter().map(|r| r.iter().copied().fold(0.0, f64::max)).collect();
    Ok(OccupationProfile { eps: eps_list.to_vec(), centers, ratios, sup })
}
