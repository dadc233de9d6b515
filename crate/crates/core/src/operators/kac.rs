use std::f64::consts::PI;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{green_disc_regular_diag, green_disc_unchecked};
use crate::error::{precondition, Error, Result};
use crate::lattice::Estimate;
use crate::paths::Point2;
use crate::rng::rng_from_seed;

/// A finite measure `Σ w_i δ_{y_i}`, optionally standing for cells of
/// side `cell` so that self-interactions can be regularized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureAtoms {
    atoms: Vec<(Point2, f64)>,
    cell: Option<f64>,
}

impl MeasureAtoms {
    pub fn new(atoms: Vec<(Point2, f64)>) -> Result<Self> {
        if let Some(&(p, w)) = atoms.iter().find(|(_, w)| !(w.is_finite() && *w >= 0.0)) {
            return Err(precondition(format!("atom at ({}, {}) has invalid weight {w}", p.x, p.y)));
        }
        Ok(Self { atoms, cell: None })
    }

    /// Atoms at cell centres of a grid of side `cell`.
    pub fn with_cell(atoms: Vec<(Point2, f64)>, cell: f64) -> Result<Self> {
        if !(cell > 0.0) {
            return Err(precondition(format!("cell side must be positive, got {cell}")));
        }
        Ok(Self { cell: Some(cell), ..Self::new(atoms)? })
    }

    /// Mass `mass` spread evenly over the cells of side `h` (grid aligned
    /// with `center`) whose centres lie in `D(center, radius)`.
    pub fn cell_uniform(center: Point2, radius: f64, h: f64, mass: f64) -> Result<Self> {
        if !(radius > 0.0 && h > 0.0 && h < radius) {
            return Err(precondition(format!("need 0 < h < radius, got h = {h}, radius = {radius}")));
        }
        let m = (radius / h).ceil() as i64;
        let mut pts = Vec::new();
        for i in -m..m {
            for j in -m..m {
                let off = Point2::new((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
                if off.norm2() < radius * radius {
                    pts.push(center + off);
                }
            }
        }
        let w = mass / pts.len() as f64;
        Self::with_cell(pts.into_iter().map(|p| (p, w)).collect(), h)
    }

    pub fn atoms(&self) -> &[(Point2, f64)] {
        &self.atoms
    }

    pub fn cell(&self) -> Option<f64> {
        self.cell
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    /// `max |y_i|`, or 0 for the empty measure.
    pub fn support_radius(&self) -> f64 {
        self.atoms.iter().map(|(p, _)| p.norm()).fold(0.0, f64::max)
    }
}

/// Continuum Kac moment `k! π^k Σ g(x0, y_1) w_1 g(y_1, y_2) w_2 ⋯ w_k`
/// over ordered atom sequences, for `k ≤ 3`.
///
/// Repeated atoms use the cell-averaged logarithm
/// `log(1/h_eq) + 1/2`, `h_eq = h/√π`, in place of the infinite diagonal.
pub fn kac_moment_continuum(rho: &MeasureAtoms, r: f64, x0: Point2, k: u32) -> Result<f64> {
    if !(1..=3).contains(&k) {
        return Err(precondition(format!("k must be 1, 2 or 3, got {k}")));
    }
    if !(r > 0.0) || !(x0.norm() < r) {
        return Err(Error::Domain(format!("start ({}, {}) is not inside D(0, {r})", x0.x, x0.y)));
    }
    if !(rho.support_radius() < r) {
        return Err(Error::Domain(format!("measure support reaches radius {} ≥ {r}", rho.support_radius())));
    }
    if rho.atoms.iter().any(|&(p, w)| p == x0 && w > 0.0) {
        return Err(Error::Singularity("an atom sits at the starting point".into()));
    }
    let diag_log = match (k, rho.cell) {
        (1, _) => 0.0,
        (_, Some(h)) => (PI.sqrt() / h).ln() + 0.5,
        (_, None) => {
            return Err(precondition("k ≥ 2 needs a cell side to regularize repeated atoms"));
        }
    };
    let atoms = &rho.atoms;
    let g = |a: Point2, b: Point2| {
        if a == b {
            diag_log / PI + green_disc_regular_diag(r, a)
        } else {
            green_disc_unchecked(r, a, b)
        }
    };
    let mut u = vec![1.0; atoms.len()];
    for _ in 1..k {
        u = atoms
            .par_iter()
            .map(|&(yi, _)| atoms.iter().zip(&u).map(|(&(yj, wj), &uj)| g(yi, yj) * wj * uj).sum())
            .collect();
    }
    let head: f64 = atoms.iter().zip(&u).map(|(&(y, w), &uj)| green_disc_unchecked(r, x0, y) * w * uj).sum();
    let fact = (1..=k).product::<u32>() as f64;
    Ok(fact * PI.powi(k as i32) * head)
}

/// Monte Carlo value of `π ∫_{D(0,r1)} g_r(x0, y) g_r(x0', y) dy` with
/// `|x0| = |x0'| = r1 ≤ r/2`.
pub fn intersection_first_moment_mc(
    r: f64,
    r1: f64,
    x0: Point2,
    x0p: Point2,
    samples: u64,
    seed: u64,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(precondition("samples must be at least 1"));
    }
    if !(r1 > 0.0 && r1 <= r / 2.0) {
        return Err(precondition(format!("need 0 < r1 ≤ r/2, got r1 = {r1}, r = {r}")));
    }
    for p in [x0, x0p] {
        if (p.norm() - r1).abs() > 1e-9 * r1 {
            return Err(precondition(format!("start ({}, {}) is not on the circle of radius {r1}", p.x, p.y)));
        }
    }
    let mut rng = rng_from_seed(seed);
    let scale = PI * PI * r1 * r1;
    let values: Vec<f64> = (0..samples)
        .map(|_| {
            let y = Point2::polar(r1 * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>());
            scale * green_disc_unchecked(r, x0, y) * green_disc_unchecked(r, x0p, y)
        })
        .collect();
    Ok(Estimate::from_samples(&values))
}

/// `(k!)² (log(r/r1) + c)^{2k}`.
pub fn moment_bound_curve(k: u32, r: f64, r1: f64, c: f64) -> Result<f64> {
    if k == 0 || !(r1 > 0.0 && r1 <= r / 2.0) || !(c >= 0.0) {
        return Err(precondition(format!("need k ≥ 1, 0 < r1 ≤ r/2, c ≥ 0; got k = {k}, r = {r}, r1 = {r1}, c = {c}")));
    }
    let fact: f64 = (1..=k).map(f64::from).product();
    Ok(fact * fact * ((r / r1).ln() + c).powi(2 * k as i32))
}
