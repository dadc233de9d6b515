//! Continuum kernels: disc Green's function, stable potential density,
//! the Nyström operator norm and Kac moment sums.

mod kac;
mod nystrom;

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::paths::Point2;

pub use kac::{intersection_first_moment_mc, kac_moment_continuum, moment_bound_curve, MeasureAtoms};
pub use nystrom::{lambda_beta, LambdaEstimate, NystromOperator};

/// Green's function of the disc `D(0, r)` for Brownian motion,
/// `(1/π) log(|r² - x ȳ| / (r |x - y|))`.
pub fn green_disc(r: f64, x: Point2, y: Point2) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("disc radius must be positive, got {r}")));
    }
    for p in [x, y] {
        if !(p.norm() < r) {
            return Err(Error::Domain(format!("point ({}, {}) is not inside D(0, {r})", p.x, p.y)));
        }
    }
    if x == y {
        return Err(Error::Singularity(format!("g_r(x, x) is infinite at ({}, {})", x.x, x.y)));
    }
    Ok(green_disc_unchecked(r, x, y))
}

/// Same formula without argument checks.
#[inline]
pub(crate) fn green_disc_unchecked(r: f64, x: Point2, y: Point2) -> f64 {
    // x * conj(y)
    let re = x.x * y.x + x.y * y.y;
    let im = x.y * y.x - x.x * y.y;
    let num = (r * r - re).hypot(-im);
    (num / (r * (x - y).norm())).ln() / PI
}

/// Regular part of the disc Green's function at `x = y`:
/// `(1/π) log((r² - |y|²) / r)`.
#[inline]
pub(crate) fn green_disc_regular_diag(r: f64, y: Point2) -> f64 {
    ((r * r - y.norm2()) / r).ln() / PI
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("stability index must lie in (0, 2), got {beta}")))
    }
}

/// `c_β = 2^{-β} π^{-1} Γ((2-β)/2) / Γ(β/2)`.
pub fn c_beta(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(2f64.powf(-beta) / PI * gamma((2.0 - beta) / 2.0) / gamma(beta / 2.0))
}

/// Zero-potential density `c_β |x|^{β-2}` of the planar symmetric
/// β-stable process.
pub fn stable_potential(beta: f64, x: Point2) -> Result<f64> {
    let c = c_beta(beta)?;
    let d = x.norm();
    if d == 0.0 {
        return Err(Error::Singularity("stable potential is infinite at 0".into()));
    }
    Ok(c * d.powf(beta - 2.0))
}
