//! Closed-form limit constants and exponent laws for thick points.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn domain(msg: String) -> Error {
    Error::Domain(msg)
}

/// `lim T_n^{X,X'} / (log n)⁴ = 1/(4π²)`.
pub fn pair_max_constant() -> f64 {
    1.0 / (4.0 * PI * PI)
}

/// Growth exponent `1 - 2πb` of `#{x : L L' >= b² (log n)⁴}`, for `0 < b < 1/(2π)`.
pub fn pair_count_exponent(b: f64) -> Result<f64> {
    if !(b > 0.0 && b < 1.0 / (2.0 * PI)) {
        return Err(domain(format!("pair thick points need 0 < b < 1/(2π), got b = {b}")));
    }
    Ok(1.0 - 2.0 * PI * b)
}

/// `lim T_n / (log n)² = 1/π` for a single walk.
pub fn single_max_constant() -> f64 {
    1.0 / PI
}

/// Growth exponent `1 - πa` of `#{x : L_n(x) >= a (log n)²}`, for `0 < a < 1/π`.
pub fn single_count_exponent(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0 / PI) {
        return Err(domain(format!("single-walk thick points need 0 < a < 1/π, got a = {a}")));
    }
    Ok(1.0 - PI * a)
}

/// `lim sup_x μ(D(x,ε)) / (ε² (log ε)²) = 2`.
pub fn disc_occupation_sup() -> f64 {
    2.0
}

/// `2|K|/π`, the K-set analogue of [`disc_occupation_sup`].
///
/// Areas slightly above `π` are accepted: a raster of the whole disc can
/// overshoot by a boundary layer of cells.
pub fn kset_occupation_sup(area: f64) -> Result<f64> {
    if !(area > 0.0 && area <= PI * (1.0 + 1e-2)) {
        return Err(domain(format!("K must have area in (0, π], got {area}")));
    }
    Ok(2.0 * area / PI)
}

/// Dimension `2 - aπ/|K|` of K-thick points, for `0 < a <= 2|K|/π`.
pub fn kset_thick_dimension(a: f64, area: f64) -> Result<f64> {
    let top = kset_occupation_sup(area)?;
    if !(a > 0.0 && a <= top) {
        return Err(domain(format!("K-thick points need 0 < a <= 2|K|/π = {top}, got a = {a}")));
    }
    Ok(2.0 - a * PI / area)
}

/// `lim sup_x I(D(x,ε)) / (ε² (log 1/ε)⁴) = 1` for two Brownian paths.
pub fn intersection_sup_constant() -> f64 {
    1.0
}

/// Dimension `2 - 2a` of intersection thick points at level `a²`, `0 < a <= 1`.
pub fn intersection_thick_dimension(a: f64) -> Result<f64> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(domain(format!("intersection thick points need 0 < a <= 1, got a = {a}")));
    }
    Ok(2.0 - 2.0 * a)
}

/// Coarse Lebesgue spectrum limit `2a`, for `0 < a < 1`.
pub fn coarse_spectrum_exponent(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return Err(domain(format!("coarse spectrum needs 0 < a < 1, got a = {a}")));
    }
    Ok(2.0 * a)
}

/// `β²/4`, the sup constant for Brownian/stable intersections at scale
/// `ε^β (log 1/ε)³`.
pub fn stable_sup_constant(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    Ok(beta * beta / 4.0)
}

/// Dimension `β - 2a` of Brownian/stable thick points, `0 < a <= β/2`.
pub fn stable_thick_dimension(beta: f64, a: f64) -> Result<f64> {
    check_beta(beta)?;
    if !(a > 0.0 && a <= beta / 2.0) {
        return Err(domain(format!("stable thick points need 0 < a <= β/2 = {}, got a = {a}", beta / 2.0)));
    }
    Ok(beta - 2.0 * a)
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 2.0 {
        Ok(())
    } else {
        Err(domain(format!("stability index must lie in (0, 2), got {beta}")))
    }
}

/// `(2/m)^m`, the sup constant of the `m`-fold intersection local time.
pub fn mfold_sup_constant(m: u32) -> Result<f64> {
    if m == 0 {
        return Err(domain("m-fold intersections need m >= 1".into()));
    }
    Ok((2.0 / f64::from(m)).powi(m as i32))
}

/// Dimension `2 - ma` of `m`-fold thick points at level `a^m`, `0 < a <= 2/m`.
pub fn mfold_thick_dimension(m: u32, a: f64) -> Result<f64> {
    mfold_sup_constant(m)?;
    let top = 2.0 / f64::from(m);
    if !(a > 0.0 && a <= top) {
        return Err(domain(format!("m-fold thick points need 0 < a <= 2/m = {top}, got a = {a}")));
    }
    Ok(2.0 - f64::from(m) * a)
}

/// A named theory law, evaluated at a curve's sweep parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum TheoryLaw {
    /// `1 - 2πb` as a function of `b`.
    PairCountExponent,
    /// `1 - πa` as a function of `a`.
    SingleCountExponent,
    /// `2 - 2a` as a function of `a`.
    IntersectionThickDimension,
    /// `2 - aπ/|K|` as a function of `a`.
    KSetThickDimension { area: f64 },
    /// `β - 2a` as a function of `a`.
    StableThickDimension { beta: f64 },
    /// `2 - ma` as a function of `a`.
    MFoldThickDimension { m: u32 },
    /// A value that does not depend on the sweep parameter.
    Constant { name: String, value: f64 },
}

impl TheoryLaw {
    pub fn name(&self) -> &str {
        match self {
            TheoryLaw::PairCountExponent => "1 - 2*pi*b",
            TheoryLaw::SingleCountExponent => "1 - pi*a",
            TheoryLaw::IntersectionThickDimension => "2 - 2a",
            TheoryLaw::KSetThickDimension { .. } => "2 - a*pi/|K|",
            TheoryLaw::StableThickDimension { .. } => "beta - 2a",
            TheoryLaw::MFoldThickDimension { .. } => "2 - m*a",
            TheoryLaw::Constant { name, .. } => name.as_str(),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match *self {
            TheoryLaw::PairCountExponent => pair_count_exponent(x),
            TheoryLaw::SingleCountExponent => single_count_exponent(x),
            TheoryLaw::IntersectionThickDimension => intersection_thick_dimension(x),
            TheoryLaw::KSetThickDimension { area } => kset_thick_dimension(x, area),
            TheoryLaw::StableThickDimension { beta } => stable_thick_dimension(beta, x),
            TheoryLaw::MFoldThickDimension { m } => mfold_thick_dimension(m, x),
            TheoryLaw::Constant { value, .. } => Ok(value),
        }
    }
}

/// Every constant of the theory, keyed by name, for report headers.
pub fn theory_constants() -> Vec<(&'static str, f64)> {
    vec![
        ("pair_max_constant", pair_max_constant()),
        ("single_max_constant", single_max_constant()),
        ("disc_occupation_sup", disc_occupation_sup()),
        ("intersection_sup_constant", intersection_sup_constant()),
    ]
}
