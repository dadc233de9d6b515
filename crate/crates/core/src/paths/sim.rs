use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::{PathKind, PlanarPath, Point2};
use crate::error::{precondition, Result};
use crate::rng::{rng_from_seed, SimRng};

/// When a simulated path stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// At the first sample with `|W| >= r` (overshoot kept).
    ExitRadius(f64),
    /// After `floor(T/dt)` steps.
    FixedTime(f64),
}

fn step_count(t: f64, dt: f64) -> usize {
    // Guard against T/dt landing a hair below an integer.
    ((t / dt) * (1.0 + 1e-12)).floor() as usize
}

/// Planar Brownian motion from the origin.
pub fn simulate_bm(seed: u64, dt: f64, stop: Stop) -> Result<PlanarPath> {
    simulate_bm_from(seed, dt, Point2::ORIGIN, stop)
}

/// Planar Brownian motion from `start`; each coordinate increment is
/// `N(0, dt)`.
pub fn simulate_bm_from(seed: u64, dt: f64, start: Point2, stop: Stop) -> Result<PlanarPath> {
    if !(dt > 0.0) {
        return Err(precondition(format!("dt must be positive, got {dt}")));
    }
    let mut rng = rng_from_seed(seed);
    let sd = dt.sqrt();
    let mut p = start;
    let mut points = vec![p];
    match stop {
        Stop::FixedTime(t) => {
            if !(t > 0.0) {
                return Err(precondition(format!("horizon must be positive, got {t}")));
            }
            let n = step_count(t, dt);
            points.reserve_exact(n);
            for _ in 0..n {
                p = p + gaussian_pair(&mut rng) * sd;
                points.push(p);
            }
        }
        Stop::ExitRadius(r) => {
            if !(r > 0.0) {
                return Err(precondition(format!("exit radius must be positive, got {r}")));
            }
            let r2 = r * r;
            while p.norm2() < r2 {
                p = p + gaussian_pair(&mut rng) * sd;
                points.push(p);
            }
        }
    }
    PlanarPath::new(dt, points, PathKind::Brownian)
}

#[inline]
fn gaussian_pair(rng: &mut SimRng) -> Point2 {
    Point2::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// One-sided stable variable with `E exp(-λS) = exp(-λ^α)`, `0 < α < 1`.
///
/// Kanter's representation of the Chambers–Mallows–Stuck sampler:
/// `S = sin(αU)/sin(U)^{1/α} · (sin((1-α)U)/E)^{(1-α)/α}` with `U` uniform
/// on `(0, π)` and `E` standard exponential.
pub fn sample_positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    debug_assert!(alpha > 0.0 && alpha < 1.0);
    let u = PI * rng.random::<f64>();
    let e: f64 = Exp1.sample(rng);
    let a = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
    let b = (((1.0 - alpha) * u).sin() / e).powf((1.0 - alpha) / alpha);
    a * b
}

/// Isotropic β-stable process from the origin with `E exp(i⟨ξ, X_t⟩) = exp(-t|ξ|^β)`.
///
/// Each step subordinates a Gaussian: with `S` a β/2-stable subordinator
/// increment over `dt` (so `S = dt^{2/β} S_1`), the displacement is
/// `sqrt(2S)·N(0, I)`. Under this normalization the 0-potential density is
/// `c_β |x|^{β-2}` with `c_β = 2^{-β} π^{-1} Γ((2-β)/2) / Γ(β/2)`.
pub fn simulate_stable(seed: u64, beta: f64, dt: f64, horizon: f64) -> Result<PlanarPath> {
    if !(beta > 0.0 && beta < 2.0) {
        return Err(precondition(format!("stability index must lie in (0, 2), got {beta}")));
    }
    if !(dt > 0.0 && horizon > 0.0) {
        return Err(precondition(format!("need dt > 0 and T > 0, got dt = {dt}, T = {horizon}")));
    }
    let mut rng = rng_from_seed(seed);
    let alpha = beta / 2.0;
    let time_scale = 2.0 * dt.powf(1.0 / alpha);
    let n = step_count(horizon, dt);
    let mut p = Point2::ORIGIN;
    let mut points = Vec::with_capacity(n + 1);
    points.push(p);
    for _ in 0..n {
        let s = sample_positive_stable(alpha, &mut rng);
        p = p + gaussian_pair(&mut rng) * (time_scale * s).sqrt();
        points.push(p);
    }
    PlanarPath::new(dt, points, PathKind::Stable { beta })
}
