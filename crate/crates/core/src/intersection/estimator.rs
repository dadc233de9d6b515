use std::f64::consts::PI;

use super::KernelSpec;
use crate::bins::SpatialBins;
use crate::error::{precondition, Result};
use crate::paths::{PlanarPath, Point2};

fn check_guard(w: &PlanarPath, w2: &PlanarPath, kernel: &KernelSpec) -> Result<()> {
    let floor = 2.0 * w.dt().max(w2.dt()).sqrt();
    if !(kernel.scale >= floor) {
        return Err(precondition(format!(
            "kernel scale {} below resolution guard 2·sqrt(max dt) = {floor}",
            kernel.scale
        )));
    }
    Ok(())
}

/// `Σ_{s ∈ sel} Σ_t f_ε(W_s - W'_t)`, with each inner sum taken over `t`
/// in increasing order so the result matches a plain double loop bit for bit.
fn kernel_double_sum(
    w: &PlanarPath,
    w2: &PlanarPath,
    kernel: &KernelSpec,
    selected: impl Fn(Point2) -> bool,
) -> f64 {
    let bins = SpatialBins::new(w2.points(), kernel.scale);
    let other = w2.points();
    let mut near = Vec::new();
    let mut total = 0.0;
    for &p in w.points() {
        if !selected(p) {
            continue;
        }
        bins.near_sorted(p, kernel.scale, &mut near);
        let mut inner = 0.0;
        for &t in &near {
            inner += kernel.eval(p - other[t]);
        }
        total += inner;
    }
    total
}

/// Discretized projected intersection local time of `D(x, eps)`:
/// `π Σ_s Σ_t dt_W dt_W' 1{|W_s - x| < eps} f_ε(W_s - W'_t)`.
pub fn intersection_local_time_continuum(
    w: &PlanarPath,
    w2: &PlanarPath,
    x: Point2,
    eps: f64,
    kernel: &KernelSpec,
) -> Result<f64> {
    intersection_with_prefactor(w, w2, PI, x, eps, kernel)
}

/// Same double sum as [`intersection_local_time_continuum`] with prefactor
/// `π / Λ` (Brownian path against a stable path).
pub fn intersection_wx(
    w: &PlanarPath,
    x_path: &PlanarPath,
    lambda_norm: f64,
    x: Point2,
    eps: f64,
    kernel: &KernelSpec,
) -> Result<f64> {
    if !(lambda_norm > 0.0) {
        return Err(precondition(format!("Λ must be positive, got {lambda_norm}")));
    }
    intersection_with_prefactor(w, x_path, PI / lambda_norm, x, eps, kernel)
}

fn intersection_with_prefactor(
    w: &PlanarPath,
    w2: &PlanarPath,
    prefactor: f64,
    x: Point2,
    eps: f64,
    kernel: &KernelSpec,
) -> Result<f64> {
    check_guard(w, w2, kernel)?;
    if !(eps > 0.0) {
        return Err(precondition(format!("radius must be positive, got {eps}")));
    }
    let sum = kernel_double_sum(w, w2, kernel, |p| p.dist2(x) < eps * eps);
    Ok(prefactor * w.dt() * w2.dt() * sum)
}

/// Per-sample intersection weights `π dt dt' Σ_t f_ε(W_s - W'_t)`.
///
/// Summing the weights of the samples inside a set `A` gives the
/// discretized intersection local time of `A`; this lets many sets share
/// one pass over the kernel.
pub fn intersection_sample_weights(w: &PlanarPath, w2: &PlanarPath, kernel: &KernelSpec) -> Result<Vec<f64>> {
    check_guard(w, w2, kernel)?;
    let bins = SpatialBins::new(w2.points(), kernel.scale);
    let other = w2.points();
    let scale = PI * w.dt() * w2.dt();
    Ok(w
        .points()
        .iter()
        .map(|&p| {
            let mut inner = 0.0;
            bins.for_each_near(p, kernel.scale, |t| inner += kernel.eval(p - other[t]));
            scale * inner
        })
        .collect())
}
