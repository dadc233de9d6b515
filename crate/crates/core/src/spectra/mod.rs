//! Thick-point counts, maxima, log-log exponent fits and the coarse
//! Lebesgue spectrum.

pub mod theory;

use serde::{Deserialize, Serialize};

use crate::bins::SpatialBins;
use crate::error::{precondition, Result};
use crate::intersection::{intersection_sample_weights, KernelSpec, ProductField};
use crate::lattice::LocalTimeField;
use crate::paths::{PlanarPath, Point2};

pub use theory::TheoryLaw;

/// Count `M` of points at or above a threshold, and the maximum `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThickCount {
    pub n: u64,
    pub param: f64,
    pub threshold_value: f64,
    pub count: u64,
    pub max_product: u128,
}

fn log_horizon(n: u64) -> Result<f64> {
    if n < 2 {
        return Err(precondition(format!("horizon must be at least 2 so that log n > 0, got {n}")));
    }
    Ok((n as f64).ln())
}

fn check_param(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(precondition(format!("{name} must be positive, got {v}")))
    }
}

/// `M = #{x : product >= threshold}`; inclusive.
pub fn count_at_threshold(pf: &ProductField, threshold: f64) -> (u64, u128) {
    let count = pf.products().iter().filter(|&&v| v as f64 >= threshold).count() as u64;
    (count, pf.max_product())
}

/// Pair thick points at level `b² (log n)⁴`.
pub fn count_thick_points(pf: &ProductField, b: f64) -> Result<ThickCount> {
    let ln = log_horizon(pf.horizon())?;
    check_param("b", b)?;
    let threshold_value = b * b * ln.powi(4);
    let (count, max_product) = count_at_threshold(pf, threshold_value);
    Ok(ThickCount { n: pf.horizon(), param: b, threshold_value, count, max_product })
}

/// Single-walk thick points at level `a (log n)²`.
pub fn single_walk_thick(field: &LocalTimeField, a: f64) -> Result<ThickCount> {
    let ln = log_horizon(field.total_steps())?;
    check_param("a", a)?;
    let threshold_value = a * ln * ln;
    let count = field.iter().filter(|&(_, c)| f64::from(c) >= threshold_value).count() as u64;
    Ok(ThickCount {
        n: field.total_steps(),
        param: a,
        threshold_value,
        count,
        max_product: u128::from(field.max_count()),
    })
}

/// Least-squares fit of `log M` against `log n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: Option<f64>,
    pub stderr: Option<f64>,
    pub intercept: Option<f64>,
    /// Horizons that entered the regression.
    pub used: Vec<f64>,
    /// Horizons dropped because some count was zero.
    pub excluded: Vec<f64>,
    pub diagnostic: Option<String>,
}

/// OLS slope and standard error of `ys` on `xs`.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = if xs.len() > 2 { (ssr / (k - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, stderr, intercept)
}

/// Slope of `log M_n` against `log n` for one series of `(n, M_n)`.
pub fn exponent_estimate(series: &[(f64, f64)]) -> Result<ExponentFit> {
    let replicas: Vec<Vec<(f64, f64)>> = vec![series.to_vec()];
    exponent_estimate_replicas(&replicas)
}

/// As [`exponent_estimate`], averaging per-`n` log-counts over replicas
/// before the fit. Zero counts are left out of the average and tallied in
/// the diagnostic; a horizon where every replica has `M_n = 0` is excluded
/// and listed in `excluded`.
pub fn exponent_estimate_replicas(replicas: &[Vec<(f64, f64)>]) -> Result<ExponentFit> {
    let first = replicas.first().ok_or_else(|| precondition("no replicas"))?;
    let mut ns: Vec<f64> = first.iter().map(|&(n, _)| n).collect();
    ns.sort_by(f64::total_cmp);
    ns.dedup();
    if ns.len() < 3 {
        return Err(precondition(format!("need at least 3 distinct n values, got {}", ns.len())));
    }
    if let Some(bad) = ns.iter().find(|&&n| !(n > 1.0)) {
        return Err(precondition(format!("n values must exceed 1, got {bad}")));
    }
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    let mut ys = Vec::new();
    let mut zeros = 0usize;
    for &n in &ns {
        let mut sum = 0.0;
        let mut k = 0usize;
        for rep in replicas {
            for &(_, m) in rep.iter().filter(|&&(rn, _)| rn == n) {
                if m <= 0.0 {
                    zeros += 1;
                } else {
                    sum += m.ln();
                    k += 1;
                }
            }
        }
        if k == 0 {
            excluded.push(n);
        } else {
            used.push(n);
            ys.push(sum / k as f64);
        }
    }
    if used.len() < 3 {
        let diagnostic = if used.is_empty() {
            "slope undefined: every M_n is zero".to_string()
        } else {
            format!("slope undefined: only {} horizons with nonzero counts", used.len())
        };
        return Ok(ExponentFit {
            slope: None,
            stderr: None,
            intercept: None,
            used,
            excluded,
            diagnostic: Some(diagnostic),
        });
    }
    let xs: Vec<f64> = used.iter().map(|n| n.ln()).collect();
    let (slope, stderr, intercept) = ols(&xs, &ys);
    let diagnostic = (zeros > 0).then(|| {
        format!("{zeros} zero counts left out of the log averages; {} horizons excluded", excluded.len())
    });
    Ok(ExponentFit { slope: Some(slope), stderr: Some(stderr), intercept: Some(intercept), used, excluded, diagnostic })
}

/// One estimate on a spectrum curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub param: f64,
    pub exponent: f64,
    pub stderr: f64,
    pub replicas: u64,
}

/// Estimated exponents against a sweep parameter, with the law they
/// should approach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumCurve {
    pub label: String,
    pub param_name: String,
    pub points: Vec<SpectrumPoint>,
    pub predicted: TheoryLaw,
}

impl SpectrumCurve {
    pub fn new(label: impl Into<String>, param_name: impl Into<String>, predicted: TheoryLaw) -> Self {
        Self { label: label.into(), param_name: param_name.into(), points: Vec::new(), predicted }
    }

    /// Adds a point; non-finite exponents and negative errors are rejected.
    pub fn push(&mut self, point: SpectrumPoint) -> Result<()> {
        if !point.exponent.is_finite() || !(point.stderr >= 0.0) {
            return Err(precondition(format!(
                "spectrum point needs a finite exponent and stderr >= 0, got {} ± {}",
                point.exponent, point.stderr
            )));
        }
        self.points.push(point);
        Ok(())
    }

    pub fn predicted_at(&self, param: f64) -> Option<f64> {
        self.predicted.eval(param).ok()
    }
}

/// Per-scale data behind a coarse spectrum estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseScale {
    pub eps: f64,
    pub threshold: f64,
    pub qualifying: u64,
    pub measure: f64,
    /// `log(measure) / log(eps)`; `None` when nothing qualifies.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoarseSpectrum {
    pub a: f64,
    pub curve: SpectrumCurve,
    pub scales: Vec<CoarseScale>,
    /// Scales with an empty qualifying set.
    pub flagged: Vec<f64>,
}

/// Grid estimate of `log Leb{x : I(D(x,ε)) >= a² ε² (log ε)⁴} / log ε`
/// for each `ε`, on centres `pitch · Z²`.
pub fn coarse_spectrum_lebesgue(
    w: &PlanarPath,
    w2: &PlanarPath,
    a: f64,
    eps_list: &[f64],
    pitch: f64,
    kernel: &KernelSpec,
) -> Result<CoarseSpectrum> {
    let predicted = theory::coarse_spectrum_exponent(a).map_err(|e| precondition(e.to_string()))?;
    if !(pitch > 0.0) {
        return Err(precondition(format!("grid pitch must be positive, got {pitch}")));
    }
    let floor = kernel.scale.max(pitch);
    let bad: Vec<f64> = eps_list.iter().copied().filter(|&e| !(e > floor && e < 1.0)).collect();
    if eps_list.is_empty() || !bad.is_empty() {
        return Err(precondition(format!(
            "every ε must lie in (max(kernel scale, pitch), 1) = ({floor}, 1); offending: {bad:?}"
        )));
    }
    let weights = intersection_sample_weights(w, w2, kernel)?;
    let pts = w.points();
    let live: Vec<usize> = (0..pts.len()).filter(|&i| weights[i] > 0.0).collect();

    let mut curve = SpectrumCurve::new(format!("coarse spectrum a={a}"), "eps", TheoryLaw::Constant {
        name: "2a".into(),
        value: predicted,
    });
    let mut scales = Vec::new();
    let mut flagged = Vec::new();
    for &eps in eps_list {
        let threshold = a * a * eps * eps * eps.ln().powi(4);
        let qualifying = if live.is_empty() { 0 } else { count_qualifying(pts, &weights, &live, eps, pitch, threshold) };
        let measure = pitch * pitch * qualifying as f64;
        let ratio = (qualifying > 0).then(|| measure.ln() / eps.ln());
        match ratio {
            Some(r) => curve.push(SpectrumPoint { param: eps, exponent: r, stderr: 0.0, replicas: 1 })?,
            None => flagged.push(eps),
        }
        scales.push(CoarseScale { eps, threshold, qualifying, measure, ratio });
    }
    Ok(CoarseSpectrum { a, curve, scales, flagged })
}

fn count_qualifying(pts: &[Point2], weights: &[f64], live: &[usize], eps: f64, pitch: f64, threshold: f64) -> u64 {
    let (mut lo, mut hi) = (pts[live[0]], pts[live[0]]);
    for &i in live {
        lo = Point2::new(lo.x.min(pts[i].x), lo.y.min(pts[i].y));
        hi = Point2::new(hi.x.max(pts[i].x), hi.y.max(pts[i].y));
    }
    let live_set: Vec<bool> = {
        let mut v = vec![false; pts.len()];
        for &i in live {
            v[i] = true;
        }
        v
    };
    let bins = SpatialBins::with_filter(pts, eps, |i| live_set[i]);
    let ix0 = ((lo.x - eps) / pitch).floor() as i64;
    let ix1 = ((hi.x + eps) / pitch).ceil() as i64;
    let iy0 = ((lo.y - eps) / pitch).floor() as i64;
    let iy1 = ((hi.y + eps) / pitch).ceil() as i64;
    let eps2 = eps * eps;
    let mut count = 0u64;
    for ix in ix0..=ix1 {
        for iy in iy0..=iy1 {
            let c = Point2::new(ix as f64 * pitch, iy as f64 * pitch);
            let mut mass = 0.0;
            bins.for_each_near(c, eps, |i| {
                if pts[i].dist2(c) < eps2 {
                    mass += weights[i];
                }
            });
            if mass >= threshold {
                count += 1;
            }
        }
    }
    count
}
