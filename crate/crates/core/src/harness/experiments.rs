//! The registered experiments.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::config::ParamValue;
use super::report::{Aggregate, CurveOut, CurvePoint, MetricValue, Overlay, Report, TheoryValue};
use crate::error::Result;
use crate::intersection::{
    excursion_count, intersection_local_time_continuum, product_local_time, ExcursionMode, KernelSpec,
};
use crate::lattice::{
    geometric_visit_moment, hitting_prob_zero, lattice_green_exact, origin_visit_samples, LatticePoint, LocalTimeField,
    StepSource,
};
use crate::operators::{
    c_beta, green_disc, intersection_first_moment_mc, lambda_beta, moment_bound_curve, stable_potential,
};
use crate::paths::{
    occupation_measure, occupation_profile, simulate_bm, simulate_bm_from, simulate_stable, CenterGrid, KSet,
    OccupationQuery, Point2, Region, Stop,
};
use crate::rng::{mix, rng_from_seed};
use crate::spectra::{
    coarse_spectrum_lebesgue, count_thick_points, exponent_estimate_replicas, ols, single_walk_thick, theory,
    TheoryLaw,
};

/// A declared parameter with its default, written as on the command line.
#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn p(name: &'static str, default: &'static str, help: &'static str) -> ParamSpec {
    ParamSpec { name, default, help }
}

/// Metrics one replica produced.
#[derive(Debug, Clone, Default)]
pub struct ReplicaData {
    pub metrics: Vec<MetricValue>,
    pub steps: u64,
}

impl ReplicaData {
    fn push(&mut self, point: Vec<Option<f64>>, metric: &str, value: f64) {
        self.metrics.push(MetricValue { point, metric: metric.to_string(), value });
    }
}

pub struct FinishCtx {
    pub master_seed: u64,
    pub replicas: u64,
}

/// A validated, ready-to-run experiment.
pub trait Job: Sync {
    /// Sweep parameter names, in the order used by sweep points.
    fn sweep(&self) -> Vec<String>;
    fn replica(&self, index: u64, seed: u64) -> Result<ReplicaData>;
    /// Adds derived aggregates, theory values, curves and notes.
    fn finish(&self, _ctx: &FinishCtx, _report: &mut Report) -> Result<()> {
        Ok(())
    }
}

pub struct Experiment {
    pub name: &'static str,
    pub summary: &'static str,
    pub params: &'static [ParamSpec],
    build: fn(&Params) -> std::result::Result<Box<dyn Job>, String>,
}

impl Experiment {
    pub fn build(&self, params: &Params) -> std::result::Result<Box<dyn Job>, String> {
        (self.build)(params)
    }
}

/// Parameters resolved against an experiment's schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    values: BTreeMap<String, ParamValue>,
}

impl Params {
    /// Fills defaults and rejects names the schema does not declare.
    pub fn resolve(exp: &Experiment, given: &BTreeMap<String, ParamValue>) -> std::result::Result<Self, String> {
        if let Some(bad) = given.keys().find(|k| !exp.params.iter().any(|s| s.name == k.as_str())) {
            let known: Vec<&str> = exp.params.iter().map(|s| s.name).collect();
            return Err(format!("unknown parameter '{bad}' for {}; expected one of: {}", exp.name, known.join(", ")));
        }
        let values = exp
            .params
            .iter()
            .map(|s| {
                let v = given.get(s.name).cloned().unwrap_or_else(|| ParamValue::parse(s.default));
                (s.name.to_string(), v)
            })
            .collect();
        Ok(Self { values })
    }

    pub fn values(&self) -> &BTreeMap<String, ParamValue> {
        &self.values
    }

    fn get(&self, name: &str) -> &ParamValue {
        &self.values[name]
    }

    fn num(&self, name: &str) -> std::result::Result<f64, String> {
        match self.get(name).as_number() {
            Some(v) if v.is_finite() => Ok(v),
            _ => Err(format!("{name} must be a number, got '{}'", self.get(name))),
        }
    }

    fn positive(&self, name: &str) -> std::result::Result<f64, String> {
        let v = self.num(name)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(format!("{name} must be positive, got {v}"))
        }
    }

    fn list(&self, name: &str) -> std::result::Result<Vec<f64>, String> {
        match self.get(name).as_list() {
            Some(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => Ok(v),
            _ => Err(format!("{name} must be a number or a comma-separated list of numbers, got '{}'", self.get(name))),
        }
    }

    fn count(&self, name: &str) -> std::result::Result<u64, String> {
        let v = self.num(name)?;
        if v >= 1.0 && v.fract() == 0.0 && v < 1e15 {
            Ok(v as u64)
        } else {
            Err(format!("{name} must be a positive integer, got {v}"))
        }
    }

    fn text(&self, name: &str) -> String {
        self.get(name).to_string()
    }
}

pub fn registry() -> &'static [Experiment] {
    &REGISTRY
}

pub fn find(name: &str) -> Option<&'static Experiment> {
    REGISTRY.iter().find(|e| e.name == name)
}

static REGISTRY: [Experiment; 11] = [
    Experiment {
        name: "pair-thick",
        summary: "thick points of the product local time of two walks",
        params: &[
            p("b", "0.02,0.05", "threshold parameters, 0 < b < 1/(2π)"),
            p("n_min_exp", "10", "smallest horizon 2^m"),
            p("n_max_exp", "14", "largest horizon 2^m"),
        ],
        build: |ps| Ok(Box::new(PairThick::new(ps)?)),
    },
    Experiment {
        name: "erdos-taylor",
        summary: "maximal local time and thick points of one walk",
        params: &[
            p("a", "0.05,0.1", "threshold parameters, 0 < a < 1/π"),
            p("n_min_exp", "10", "smallest horizon 2^m"),
            p("n_max_exp", "14", "largest horizon 2^m"),
        ],
        build: |ps| Ok(Box::new(ErdosTaylor::new(ps)?)),
    },
    Experiment {
        name: "coarse-spectrum",
        summary: "Lebesgue measure of intersection-thick discs against the limit 2a",
        params: &[
            p("a", "0.2,0.4", "thickness levels, 0 < a < 1"),
            p("eps", "0.2,0.14,0.1", "disc radii"),
            p("pitch", "0.02", "grid pitch of the centres"),
            p("dt", "0.0001", "time step"),
            p("kernel", "0.02", "kernel scale, at least 2·sqrt(dt)"),
        ],
        build: |ps| Ok(Box::new(CoarseSpectrum::new(ps)?)),
    },
    Experiment {
        name: "kset-occupation",
        summary: "normalized occupation of scaled K-sets against the disc",
        params: &[
            p("kset", "disc", "disc, half-disc, or a path to a K-set file"),
            p("cell", "0.001953125", "raster cell for disc and half-disc"),
            p("eps", "0.1,0.05", "scales"),
            p("half", "0.5", "centres cover [-half, half]²"),
            p("pitch", "0.04", "grid pitch of the centres"),
            p("dt", "0.0001", "time step"),
        ],
        build: |ps| Ok(Box::new(KSetOccupation::new(ps)?)),
    },
    Experiment {
        name: "excursions",
        summary: "annulus excursion counts of Brownian motion before leaving the unit disc",
        params: &[
            p("r", "0.05", "inner radius"),
            p("R", "0.2", "outer radius"),
            p("dt", "0.0001", "time step"),
            p("mode", "outer-to-inner", "outer-to-inner or round-trip"),
        ],
        build: |ps| Ok(Box::new(Excursions::new(ps)?)),
    },
    Experiment {
        name: "kac-lattice",
        summary: "moments of origin visits before leaving a lattice disc",
        params: &[p("R", "20", "disc radius"), p("walks", "1000", "walks per replica")],
        build: |ps| Ok(Box::new(KacLattice::new(ps)?)),
    },
    Experiment {
        name: "hitting-prob",
        summary: "probability of hitting the origin before leaving D(0, R) from radius r",
        params: &[
            p("R", "54.598150033144236", "outer radius"),
            p("r", "20.085536923187668", "starting radius"),
            p("walks", "2000", "walks per replica"),
        ],
        build: |ps| Ok(Box::new(HittingProb::new(ps)?)),
    },
    Experiment {
        name: "green-disc-check",
        summary: "disc Green's function symmetry and the logarithmic bound",
        params: &[p("r", "1", "disc radius"), p("pairs", "10000", "random pairs per replica")],
        build: |ps| Ok(Box::new(GreenDiscCheck::new(ps)?)),
    },
    Experiment {
        name: "lambda-beta",
        summary: "operator norm of the stable potential kernel on the unit disc",
        params: &[p("beta", "1", "stability indices in (0, 2)"), p("h", "0.0625,0.03125", "grid cell sides")],
        build: |ps| Ok(Box::new(LambdaBeta::new(ps)?)),
    },
    Experiment {
        name: "intersect-moment",
        summary: "mean intersection local time of a small disc against the Green's function integral",
        params: &[
            p("r", "1", "outer radius"),
            p("r1", "0.05", "small disc radius; starts lie on its boundary"),
            p("dt", "0.0001", "time step"),
            p("kernel", "0.02", "kernel scale"),
            p("pairs", "10", "path pairs per replica"),
            p("mc_samples", "100000", "quadrature samples for the reference value"),
            p("c", "0", "additive constant of the moment bound"),
        ],
        build: |ps| Ok(Box::new(IntersectMoment::new(ps)?)),
    },
    Experiment {
        name: "stable-potential-check",
        summary: "occupation density of the stable process against c_β|z|^(β-2)",
        params: &[
            p("beta", "1", "stability index in (0, 2)"),
            p("z", "0.7", "distance of the probe discs from the start"),
            p("eps", "0.05", "probe disc radius"),
            p("dt", "0.002", "time step"),
            p("horizon", "20", "simulated time"),
            p("paths", "50", "paths per replica"),
            p("directions", "8", "probe discs spread around the circle |x| = z"),
        ],
        build: |ps| Ok(Box::new(StablePotential::new(ps)?)),
    },
];

// Shared helpers.

fn dyadic(ps: &Params) -> std::result::Result<Vec<u32>, String> {
    let lo = ps.count("n_min_exp")?;
    let hi = ps.count("n_max_exp")?;
    if hi > 30 || lo > hi || hi - lo < 2 {
        return Err(format!("need n_min_exp + 2 <= n_max_exp <= 30, got {lo}..{hi}"));
    }
    Ok((lo as u32..=hi as u32).collect())
}

fn theory_err(e: crate::Error) -> String {
    e.to_string()
}

fn overlay(law: &TheoryLaw, xs: &[f64]) -> Option<Overlay> {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return None;
    }
    let steps = if hi > lo { 40 } else { 0 };
    let points: Vec<[f64; 2]> = (0..=steps)
        .filter_map(|i| {
            let x = if steps == 0 { lo } else { lo + (hi - lo) * i as f64 / steps as f64 };
            law.eval(x).ok().map(|y| [x, y])
        })
        .collect();
    (!points.is_empty()).then(|| Overlay { law: law.name().to_string(), points })
}

/// Curve over the aggregates of `metric` whose points satisfy `keep`,
/// with `x` read from the point.
fn curve(
    report: &Report,
    metric: &str,
    label: String,
    x_name: &str,
    keep: impl Fn(&[Option<f64>]) -> bool,
    x_of: impl Fn(&[Option<f64>]) -> f64,
    law: Option<TheoryLaw>,
) -> CurveOut {
    let points: Vec<CurvePoint> = report
        .aggregates
        .iter()
        .filter(|a| a.metric == metric && keep(&a.point) && a.value.is_finite())
        .map(|a| CurvePoint { x: x_of(&a.point), y: a.value, stderr: a.stderr.unwrap_or(0.0), replicas: a.n_replicas })
        .collect();
    let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
    CurveOut {
        label,
        x_name: x_name.to_string(),
        y_name: metric.to_string(),
        theory: law.and_then(|l| overlay(&l, &xs)),
        points,
    }
}

fn add_theory(report: &mut Report, point: Vec<Option<f64>>, metric: &str, value: f64, law: &str) {
    report.theory.push(TheoryValue { point, metric: metric.to_string(), value, law: law.to_string() });
}

/// Per-replica `(n, M_n)` series of `metric` at sweep parameter `param`
/// (first point coordinate), `n` in the second coordinate.
fn series(report: &Report, metric: &str, param: f64) -> Vec<Vec<(f64, f64)>> {
    report
        .records
        .iter()
        .filter(|r| r.error.is_none())
        .map(|r| {
            r.metrics
                .iter()
                .filter(|m| m.metric == metric && m.point[0] == Some(param))
                .map(|m| (m.point[1].expect("horizon present"), m.value))
                .collect()
        })
        .collect()
}

fn push_fit(report: &mut Report, param: f64, label: &str) -> Result<()> {
    let reps = series(report, "count", param);
    let n_reps = reps.len() as u64;
    let fit = exponent_estimate_replicas(&reps)?;
    if let Some(d) = &fit.diagnostic {
        report.notes.push(format!("{label} = {param}: {d}"));
    }
    if let Some(slope) = fit.slope {
        report.aggregates.push(Aggregate {
            point: vec![Some(param), None],
            metric: "exponent".into(),
            value: slope,
            stderr: fit.stderr,
            n_replicas: n_reps,
        });
    }
    Ok(())
}

// pair-thick

struct PairThick {
    bs: Vec<f64>,
    exps: Vec<u32>,
}

impl PairThick {
    fn new(ps: &Params) -> std::result::Result<Self, String> {
        let bs = ps.list("b")?;
        for &b in &bs {
            theory::pair_count_exponent(b).map_err(|_| format!("b = {b} is outside the range 0 < b < 1/(2π)"))?;
        }
        Ok(Self { bs, exps: dyadic(ps)? })
    }
}

impl Job for PairThick {
    fn sweep(&self) -> Vec<String> {
        vec!["b".into(), "n".into()]
    }

    fn replica(&self, _index: u64, seed: u64) -> Result<ReplicaData> {
        let mut out = ReplicaData::default();
        let mut walks = [StepSource::new(mix(seed, 0)), StepSource::new(mix(seed, 1))];
        let mut pos = [LatticePoint::ORIGIN; 2];
        let mut fields = [LocalTimeField::starting_at(pos[0]), LocalTimeField::starting_at(pos[1])];
        let mut n = 0u64;
        for &m in &self.exps {
            let target = 1u64 << m;
            while n < target {
                for j in 0..2 {
                    pos[j] = pos[j].offset(walks[j].next_step());
                    fields[j].visit(pos[j]);
                }
                n += 1;
            }
            let pf = product_local_time(&[&fields[0], &fields[1]])?;
            let nf = n as f64;
            for &b in &self.bs {
                let tc = count_thick_points(&pf, b)?;
                out.push(vec![Some(b), Some(nf)], "count", tc.count as f64);
            }
            out.push(vec![None, Some(nf)], "max_ratio", pf.max_product() as f64 / nf.ln().powi(4));
        }
        out.steps = 2 * n;
        Ok(out)
    }

    fn finish(&self, _ctx: &FinishCtx, report: &mut Report) -> Result<()> {
        for &b in &self.bs {
            push_fit(report, b, "b")?;
            add_theory(report, vec![Some(b), None], "exponent", theory::pair_count_exponent(b)?, "1 - 2*pi*b");
        }
        add_theory(report, vec![None, None], "max_ratio", theory::pair_max_constant(), "1/(4*pi^2)");
        let c1 = curve(report, "exponent", "count exponent".into(), "b", |p| p[1].is_none(), |p| p[0].unwrap(), Some(TheoryLaw::PairCountExponent));
        let c2 = curve(
            report,
            "max_ratio",
            "T_n / (log n)^4".into(),
            "log2 n",
            |p| p[0].is_none() && p[1].is_some(),
            |p| p[1].unwrap().log2(),
            Some(TheoryLaw::Constant { name: "1/(4*pi^2)".into(), value: theory::pair_max_constant() }),
        );
        report.curves.extend([c1, c2]);
        Ok(())
    }
}

// erdos-taylor

struct ErdosTaylor {
    a: Vec<f64>,
    exps: Vec<u32>,
}

impl ErdosTaylor {
    fn new(ps: &Params) -> std::result::Result<Self, String> {
        let a = ps.list("a")?;
        for &x in &a {
            theory::single_count_exponent(x).map_err(|_| format!("a = {x} is outside the range 0 < a < 1/π"))?;
        }
        Ok(Self { a, exps: dyadic(ps)? })
    }
}

impl Job for ErdosTaylor {
    fn sweep(&self) -> Vec<String> {
        vec!["a".into(), "n".into()]
    }

    fn replica(&self, _index: u64, seed: u64) -> Result<ReplicaData> {
        let mut out = ReplicaData::default();
        let mut walk = StepSource::new(seed);
        let mut pos = LatticePoint::ORIGIN;
        let mut field = LocalTimeField::starting_at(pos);
        let mut n = 0u64;
        for &m in &self.exps {
            let target = 1u64 << m;
            while n < target {
                pos = pos.offset(walk.next_step());
                field.visit(pos);
                n += 1;
            }
            let nf = n as f64;
            for &a in &self.a {
                let tc = single_walk_thick(&field, a)?;
                out.push(vec![Some(a), Some(nf)], "count", tc.count as f64);
            }
            out.push(vec![None, Some(nf)], "max_ratio", f64::from(field.max_count()) / nf.ln().powi(2));
        }
        out.steps = n;
        Ok(out)
    }

    fn finish(&self, _ctx: &FinishCtx, report: &mut Report) -> Result<()> {
        for &a in &self.a {
            push_fit(report, a, "a")?;
            add_theory(report, vec![Some(a), None], "exponent", theory::single_count_exponent(a)?, "1 - pi*a");
        }
        let pts: Vec<(f64, f64)> = report
            .aggregates
            .iter()
            .filter(|g| g.metric == "max_ratio")
            .map(|g| (g.point[1].unwrap().ln(), g.value))
            .collect();
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        let (slope, se, _) = ols(&xs, &ys);
        let reps = report.records.iter().filter(|r| r.error.is_none()).count() as u64;
        report.aggregates.push(Aggregate {
            point: vec![None, None],
            metric: "max_ratio_slope".into(),
            value: slope,
            stderr: Some(se),
            n_replicas: reps,
        });
        add_theory(report, vec![None, None], "max_ratio", theory::single_max_constant(), "1/pi");
        let c1 = curve(report, "exponent", "count exponent".into(), "a", |p| p[1].is_none(), |p| p[0].unwrap(), Some(TheoryLaw::SingleCountExponent));
        let c2 = curve(
            report,
            "max_ratio",
            "T_n / (log n)^2".into(),
            "log2 n",
            |p| p[0].is_none() && p[1].is_some(),
            |p| p[1].unwrap().log2(),
            Some(TheoryLaw::Constant { name: "1/pi".into(), value: theory::single_max_constant() }),
        );
        report.curves.extend([c1, c2]);
        Ok(())
    }
}

// coarse-spectrum

struct CoarseSpectrum {
    a: Vec<f64>,
    eps: Vec<f64>,
    pitch: f64,
    dt: f64,
    kernel: KernelSpec,
}

impl CoarseSpectrum {
    fn new(ps: &Params) -> std::result::Result<Self, String> {
        let a = ps.list("a")?;
        for &x in &a {
            theory::coarse_spectrum_exponent(x).map_err(|_| format!("a = {x} is outside the range 0 < a < 1"))?;
        }
        let eps = ps.list("eps")?;
        let pitch = ps.positive("pitch")?;
        let dt = ps.positive("dt")?;
        let kernel = ps.positive("kernel")?;
        if kernel < 2.0 * dt.sqrt() {
            return Err(format!("kernel = {kernel} is below the resolution guard 2·sqrt(dt) = {}", 2.0 * dt.sqrt()));
        }
        let floor = kernel.max(pitch);
        if let Some(e) = eps.iter().find(|&&e| !(e > floor && e < 1.0)) {
            return Err(format!("eps = {e} must lie in (max(kernel, pitch), 1) = ({floor}, 1)"));
        }
        Ok(Self { a, eps, pitch, dt, kernel: KernelSpec::tent(kernel) })
    }
}

impl Job for CoarseSpectrum {
    fn sweep(&self) -> Vec<String> {
        vec!["a".into(), "eps".into()]
    }

    fn replica(&self, _index: u64, seed: u64) -> Result<ReplicaData> {
        let w = simulate_bm(mix(seed, 0), self.dt, Stop::ExitRadius(1.0))?;
        let w2 = simulate_bm(mix(seed, 1), self.dt, Stop::ExitRadius(1.0))?;
        let mut out = ReplicaData { steps: (w.len() + w2.len()) as u64, ..Default::default() };
        for &a in &self.a {
            let cs = coarse_spectrum_lebesgue(&w, &w2, a, &self.eps, self.pitch, &self.kernel)?;
            for s in &cs.scales {
                let pt = vec![Some(a), Some(s.eps)];
                out.push(pt.clone(), "measure", s.measure);
                out.push(pt.clone(), "empty", if s.ratio.is_none() { 1.0 } else { 0.0 });
                if let Some(r) = s.ratio {
                    out.push(pt, "ratio", r);
                }
            }
        }
        Ok(out)
    }

    fn finish(&self, _ctx: &FinishCtx, report: &mut Report) -> Result<()> {
        report.notes.push("ratio is averaged over replicas with a nonempty qualifying set; see 'empty'".into());
        for &a in &self.a {
            let v = theory::coarse_spectrum_exponent(a)?;
            add_theory(report, vec![Some(a), None], "ratio", v, "2a");
            let c = curve(
                report,
                "ratio",
                format!("log Leb / log eps, a = {a}"),
                "eps",
                |p| p[0] == Some(a) && p[1].is_some(),
                |p| p[1].unwrap(),
                Some(TheoryLaw::Constant { name: "2a".into(), value: v }),
            );
            report.curves.push(c);
        }
        Ok(())
    }
}

// kset-occupation

struct KSetOccupation {
    kset: KSet,
    eps: Vec<f64>,
    grid: CenterGrid,
    dt: f64,
}

impl KSetOccupation {
    fn new(ps: &Params) -> std::result::Result<Self, String> {
        let cell = ps.positive("cell")?;
        let name = ps.text("kset");
        let kset = match name.as_str() {
            "disc" => KSet::disc(cell),
            "half-disc" => KSet::half_disc(cell),
            path => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("kset file '{path}': {e}"))?;
                KSet::parse(&text)
            }
        }
        .map_err(|e| format!("kset: {e}"))?;
        let eps = ps.list("eps")?;
        let half = ps.positive("half")?;
        let pitch = ps.positive("pitch")?;
        let dt = ps.positive("dt")?;
        let floor = (2.0 * dt.sqrt()).max(pitch);
        if let Some(e) = eps.iter().find(|&&e| !(e > floor && e < 1.0)) {
            return Err(format!("eps = {e} must lie in (max(2·sqrt(dt), pitch), 1) = ({floor}, 1)"));
        }
        Ok(Self { kset, eps, grid: CenterGrid::square(half, pitch), dt })
    }
}

impl Job for KSetOccupation {
    fn sweep(&self) -> Vec<String> {
        vec!["eps".into()]
    }

    fn replica(&self, _index: u64, seed: u64) -> Result<ReplicaData> {
        let path = simulate_bm(seed, self.dt, Stop::ExitRadius(1.0))?;
        let k = occupation_profile(&path, &self.grid, &self.eps, Region::KSet(&self.kset))?;
        let d = occupation_profile(&path, &self.grid, &self.eps, Region::Disc)?;
        let rel = self.kset.area() / PI;
        let mut out = ReplicaData { steps: path.len() as u64, ..Default::default() };
        for (e, &eps) in self.eps.iter().enumerate() {
            out.push(vec![Some(eps)], "sup_k", k.sup[e]);
            out.push(vec![Some(eps)], "sup_k_raw", k.sup[e] * rel);
            out.push(vec![Some(eps)], "sup_disc", d.sup[e]);
        }
        Ok(out)
    }

    fn finish(&self, _ctx: &FinishCtx, report: &mut Report) -> Result<()> {
        let area = self.kset.area();
        report.notes.push(format!("K: {}", self.kset.describe()));
        let raw = theory::kset_occupation_sup(area)?;
        add_theory(report, vec![None], "sup_k_raw", raw, "2|K|/pi");
        add_theory(report, vec![None], "sup_k", theory::disc_occupation_sup(), "2 (normalized by |K|/pi)");
        add_theory(report, vec![None], "sup_disc", theory::disc_occupation_sup(), "2");
        for (metric, value, name) in [("sup_k_raw", raw, "2|K|/pi"), ("sup_disc", 2.0, "2")] {
            let c = curve(
                report,
                metric,
                metric.replace('_', " "),
                "eps",
                |p| p[0].is_some(),
                |p| p[0].unwrap(),
                Some(TheoryLaw::Constant { name: name.into(), value }),
            );
            report.curves.push(c);
        }
        Ok(())
    }
}

// excursions

struct Excursions {
    r: f64,
    big_r: f64,
    dt: f64,
    mode: ExcursionMode,
}

impl Excursions {
    fn new(ps: &Params) -> std::result::Result<Self, String> {
        let r = ps.positive("r")?;
        let big_r = ps.positive("R")?;
        if !(r < big_r && big_r < 1.0) {
            return Err(format!("need 0 < r < R < 1, got r = {r}, R = {big_r}"));
        }
        let mode = match ps.text("mode").as_str() {
            "outer-to-inner" => ExcursionMode::OuterToInner,
            "round-trip" => ExcursionMode::RoundTrip,
            other => return Err(format!("mode must be outer-to-inner or round-trip, got '{other}'")),
        };
        Ok(Self { r, big_r, dt: ps.positive("dt")?, mode })
    }
}

impl Job for Excursions {
    fn sweep(&self) -> Vec<String> {
        Vec::new()
    }

    fn replica(&self, _index: u64, seed: u64) -> Result<ReplicaData> {
        let path = simulate_bm(seed, self.dt, Stop::ExitRadius(1.0))?;
        let n = excursion_count(&path, Point2::ORIGIN, self.r, self.big_r, self.mode)?;
        let mut out = ReplicaData { steps: path.len() as u64, ..Default::default() };
        out.push(vec![], "count", n as f64);
        Ok(out)
    }

    fn finish(&self, _ctx: &FinishCtx, report: &mut Report) -> Result<()> {
        // From the centre, the count is 1 + Geometric with return
        // probability log(1/R) / log(1/r).
        let mean = (1.0 / self.r).ln() / (self.big_r / self.r).ln();
        add_theory(report, vec![], "count", mean, "log(1/r) / log(R/r)");
        report.notes.push("discrete sampling misses brief crossings; expect a small downward bias".into());
        Ok(())
    }
}

// kac-lattice

struct KacLattice {
    radius: f64,
    walks: u64,
}

impl KacLattice {
    fn new(ps: &Params) -> std::result::Result<Self, String> {
        let radius = ps.positive("R")?;
        if radius > 200.0 {
            return Err(format!("R = {radius} exceeds 200"));
        }
        Ok(Self { radius, walks: ps.count("walks")? })
    }
}

impl Job for KacLattice {
    fn sweep(&self) -> Vec<String> {
        Vec::new()
    }

    fn replica(&self, _index: u64, seed: u64) -> Result<ReplicaData> {
        let v = origin_visit_samples(self.radius, self.walks, seed);
        let n = v.len() as f64;
        let moment = |k: i32| v.iter().map(|&x| (x as f64).powi(k)).sum::<f64>() / n;
        let mut out = ReplicaData::default();
        out.push(vec![], "visits_m1", moment(1));
        out.push(vec![], "visits_m2", moment(2));
        out.push(vec![], "visits_m3", moment(3));
        Ok(out)
    }

    fn finish(&self, _ctx: &FinishCtx, report: &mut Report) -> Result<()> {
        let g = lattice_green_exact(self.radius)?.origin_value();
        for k in 1..=3u32 {
            let name = format!("visits_m{k}");
            add_theory(report, vec![], &name, geometric_visit_moment(g, k)?, "geometric law of visit counts");
            let fact = (1..=k).product::<u32>() as f64;
            add_theory(report, vec![], &format!("{name}_kac"), fact * g.powi(k as i32), "k! G^k");
        }
        report.notes.push(format!("G_R(0,0) = {g}"));
        Ok(())
    }
}

// hitting-prob

struct HittingProb {
    big_r: f64,
    r: f64,
    walks: u64,
}

impl HittingProb {
    fn new(ps: &Params) -> std::result::Result<Self, String> {
        let big_r = ps.positive("R")?;
        let r = ps.positive("r")?;
        if !(r < big_r && big_r > 1.0) || big_r > 1000.0 {
            return Err(format!("need 0 < r < R, 1 < R <= 1000, got r = {r}, R = {big_r}"));
        }
        Ok(Self { big_r, r, walks: ps.count("walks")? })
    }
}

impl Job for HittingProb {
    fn sweep(&self) -> Vec<String> {
        Vec::new()
    }

    fn replica(&self, _index: u64, seed: u64) -> Result<ReplicaData> {
        let est = hitting_prob_zero(self.big_r, self.r, self.walks, seed)?;
        let mut out = ReplicaData::default();
        out.push(vec![], "probability", est.mean);
        Ok(out)
    }

    fn finish(&self, _ctx: &FinishCtx, report: &mut Report) -> Result<()> {
        let v = (self.big_r / self.r).ln() / self.big_r.ln();
        add_theory(report, vec![], "probability", v, "log(R/r) / log R");
        Ok(())
    }
}

// green-disc-check

struct GreenDiscCheck {
    r: f64,
    pairs: u64,
}

impl GreenDiscCheck {
    fn new(ps: &Params) -> std::result::Result<Self, String> {
        Ok(Self { r: ps.positive("r")?, pairs: ps.count("pairs")? })
    }
}

impl Job for GreenDiscCheck {
    fn sweep(&self) -> Vec<String> {
        Vec::new()
    }

    fn replica(&self, _index: u64, seed: u64) -> Result<ReplicaData> {
        use rand::Rng;
        let mut rng = rng_from_seed(seed);
        let half = self.r / 2.0;
        let mut sample = || Point2::polar(half * rng.random::<f64>().sqrt(), 2.0 * PI * rng.random::<f64>());
        let (mut dev, mut asym) = (0.0f64, 0.0f64);
        for _ in 0..self.pairs {
            let (x, y) = (sample(), sample());
            if x == y {
                continue;
            }
            let g = green_disc(self.r, x, y)?;
            dev = dev.max((PI * g - (self.r / (x - y).norm()).ln()).abs());
            asym = asym.max((g - green_disc(self.r, y, x)?).abs());
        }
        let mut out = ReplicaData::default();
        out.push(vec![], "max_deviation", dev);
        out.push(vec![], "max_asymmetry", asym);
        Ok(out)
    }

    fn finish(&self, _ctx: &FinishCtx, report: &mut Report) -> Result<()> {
        add_theory(report, vec![], "max_deviation", (4.0f64 / 3.0).ln(), "upper bound log(4/3)");
        add_theory(report, vec![], "max_asymmetry", 0.0, "symmetry");
        Ok(())
    }
}

// lambda-beta

struct LambdaBeta {
    betas: Vec<f64>,
    hs: Vec<f64>,
}

impl LambdaBeta {
    fn new(ps: &Params) -> std::result::Result<Self, String> {
        let betas = ps.list("beta")?;
        for &b in &betas {
            c_beta(b).map_err(theory_err)?;
        }
        let mut hs = ps.list("h")?;
        if let Some(h) = hs.iter().find(|&&h| !(h > 0.0 && h <= 0.125)) {
            return Err(format!("h = {h} must lie in (0, 1/8] so that at least 100 cells fit in the disc"));
        }
        if let Some(h) = hs.iter().find(|&&h| h < 1.0 / 256.0) {
            return Err(format!("h = {h} is below the supported minimum 1/256"));
        }
        hs.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { betas, hs })
    }
}

impl Job for LambdaBeta {
    fn sweep(&self) -> Vec<String> {
        vec!["beta".into(), "h".into()]
    }

    fn replica(&self, _index: u64, _seed: u64) -> Result<ReplicaData> {
        let mut out = ReplicaData::default();
        for &beta in &self.betas {
            for &h in &self.hs {
                let est = lambda_beta(beta, h)?;
                let pt = vec![Some(beta), Some(h)];
                out.push(pt.clone(), "lambda", est.lambda);
                out.push(pt.clone(), "iterations", est.iterations as f64);
                out.push(pt, "residual", est.residual);
                out.steps += est.iterations as u64;
            }
        }
        Ok(out)
    }

    fn finish(&self, _ctx: &FinishCtx, report: &mut Report) -> Result<()> {
        report.notes.push("deterministic computation; every replica repeats it".into());
        for &beta in &self.betas {
            let lam: Vec<(f64, f64)> = report
                .aggregates
                .iter()
                .filter(|a| a.metric == "lambda" && a.point[0] == Some(beta))
                .map(|a| (a.point[1].unwrap(), a.value))
                .collect();
            for w in lam.windows(2) {
                report.aggregates.push(Aggregate {
                    point: vec![Some(beta), Some(w[1].0)],
                    metric: "refinement_gap".into(),
                    value: (w[0].1 - w[1].1).abs() / w[1].1,
                    stderr: None,
                    n_replicas: 1,
                });
            }
            let c = curve(report, "lambda", format!("Lambda, beta = {beta}"), "h", |p| p[0] == Some(beta), |p| p[1].unwrap(), None);
            report.curves.push(c);
        }
        Ok(())
    }
}

// intersect-moment

struct IntersectMoment {
    r: f64,
    r1: f64,
    dt: f64,
    kernel: KernelSpec,
    pairs: u64,
    mc_samples: u64,
    c: f64,
}

impl IntersectMoment {
    fn new(ps: &Params) -> std::result::Result<Self, String> {
        let r = ps.positive("r")?;
        let r1 = ps.positive("r1")?;
        if r1 > r / 2.0 {
            return Err(format!("need r1 <= r/2, got r1 = {r1}, r = {r}"));
        }
        let dt = ps.positive("dt")?;
        let kernel = ps.positive("kernel")?;
        if kernel < 2.0 * dt.sqrt() {
            return Err(format!("kernel = {kernel} is below the resolution guard 2·sqrt(dt) = {}", 2.0 * dt.sqrt()));
        }
        let c = ps.num("c")?;
        if c < 0.0 {
            return Err(format!("c must be nonnegative, got {c}"));
        }
        Ok(Self {
            r,
            r1,
            dt,
            kernel: KernelSpec::tent(kernel),
            pairs: ps.count("pairs")?,
            mc_samples: ps.count("mc_samples")?,
            c,
        })
    }

    fn starts(&self) -> (Point2, Point2) {
        (Point2::new(self.r1, 0.0), Point2::new(-self.r1, 0.0))
    }
}

impl Job for IntersectMoment {
    fn sweep(&self) -> Vec<String> {
        Vec::new()
    }

    fn replica(&self, _index: u64, seed: u64) -> Result<ReplicaData> {
        let (x0, x0p) = self.starts();
        let mut total = 0.0;
        let mut total_sq = 0.0;
        let mut steps = 0u64;
        for j in 0..self.pairs {
            let w = simulate_bm_from(mix(seed, 2 * j), self.dt, x0, Stop::ExitRadius(self.r))?;
            let w2 = simulate_bm_from(mix(seed, 2 * j + 1), self.dt, x0p, Stop::ExitRadius(self.r))?;
            steps += (w.len() + w2.len()) as u64;
            let v = intersection_local_time_continuum(&w, &w2, Point2::ORIGIN, self.r1, &self.kernel)?;
            total += v;
            total_sq += (v / (self.r1 * self.r1)).powi(2);
        }
        let n = self.pairs as f64;
        let mut out = ReplicaData { steps, ..Default::default() };
        out.push(vec![], "intersection", total / n);
        out.push(vec![], "normalized_m2", total_sq / n);
        Ok(out)
    }

    fn finish(&self, ctx: &FinishCtx, report: &mut Report) -> Result<()> {
        let (x0, x0p) = self.starts();
        let est = intersection_first_moment_mc(self.r, self.r1, x0, x0p, self.mc_samples, mix(ctx.master_seed, u64::MAX))?;
        add_theory(report, vec![], "intersection", est.mean, "pi * integral of g(x0,y) g(x0',y) over D(0,r1)");
        add_theory(report, vec![], "normalized_m2", moment_bound_curve(2, self.r, self.r1, self.c)?, "(k!)^2 (log(r/r1) + c)^(2k), k = 2");
        report.notes.push(format!("reference quadrature stderr {}", est.stderr));
        report.notes.push("simulated values carry time-step and kernel-scale bias".into());
        Ok(())
    }
}

// stable-potential-check

struct StablePotential {
    beta: f64,
    z: f64,
    eps: f64,
    dt: f64,
    horizon: f64,
    paths: u64,
    directions: u64,
}

impl StablePotential {
    fn new(ps: &Params) -> std::result::Result<Self, String> {
        let beta = ps.num("beta")?;
        c_beta(beta).map_err(theory_err)?;
        let z = ps.positive("z")?;
        let eps = ps.positive("eps")?;
        if eps >= z {
            return Err(format!("eps = {eps} must be smaller than z = {z}"));
        }
        Ok(Self {
            beta,
            z,
            eps,
            dt: ps.positive("dt")?,
            horizon: ps.positive("horizon")?,
            paths: ps.count("paths")?,
            directions: ps.count("directions")?,
        })
    }
}

impl Job for StablePotential {
    fn sweep(&self) -> Vec<String> {
        Vec::new()
    }

    fn replica(&self, _index: u64, seed: u64) -> Result<ReplicaData> {
        let mut total = 0.0;
        let mut steps = 0u64;
        for j in 0..self.paths {
            let path = simulate_stable(mix(seed, j), self.beta, self.dt, self.horizon)?;
            steps += path.len() as u64;
            for d in 0..self.directions {
                let center = Point2::polar(self.z, 2.0 * PI * d as f64 / self.directions as f64);
                let q = OccupationQuery { center, eps: self.eps, region: Region::Disc };
                total += occupation_measure(&path, &q, path.len() - 1)?;
            }
        }
        let density = total / (self.paths * self.directions) as f64 / (PI * self.eps * self.eps);
        let mut out = ReplicaData { steps, ..Default::default() };
        out.push(vec![], "density", density);
        Ok(out)
    }

    fn finish(&self, _ctx: &FinishCtx, report: &mut Report) -> Result<()> {
        let u = stable_potential(self.beta, Point2::new(self.z, 0.0))?;
        add_theory(report, vec![], "density", u, "c_beta |z|^(beta-2)");
        if self.beta == 1.0 {
            report.notes.push(format!("truncation at T = {} lowers the density by about 1/(2 pi T) = {}", self.horizon, 1.0 / (2.0 * PI * self.horizon)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names() {
        let names: Vec<&str> = registry().iter().map(|e| e.name).collect();
        assert_eq!(names.len(), 11);
        for n in [
            "pair-thick",
            "erdos-taylor",
            "coarse-spectrum",
            "kset-occupation",
            "excursions",
            "kac-lattice",
            "hitting-prob",
            "green-disc-check",
            "lambda-beta",
            "intersect-moment",
            "stable-potential-check",
        ] {
            assert!(find(n).is_some(), "{n}");
        }
    }

    #[test]
    fn defaults_build() {
        for e in registry() {
            let ps = Params::resolve(e, &BTreeMap::new()).unwrap();
            assert!(e.build(&ps).is_ok(), "{}", e.name);
        }
    }

    #[test]
    fn pair_thick_range() {
        let e = find("pair-thick").unwrap();
        let mut given = BTreeMap::new();
        given.insert("b".to_string(), ParamValue::Number(0.2));
        let ps = Params::resolve(e, &given).unwrap();
        let err = e.build(&ps).err().unwrap();
        assert!(err.contains("0 < b < 1/(2π)"), "{err}");
        given.insert("bogus".to_string(), ParamValue::Number(1.0));
        assert!(Params::resolve(e, &given).is_err());
    }
}
