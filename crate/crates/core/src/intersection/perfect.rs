use serde::{Deserialize, Serialize};

use super::excursion::{continuum_zone, ExcursionCounter, ExcursionMode, LatticeAnnulus};
use super::schedule::{lattice_radii, ScaleSchedule, ScheduleKind};
use crate::error::{precondition, Result};
use crate::lattice::{LatticePoint, WalkRun};
use crate::paths::{PlanarPath, Point2};

/// Per-scale counts `N_k(1/2)` and `N_k(2)` behind a perfect-point verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfectPointReport {
    pub passed: bool,
    /// `(k, N_k(1/2), N_k(2))` for `k = 2..=n`.
    pub counts: Vec<(u32, u64, u64)>,
    /// The path ended before reaching `∂D(x, 2)`; `N_k(2)` then covers
    /// the whole path.
    pub incomplete: bool,
}

/// Counts `N_k(ρ)` for `ρ = 1/2` and `ρ = 2` in one pass: outer-to-inner
/// excursions from `∂D(x, ε_{k-1})` to `∂D(x, ε_k)` before the path first
/// reaches `|W - x| >= ρ`. Also reports whether `ρ = 2` was reached.
fn scale_counts(path: &PlanarPath, x: Point2, sched: &ScaleSchedule, levels: u32) -> (Vec<u64>, Vec<u64>, bool) {
    let radii: Vec<(f64, f64)> = sched
        .entries
        .iter()
        .filter(|e| e.index <= levels)
        .map(|e| (e.inner * e.inner, e.outer * e.outer))
        .collect();
    let mut counters: Vec<ExcursionCounter> =
        radii.iter().map(|_| ExcursionCounter::new(ExcursionMode::OuterToInner)).collect();
    let snapshot = |cs: &[ExcursionCounter]| cs.iter().map(|c| c.count()).collect::<Vec<_>>();
    let mut half = None;
    for &p in path.points() {
        let d2 = p.dist2(x);
        if half.is_none() && d2 >= 0.25 {
            half = Some(snapshot(&counters));
        }
        if d2 >= 4.0 {
            let all = snapshot(&counters);
            return (half.unwrap_or_else(|| all.clone()), all, true);
        }
        for (c, &(r2, big_r2)) in counters.iter_mut().zip(&radii) {
            c.feed(continuum_zone(p, x, r2, big_r2));
        }
    }
    let all = snapshot(&counters);
    (half.unwrap_or_else(|| all.clone()), all, false)
}

/// Whether `x` is `n`-perfect along `path`:
/// `n_k - k <= N_k(1/2) <= N_k(2) <= n_k + k` for all `k = 2..=n`.
pub fn perfect_point_test(
    path: &PlanarPath,
    x: Point2,
    n: u32,
    a: f64,
    schedule: &ScaleSchedule,
) -> Result<PerfectPointReport> {
    let ScheduleKind::Factorial { a: sa, levels, .. } = schedule.kind else {
        return Err(precondition("perfect-point test needs a factorial schedule"));
    };
    if sa != a {
        return Err(precondition(format!("schedule built with a = {sa}, test asked for a = {a}")));
    }
    if n < 2 || n > levels {
        return Err(precondition(format!("n must lie in 2..={levels}, got {n}")));
    }
    let (half, two, reached) = scale_counts(path, x, schedule, n);
    let mut passed = true;
    let mut counts = Vec::with_capacity(half.len());
    for ((e, &nh), &n2) in schedule.entries.iter().filter(|e| e.index <= n).zip(&half).zip(&two) {
        let k = f64::from(e.index);
        let target = e.target.expect("factorial entries carry targets");
        passed &= target - k <= nh as f64 && nh <= n2 && n2 as f64 <= target + k;
        counts.push((e.index, nh, n2));
    }
    Ok(PerfectPointReport { passed, counts, incomplete: !reached })
}

/// Verdict and counts of an admissibility test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleReport {
    pub admissible: bool,
    pub threshold: f64,
    pub round_trips: [u64; 2],
    pub inner: f64,
    pub outer: f64,
}

/// Whether `z` is `n, δ`-admissible: both walks complete at least
/// `(1 - 2δ) a k(n)²` excursions between `∂D_z(r_n)` and `∂D_z(R_n)` within
/// `n` steps.
///
/// `δ` may be anything in `(0, 1/2]`; at `δ = 1/2` the threshold is zero
/// and every centre is admissible.
pub fn admissible_test(
    run_x: &WalkRun,
    run_x2: &WalkRun,
    z: LatticePoint,
    n: u64,
    delta: f64,
    big_k: f64,
    a: f64,
) -> Result<AdmissibleReport> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(precondition(format!("δ must lie in (0, 1/2], got {delta}")));
    }
    if n < 2 || !(big_k > 0.0) || !(a > 0.0) {
        return Err(precondition(format!("need n >= 2, K > 0, a > 0 (n = {n}, K = {big_k}, a = {a})")));
    }
    if n > run_x.steps || n > run_x2.steps {
        return Err(crate::Error::OutOfRange(format!("walks shorter than n = {n}")));
    }
    let (kn, inner, outer) = lattice_radii(n, delta, big_k);
    let threshold = (1.0 - 2.0 * delta) * a * f64::from(kn).powi(2);
    if threshold <= 0.0 {
        return Ok(AdmissibleReport { admissible: true, threshold, round_trips: [0, 0], inner, outer });
    }
    let ann = LatticeAnnulus::new(z, inner, outer)?;
    let count = |run: &WalkRun| {
        let mut c = ExcursionCounter::new(ExcursionMode::RoundTrip);
        run.positions().take(n as usize + 1).for_each(|p| c.feed(ann.zone(p)));
        c.count()
    };
    let round_trips = [count(run_x), count(run_x2)];
    let admissible = round_trips.iter().all(|&c| c as f64 >= threshold);
    Ok(AdmissibleReport { admissible, threshold, round_trips, inner, outer })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intersection::{make_schedule, ScheduleKind};
    use crate::lattice::simulate_srw;
    use crate::paths::{simulate_bm_from, Stop};
    use crate::rng::mix;

    fn sched(a: f64, levels: u32) -> ScaleSchedule {
        make_schedule(ScheduleKind::Factorial { eps1: 0.125, a, levels }).unwrap()
    }

    /// Radial path toward `x` that makes `round(n_k)` dives from `ε_{k-1}`
    /// to `ε_k` at every scale, nesting the next scale inside the first dive.
    fn oscillating_path(x: Point2, s: &ScaleSchedule, n: u32) -> PlanarPath {
        let dir = Point2::new(-1.0, 0.0);
        let at = |r: f64| x + dir * r;
        fn dive(k: u32, n: u32, s: &ScaleSchedule, at: &dyn Fn(f64) -> Point2, out: &mut Vec<Point2>) {
            let e = s.entry(k).unwrap();
            let reps = e.target.unwrap().round() as u32;
            for i in 0..reps {
                out.push(at(e.inner * 0.99));
                if i == 0 && k < n {
                    dive(k + 1, n, s, at, out);
                }
                out.push(at(e.outer * 1.01));
            }
        }
        let mut pts = vec![Point2::ORIGIN, at(0.2)];
        dive(2, n, s, &at, &mut pts);
        pts.push(at(2.5));
        PlanarPath::injected(1e-6, pts).unwrap()
    }

    #[test]
    fn constructed_path_is_perfect() {
        let x = Point2::new(0.15, 0.2);
        let s = sched(1.0, 4);
        let path = oscillating_path(x, &s, 3);
        let rep = perfect_point_test(&path, x, 3, 1.0, &s).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(!rep.incomplete);
        assert_eq!(rep.counts.len(), 2);
        for (k, h, t) in rep.counts {
            assert_eq!(h, s.entry(k).unwrap().target.unwrap().round() as u64);
            assert_eq!(h, t);
        }
    }

    #[test]
    fn distant_path_is_not_perfect() {
        let x = Point2::new(0.15, 0.2);
        let s = sched(0.5, 3);
        let path = PlanarPath::injected(1e-4, vec![Point2::new(3.0, 3.0), Point2::new(3.1, 3.0)]).unwrap();
        let rep = perfect_point_test(&path, x, 3, 0.5, &s).unwrap();
        assert!(!rep.passed);
        assert!(rep.counts.iter().all(|&(_, h, t)| h == 0 && t == 0));
    }

    #[test]
    fn mismatched_schedule_rejected() {
        let s = sched(0.5, 3);
        let p = PlanarPath::injected(1e-4, vec![Point2::ORIGIN]).unwrap();
        assert!(perfect_point_test(&p, Point2::ORIGIN, 3, 1.0, &s).is_err());
        assert!(perfect_point_test(&p, Point2::ORIGIN, 4, 0.5, &s).is_err());
        let rep = perfect_point_test(&p, Point2::ORIGIN, 3, 0.5, &s).unwrap();
        assert!(rep.incomplete);
    }

    #[test]
    fn brownian_pass_frequency_falls_with_a() {
        // n = 2 keeps the finest radius ε₂ = 1/64 above 4·sqrt(dt).
        let dt = 1.5e-5;
        let freq = |a: f64| {
            let s = sched(a, 2);
            let mut pass = 0;
            let mut total = 0;
            for i in 0..100u64 {
                let path = simulate_bm_from(mix(77, i), dt, Point2::ORIGIN, Stop::ExitRadius(2.3)).unwrap();
                for j in 0..30u64 {
                    let u = crate::rng::splitmix64(mix(i, j));
                    let x = Point2::new(
                        0.125 * (1.0 + (u >> 40) as f64 / (1u64 << 24) as f64),
                        0.125 * (1.0 + (u & 0xff_ffff) as f64 / (1u64 << 24) as f64),
                    );
                    pass += u32::from(perfect_point_test(&path, x, 2, a, &s).unwrap().passed);
                    total += 1;
                }
            }
            f64::from(pass) / f64::from(total)
        };
        let low = freq(0.5);
        let high = freq(1.0);
        assert!(low > 0.0);
        assert!(high < low, "{low} {high}");
    }

    #[test]
    fn admissibility_contracts() {
        let n = 1u64 << 14;
        let a = simulate_srw(1, n, LatticePoint::ORIGIN);
        let b = simulate_srw(2, n, LatticePoint::ORIGIN);
        let far = LatticePoint::new(100_000, 0);
        assert!(!admissible_test(&a, &b, far, n, 0.04, 1.0, 0.5).unwrap().admissible);
        assert!(admissible_test(&a, &b, far, n, 0.5, 1.0, 0.5).unwrap().admissible);
        for seed in 0..10 {
            let a = simulate_srw(mix(5, seed), n, LatticePoint::ORIGIN);
            let b = simulate_srw(mix(6, seed), n, LatticePoint::ORIGIN);
            let z = LatticePoint::new(2, -3);
            let ab = admissible_test(&a, &b, z, n, 0.04, 1.0, 0.3).unwrap();
            let ba = admissible_test(&b, &a, z, n, 0.04, 1.0, 0.3).unwrap();
            assert_eq!(ab.admissible, ba.admissible);
            assert_eq!(ab.round_trips, [ba.round_trips[1], ba.round_trips[0]]);
        }
        assert!(admissible_test(&a, &b, far, n + 1, 0.04, 1.0, 0.5).is_err());
        assert!(admissible_test(&a, &b, far, n, 0.0, 1.0, 0.5).is_err());
    }
}
