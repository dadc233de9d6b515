use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};

/// Parameters of a scale schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScheduleKind {
    /// `ε_k = ε₁ (k!)^{-3}`, `n_k = 3 a k² log k` for `k = 2..=levels`.
    Factorial { eps1: f64, a: f64, levels: u32 },
    /// Lattice annulus `r_n < |z| < R_n` with `k(n) = ⌊(1/2 - δ) log n⌋`
    /// and target `(1 - 2δ) a k(n)²` excursions.
    Lattice { n: u64, delta: f64, big_k: f64, a: f64 },
    /// `ε_{k,j} = ε_k e^{-j/k}` for `j = 0..=⌊3k log(k+1)⌋`, with `ε_k`
    /// from the factorial schedule.
    Geometric { eps1: f64, k: u32 },
}

/// One annulus of a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    /// `k` (factorial and lattice) or `j` (geometric).
    pub index: u32,
    pub inner: f64,
    pub outer: f64,
    /// Target excursion count, when the schedule defines one.
    pub target: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSchedule {
    pub kind: ScheduleKind,
    pub entries: Vec<ScheduleEntry>,
}

/// `ε₁ (k!)^{-3}`.
pub fn factorial_radius(eps1: f64, k: u32) -> f64 {
    (2..=k).fold(eps1, |e, l| e / f64::from(l).powi(3))
}

/// `3 a k² log k`.
pub fn factorial_target(a: f64, k: u32) -> f64 {
    3.0 * a * f64::from(k).powi(2) * f64::from(k).ln()
}

/// `(k(n), r_n, R_n)` for the lattice annulus.
pub fn lattice_radii(n: u64, delta: f64, big_k: f64) -> (u32, f64, f64) {
    let kn = ((0.5 - delta) * (n as f64).ln()).floor().max(0.0) as u32;
    let base = (n as f64 / (2.0 * big_k)).sqrt();
    let r = (1.0 + 3.0 * delta) * (-f64::from(kn)).exp() * base;
    let big_r = (1.0 - 3.0 * delta) * (1.0 - f64::from(kn)).exp() * base;
    (kn, r, big_r)
}

pub fn make_schedule(kind: ScheduleKind) -> Result<ScaleSchedule> {
    let entries = match kind {
        ScheduleKind::Factorial { eps1, a, levels } => {
            check_eps1(eps1)?;
            if !(a > 0.0) {
                return Err(precondition(format!("a must be positive, got {a}")));
            }
            if levels < 2 {
                return Err(precondition(format!("need at least two levels, got {levels}")));
            }
            let mut out = Vec::with_capacity(levels as usize - 1);
            let mut outer = eps1;
            for k in 2..=levels {
                let inner = factorial_radius(eps1, k);
                out.push(ScheduleEntry { index: k, inner, outer, target: Some(factorial_target(a, k)) });
                outer = inner;
            }
            out
        }
        ScheduleKind::Lattice { n, delta, big_k, a } => {
            if n < 2 {
                return Err(precondition(format!("n must be at least 2, got {n}")));
            }
            if !(delta > 0.0 && delta < 1.0 / 22.0) {
                return Err(precondition(format!("δ must lie in (0, 1/22), got {delta}")));
            }
            if !(big_k > 0.0 && a > 0.0) {
                return Err(precondition(format!("K and a must be positive, got K = {big_k}, a = {a}")));
            }
            let (kn, r, big_r) = lattice_radii(n, delta, big_k);
            let target = (1.0 - 2.0 * delta) * a * f64::from(kn).powi(2);
            vec![ScheduleEntry { index: kn, inner: r, outer: big_r, target: Some(target) }]
        }
        ScheduleKind::Geometric { eps1, k } => {
            check_eps1(eps1)?;
            if k < 1 {
                return Err(precondition("k must be at least 1"));
            }
            let base = factorial_radius(eps1, k);
            let jmax = (3.0 * f64::from(k) * f64::from(k + 1).ln()).floor() as u32;
            let mut out = Vec::with_capacity(jmax as usize + 1);
            let mut outer = if k >= 2 { factorial_radius(eps1, k - 1) } else { 1.0 };
            for j in 0..=jmax {
                let inner = base * (-f64::from(j) / f64::from(k)).exp();
                out.push(ScheduleEntry { index: j, inner, outer, target: None });
                outer = inner;
            }
            out
        }
    };
    Ok(ScaleSchedule { kind, entries })
}

fn check_eps1(eps1: f64) -> Result<()> {
    if eps1 > 0.0 && eps1 < 1.0 {
        Ok(())
    } else {
        Err(precondition(format!("ε₁ must lie in (0, 1), got {eps1}")))
    }
}

impl ScaleSchedule {
    pub fn entry(&self, index: u32) -> Option<&ScheduleEntry> {
        self.entries.iter().find(|e| e.index == index)
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.entries.iter().all(|e| e.inner < e.outer) && self.entries.windows(2).all(|w| w[1].inner < w[0].inner)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn factorial_values() {
        let s = make_schedule(ScheduleKind::Factorial { eps1: 0.125, a: 1.0, levels: 6 }).unwrap();
        assert_eq!(s.entry(2).unwrap().inner, 1.0 / 64.0);
        assert!(rel(s.entry(2).unwrap().target.unwrap(), 12.0 * 2f64.ln()) < 1e-15);
        assert!((s.entry(2).unwrap().target.unwrap() - 8.318).abs() < 1e-3);
        for e in &s.entries {
            let kf: f64 = (1..=e.index).map(f64::from).product();
            assert!(rel(e.inner, 0.125 / kf.powi(3)) < 1e-12);
            assert!(rel(e.target.unwrap(), 3.0 * f64::from(e.index).powi(2) * f64::from(e.index).ln()) < 1e-12);
        }
        assert!(s.is_strictly_decreasing());
    }

    #[test]
    fn geometric_values() {
        let s = make_schedule(ScheduleKind::Geometric { eps1: 0.125, k: 3 }).unwrap();
        let eps3 = 0.125 / 216.0;
        assert_eq!(s.entries[0].inner, factorial_radius(0.125, 3));
        assert!(rel(s.entries[0].inner, eps3) < 1e-12);
        assert_eq!(s.entries.len() as u32, (9.0 * 4f64.ln()).floor() as u32 + 1);
        for e in &s.entries {
            assert!(rel(e.inner, eps3 * (-f64::from(e.index) / 3.0).exp()) < 1e-12);
        }
        assert!(s.is_strictly_decreasing());
    }

    #[test]
    fn lattice_values() {
        let (n, delta, big_k) = (1u64 << 20, 0.04, 2.0);
        let s = make_schedule(ScheduleKind::Lattice { n, delta, big_k, a: 0.5 }).unwrap();
        let e = s.entries[0];
        let kn = ((0.5 - delta) * (n as f64).ln()).floor();
        assert_eq!(f64::from(e.index), kn);
        let base = (n as f64 / (2.0 * big_k)).sqrt();
        assert!(rel(e.inner, (1.0 + 3.0 * delta) * (-kn).exp() * base) < 1e-12);
        assert!(rel(e.outer, (1.0 - 3.0 * delta) * (1.0 - kn).exp() * base) < 1e-12);
        assert!(rel(e.target.unwrap(), (1.0 - 2.0 * delta) * 0.5 * kn * kn) < 1e-12);
        assert!(s.is_strictly_decreasing());
    }

    #[test]
    fn parameter_ranges() {
        assert!(make_schedule(ScheduleKind::Factorial { eps1: 1.0, a: 1.0, levels: 3 }).is_err());
        assert!(make_schedule(ScheduleKind::Factorial { eps1: 0.1, a: 0.0, levels: 3 }).is_err());
        assert!(make_schedule(ScheduleKind::Factorial { eps1: 0.1, a: 1.0, levels: 1 }).is_err());
        assert!(make_schedule(ScheduleKind::Lattice { n: 1, delta: 0.01, big_k: 1.0, a: 1.0 }).is_err());
        assert!(make_schedule(ScheduleKind::Lattice { n: 100, delta: 0.05, big_k: 1.0, a: 1.0 }).is_err());
        assert!(make_schedule(ScheduleKind::Lattice { n: 100, delta: 0.01, big_k: 0.0, a: 1.0 }).is_err());
        assert!(make_schedule(ScheduleKind::Geometric { eps1: 0.1, k: 0 }).is_err());
    }
}
