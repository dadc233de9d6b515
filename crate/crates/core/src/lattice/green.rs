use std::collections::BTreeMap;

use rustc_hash::FxHashMap;

use super::walk::{exit_from, StepSource};
use super::{LatticeDisc, LatticePoint};
use crate::error::{precondition, Error, Result};
use crate::rng::replica_rng;

const NO_NEIGHBOR: u32 = u32::MAX;

/// Solver settings for [`lattice_green_exact`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenOptions {
    /// Largest admissible number of interior points.
    pub point_budget: usize,
    /// Domains up to this size get every column by a direct dense solve.
    pub dense_limit: usize,
    /// Target max-norm residual of each solved column.
    pub tolerance: f64,
}

impl Default for GreenOptions {
    fn default() -> Self {
        Self { point_budget: 100_000, dense_limit: 1024, tolerance: 1e-10 }
    }
}

/// Green's function of the simple random walk killed on leaving `D_0(R)`.
///
/// `G(x, y)` is the expected number of visits to `y` before exit, started
/// at `x`. Small domains are solved in full; larger ones keep only the
/// source columns that were requested (the origin is always solved).
#[derive(Debug, Clone)]
pub struct LatticeGreen {
    radius: f64,
    domain: Vec<LatticePoint>,
    index: FxHashMap<LatticePoint, usize>,
    neighbors: Vec<[u32; 4]>,
    columns: BTreeMap<usize, Vec<f64>>,
    tolerance: f64,
}

/// Solves the Dirichlet problem on `D_0(radius)` with default options.
pub fn lattice_green_exact(radius: f64) -> Result<LatticeGreen> {
    LatticeGreen::solve(radius, GreenOptions::default())
}

impl LatticeGreen {
    pub fn solve(radius: f64, opts: GreenOptions) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(precondition(format!("radius must be positive, got {radius}")));
        }
        let disc = LatticeDisc::centered(radius);
        // Cheap area estimate before enumerating.
        let approx = std::f64::consts::PI * radius * radius;
        if approx > 1.1 * opts.point_budget as f64 + 100.0 {
            return Err(Error::Capacity(format!(
                "D_0({radius}) has about {approx:.0} points, budget is {}",
                opts.point_budget
            )));
        }
        let domain = disc.interior_points();
        if domain.len() > opts.point_budget {
            return Err(Error::Capacity(format!(
                "D_0({radius}) has {} points, budget is {}",
                domain.len(),
                opts.point_budget
            )));
        }
        let index: FxHashMap<_, _> = domain.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let neighbors = domain
            .iter()
            .map(|p| p.neighbors().map(|q| index.get(&q).map_or(NO_NEIGHBOR, |&j| j as u32)))
            .collect();
        let mut green = Self { radius, domain, index, neighbors, columns: BTreeMap::new(), tolerance: opts.tolerance };
        if green.domain.len() <= opts.dense_limit {
            green.solve_dense();
        } else {
            green.add_source(LatticePoint::ORIGIN)?;
        }
        Ok(green)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Interior points of `D_0(R)` in row-major order.
    pub fn domain(&self) -> &[LatticePoint] {
        &self.domain
    }

    pub fn index_of(&self, p: LatticePoint) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn has_full_matrix(&self) -> bool {
        self.columns.len() == self.domain.len()
    }

    /// Solves for the column `G(·, y)` if not already known.
    pub fn add_source(&mut self, y: LatticePoint) -> Result<()> {
        let Some(j) = self.index_of(y) else {
            return Err(precondition(format!("{y:?} is not inside D_0({})", self.radius)));
        };
        if !self.columns.contains_key(&j) {
            let col = self.solve_cg(j)?;
            self.columns.insert(j, col);
        }
        Ok(())
    }

    /// `G(x, y)`; zero when either point lies outside the domain.
    pub fn value(&self, x: LatticePoint, y: LatticePoint) -> Result<f64> {
        let (Some(i), Some(j)) = (self.index_of(x), self.index_of(y)) else {
            return Ok(0.0);
        };
        if let Some(col) = self.columns.get(&j) {
            return Ok(col[i]);
        }
        // Symmetry lets a solved row stand in for the column.
        if let Some(col) = self.columns.get(&i) {
            return Ok(col[j]);
        }
        Err(precondition(format!("column for source {y:?} has not been solved")))
    }

    /// `G(0, 0)`.
    pub fn origin_value(&self) -> f64 {
        let j = self.index[&LatticePoint::ORIGIN];
        self.columns[&j][j]
    }

    /// Solved source columns, keyed by domain index.
    pub fn columns(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.columns.iter().map(|(&j, c)| (j, c.as_slice()))
    }

    /// Max-norm residual of `(I - P)G(·, y) = e_y` over the solved columns.
    pub fn max_residual(&self) -> f64 {
        self.columns.iter().map(|(&j, col)| self.column_residual(j, col)).fold(0.0, f64::max)
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        for (i, nb) in self.neighbors.iter().enumerate() {
            let s: f64 = nb.iter().filter(|&&k| k != NO_NEIGHBOR).map(|&k| v[k as usize]).sum();
            out[i] = v[i] - 0.25 * s;
        }
    }

    fn column_residual(&self, j: usize, col: &[f64]) -> f64 {
        let mut av = vec![0.0; col.len()];
        self.apply(col, &mut av);
        av.iter()
            .enumerate()
            .map(|(i, &a)| (a - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max)
    }

    fn solve_dense(&mut self) {
        let n = self.domain.len();
        // I - P is symmetric positive definite; factor it once.
        let mut a = vec![0.0; n * n];
        for (i, nb) in self.neighbors.iter().enumerate() {
            a[i * n + i] = 1.0;
            for &k in nb.iter().filter(|&&k| k != NO_NEIGHBOR) {
                a[i * n + k as usize] = -0.25;
            }
        }
        let l = cholesky(&a, n);
        for j in 0..n {
            let mut rhs = vec![0.0; n];
            rhs[j] = 1.0;
            let col = cholesky_solve(&l, n, rhs);
            self.columns.insert(j, col);
        }
    }

    fn solve_cg(&self, j: usize) -> Result<Vec<f64>> {
        let n = self.domain.len();
        let mut x = vec![0.0; n];
        let mut r = vec![0.0; n];
        r[j] = 1.0;
        let mut p = r.clone();
        let mut ap = vec![0.0; n];
        let mut rr: f64 = 1.0;
        // Conjugate gradients converge in O(R log 1/tol) iterations here;
        // the cap is far above that.
        let max_iter = 20 * n + 100;
        let target = 1e-2 * self.tolerance;
        for _ in 0..max_iter {
            self.apply(&p, &mut ap);
            let alpha = rr / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_new = dot(&r, &r);
            if r.iter().fold(0.0f64, |m, v| m.max(v.abs())) < target {
                // Confirm against the true residual, not the recurrence.
                if self.column_residual(j, &x) < self.tolerance {
                    return Ok(x);
                }
            }
            let beta = rr_new / rr;
            rr = rr_new;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
        }
        Err(Error::NonConvergence { iterations: max_iter, last_change: rr.sqrt() })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cholesky(a: &[f64], n: usize) -> Vec<f64> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    l
}

fn cholesky_solve(l: &[f64], n: usize, mut b: Vec<f64>) -> Vec<f64> {
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= l[k * n + i] * b[k];
        }
        b[i] = s / l[i * n + i];
    }
    b
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// The moment formula `k! G_R(0,0)^k` for visits to the origin before exit.
pub fn kac_moment_lattice(radius: f64, k: u32) -> Result<f64> {
    if !(1..=2).contains(&k) {
        return Err(precondition(format!("k must be 1 or 2, got {k}")));
    }
    let g = lattice_green_exact(radius)?.origin_value();
    Ok(factorial(k) * g.powi(k as i32))
}

/// Exact moments of the visit count, which is geometric on {1, 2, ...}
/// with mean `g`: `E V = g`, `E V² = 2g² - g`, `E V³ = 6g³ - 6g² + g`.
pub fn geometric_visit_moment(g: f64, k: u32) -> Result<f64> {
    match k {
        1 => Ok(g),
        2 => Ok(2.0 * g * g - g),
        3 => Ok(6.0 * g.powi(3) - 6.0 * g * g + g),
        _ => Err(precondition(format!("k must be 1, 2 or 3, got {k}"))),
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl Estimate {
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let stderr = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr, samples: xs.len() as u64 }
    }
}

/// Monte Carlo estimate of `P^z(T_0 < T_{∂D_0(R)})`.
///
/// Starts cycle through the points of `∂D_0(r)`, the lattice circle just
/// outside radius `r`; replica `i` uses start `i mod |∂D_0(r)|`. `r = 0`
/// means starting at the origin, which has probability one.
pub fn hitting_prob_zero(radius: f64, r: f64, replicas: u64, seed: u64) -> Result<Estimate> {
    if replicas == 0 {
        return Err(precondition("replicas must be at least 1"));
    }
    let starts = if r == 0.0 {
        vec![LatticePoint::ORIGIN]
    } else {
        if !(1.0..radius).contains(&r) {
            return Err(precondition(format!("need 1 <= r < R, got r = {r}, R = {radius}")));
        }
        let mut b = LatticeDisc::centered(r).boundary_points();
        let outer = LatticeDisc::centered(radius);
        b.retain(|&z| outer.contains(z));
        b
    };
    if starts.is_empty() {
        return Err(precondition(format!("no lattice start points for r = {r} inside D_0({radius})")));
    }
    let hits: Vec<f64> = (0..replicas)
        .map(|i| {
            let z = starts[(i % starts.len() as u64) as usize];
            let mut steps = StepSource::from_rng(replica_rng(seed, i));
            f64::from(u8::from(hits_origin_first(&mut steps, radius, z)))
        })
        .collect();
    Ok(Estimate::from_samples(&hits))
}

fn hits_origin_first(steps: &mut StepSource, radius: f64, start: LatticePoint) -> bool {
    let r2 = radius * radius;
    let mut p = start;
    loop {
        if p == LatticePoint::ORIGIN {
            return true;
        }
        if (p.norm2() as f64) >= r2 {
            return false;
        }
        p = p.offset(steps.next_step());
    }
}

/// Visits to the origin before leaving `D_0(R)` for `replicas` walks from 0.
pub fn origin_visit_samples(radius: f64, replicas: u64, seed: u64) -> Vec<u64> {
    (0..replicas)
        .map(|i| {
            let mut steps = StepSource::from_rng(replica_rng(seed, i));
            exit_from(&mut steps, radius, LatticePoint::ORIGIN).visits_to_origin
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: Gaussian elimination on the raw visit equations
    /// `G(x,y) = δ_xy + ¼ Σ_{x'~x} G(x',y)`, built by brute-force adjacency
    /// search over the enumerated domain.
    fn brute_force_green(radius: f64) -> (Vec<LatticePoint>, Vec<Vec<f64>>) {
        let r2 = radius * radius;
        let mut pts = Vec::new();
        let m = radius.ceil() as i32;
        for x in -m..=m {
            for y in -m..=m {
                if ((x * x + y * y) as f64) < r2 {
                    pts.push(LatticePoint::new(x, y));
                }
            }
        }
        let n = pts.len();
        let mut cols = Vec::new();
        for src in 0..n {
            let mut a = vec![vec![0.0f64; n + 1]; n];
            for i in 0..n {
                a[i][i] = 1.0;
                for j in 0..n {
                    let d = (pts[i].x - pts[j].x).abs() + (pts[i].y - pts[j].y).abs();
                    if d == 1 {
                        a[i][j] -= 0.25;
                    }
                }
                a[i][n] = if i == src { 1.0 } else { 0.0 };
            }
            for c in 0..n {
                let piv = (c..n).max_by(|&p, &q| a[p][c].abs().total_cmp(&a[q][c].abs())).unwrap();
                a.swap(c, piv);
                for r in 0..n {
                    if r != c {
                        let f = a[r][c] / a[c][c];
                        for k in c..=n {
                            a[r][k] -= f * a[c][k];
                        }
                    }
                }
            }
            cols.push((0..n).map(|i| a[i][n] / a[i][i]).collect());
        }
        (pts, cols)
    }

    #[test]
    fn unit_radius_green_is_one() {
        let g = lattice_green_exact(1.0).unwrap();
        assert_eq!(g.domain().len(), 1);
        assert_eq!(g.origin_value(), 1.0);
        assert_eq!(kac_moment_lattice(1.0, 1).unwrap(), 1.0);
        assert_eq!(kac_moment_lattice(1.0, 2).unwrap(), 2.0);
    }

    #[test]
    fn radius_two_matches_brute_force() {
        let g = lattice_green_exact(2.0).unwrap();
        let (pts, cols) = brute_force_green(2.0);
        assert_eq!(pts.len(), 9);
        for (j, &y) in pts.iter().enumerate() {
            for (i, &x) in pts.iter().enumerate() {
                assert!((g.value(x, y).unwrap() - cols[j][i]).abs() < 1e-13);
            }
        }
        // Frozen from the brute-force oracle; by hand, the symmetric
        // reduction c = 1 + e, e = (c + 2k)/4, k = e/2 gives c = 3/2.
        assert!((g.origin_value() - 1.5).abs() < 1e-13);
    }

    #[test]
    fn cg_agrees_with_dense_solve() {
        let dense = lattice_green_exact(12.0).unwrap();
        assert!(dense.has_full_matrix());
        let sparse = LatticeGreen::solve(12.0, GreenOptions { dense_limit: 0, ..Default::default() }).unwrap();
        assert!(!sparse.has_full_matrix());
        assert!((dense.origin_value() - sparse.origin_value()).abs() < 1e-10);
        let mut sparse = sparse;
        let y = LatticePoint::new(3, -5);
        sparse.add_source(y).unwrap();
        for &x in dense.domain() {
            assert!((dense.value(x, y).unwrap() - sparse.value(x, y).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn harmonicity_and_symmetry() {
        for radius in [3.0, 7.5, 15.2] {
            let g = lattice_green_exact(radius).unwrap();
            assert!(g.max_residual() < 1e-10);
            let dom = g.domain();
            for &y in dom {
                for &x in dom {
                    let gxy = g.value(x, y).unwrap();
                    assert!(gxy >= 0.0);
                    assert!((gxy - g.value(y, x).unwrap()).abs() < 1e-9);
                    let s: f64 = x.neighbors().iter().map(|&n| g.value(n, y).unwrap()).sum();
                    let expect = if x == y { 1.0 } else { 0.0 } + 0.25 * s;
                    assert!((gxy - expect).abs() < 1e-10);
                }
            }
        }
        let big = lattice_green_exact(60.0).unwrap();
        assert!(big.max_residual() < 1e-10);
    }

    #[test]
    fn budget_is_enforced() {
        let opts = GreenOptions { point_budget: 100, ..Default::default() };
        assert!(matches!(LatticeGreen::solve(20.0, opts), Err(Error::Capacity(_))));
        assert!(matches!(lattice_green_exact(400.0), Err(Error::Capacity(_))));
    }

    #[test]
    fn kac_k1_identity() {
        let g = lattice_green_exact(50.0).unwrap().origin_value();
        assert_eq!(kac_moment_lattice(50.0, 1).unwrap(), g);
        assert!(kac_moment_lattice(50.0, 3).is_err());
    }

    #[test]
    fn geometric_moments_match_series() {
        for g in [1.0, 1.5, 4.0] {
            let q: f64 = 1.0 - 1.0 / g;
            for k in 1..=3u32 {
                let series: f64 = (1..20_000)
                    .map(|j: i32| f64::from(j).powi(k as i32) * q.powi(j - 1) / g)
                    .sum();
                assert!((geometric_visit_moment(g, k).unwrap() - series).abs() < 1e-8 * series);
            }
        }
    }

    #[test]
    fn radius_two_mean_visits() {
        let g = lattice_green_exact(2.0).unwrap().origin_value();
        let v: Vec<f64> = origin_visit_samples(2.0, 100_000, 99).into_iter().map(|v| v as f64).collect();
        let est = Estimate::from_samples(&v);
        assert!((est.mean - g).abs() < 3.0 * est.stderr, "{est:?} vs {g}");
    }

    #[test]
    fn hitting_from_origin_is_certain() {
        let est = hitting_prob_zero(10.0, 0.0, 50, 1).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn hitting_near_boundary_is_small() {
        let est = hitting_prob_zero(40.0, 39.0, 20_000, 2).unwrap();
        let leading = (40.0f64 / 39.0).ln() / 40.0f64.ln();
        assert!(est.mean < 0.05, "{est:?}");
        assert!(est.mean > 0.0);
        assert!(leading < 0.01);
    }

    #[test]
    fn hitting_rejects_bad_radii() {
        assert!(hitting_prob_zero(10.0, 10.0, 5, 1).is_err());
        assert!(hitting_prob_zero(10.0, 0.5, 5, 1).is_err());
        assert!(hitting_prob_zero(10.0, 5.0, 0, 1).is_err());
    }
}
