use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::{c_beta, check_beta};
use crate::error::{precondition, Error, Result};
use crate::paths::Point2;

const MAX_ITERATIONS: usize = 100_000;
const RAYLEIGH_TOL: f64 = 1e-10;

/// Quadrature discretization of `f ↦ ∫_{D(0,1)} u⁰(x - y) f(y) dy`.
///
/// Cells are the squares of side `h` of the grid `h·Z²` shifted by `h/2`,
/// kept when their centre lies in the open unit disc. Off-diagonal entries
/// are `u⁰(x_i - x_j) h²`; the diagonal uses the mean of `u⁰` over the
/// disc of area `h²`, which is `c_β (2/β) h_eq^{β-2}` with `h_eq = h/√π`.
pub struct NystromOperator {
    beta: f64,
    h: f64,
    c: f64,
    /// Grid coordinates `(i, j)` of the kept cells.
    cells: Vec<(usize, usize)>,
    diagonal: f64,
    pad: usize,
    kernel_hat: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for NystromOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NystromOperator")
            .field("beta", &self.beta)
            .field("h", &self.h)
            .field("cells", &self.cells.len())
            .finish()
    }
}

impl NystromOperator {
    pub fn new(beta: f64, h: f64) -> Result<Self> {
        check_beta(beta)?;
        if !(h > 0.0 && h < 1.0) {
            return Err(precondition(format!("cell side must lie in (0, 1), got {h}")));
        }
        let c = c_beta(beta)?;
        let side = (2.0 / h).ceil() as usize;
        let coord = |i: usize| -1.0 + (i as f64 + 0.5) * h;
        let mut cells = Vec::new();
        for i in 0..side {
            for j in 0..side {
                let (x, y) = (coord(i), coord(j));
                if x * x + y * y < 1.0 {
                    cells.push((i, j));
                }
            }
        }
        if cells.len() < 100 {
            return Err(precondition(format!("only {} cells inside the disc; need at least 100", cells.len())));
        }
        let h_eq = h / PI.sqrt();
        let diagonal = c * (2.0 / beta) * h_eq.powf(beta - 2.0) * h * h;

        let pad = (2 * side).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(pad);
        let inv = planner.plan_fft_inverse(pad);
        // Kernel by grid offset, wrapped into the padded torus.
        let mut kernel: Vec<Complex64> = (0..pad * pad)
            .into_par_iter()
            .map(|idx| {
                let (a, b) = (idx / pad, idx % pad);
                let di = if a < pad / 2 { a as f64 } else { a as f64 - pad as f64 };
                let dj = if b < pad / 2 { b as f64 } else { b as f64 - pad as f64 };
                let v = if a == 0 && b == 0 {
                    diagonal
                } else {
                    c * (h * di).hypot(h * dj).powf(beta - 2.0) * h * h
                };
                Complex64::new(v, 0.0)
            })
            .collect();
        fft2(&mut kernel, pad, &*fwd);
        Ok(Self { beta, h, c, cells, diagonal, pad, kernel_hat: kernel, fwd, inv })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn cell_side(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn center(&self, i: usize) -> Point2 {
        let (a, b) = self.cells[i];
        Point2::new(-1.0 + (a as f64 + 0.5) * self.h, -1.0 + (b as f64 + 0.5) * self.h)
    }

    /// Matrix entry `A_ij` evaluated from the cell centres.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diagonal;
        }
        self.c * (self.center(i) - self.center(j)).norm().powf(self.beta - 2.0) * self.h * self.h
    }

    /// `max |A_ij - A_ji|` over all pairs.
    pub fn max_asymmetry(&self) -> f64 {
        (0..self.len())
            .into_par_iter()
            .map(|i| (0..i).map(|j| (self.entry(i, j) - self.entry(j, i)).abs()).fold(0.0, f64::max))
            .reduce(|| 0.0, f64::max)
    }

    /// Smallest entry over all pairs.
    pub fn min_entry(&self) -> f64 {
        (0..self.len())
            .into_par_iter()
            .map(|i| (0..self.len()).map(|j| self.entry(i, j)).fold(f64::INFINITY, f64::min))
            .reduce(|| f64::INFINITY, f64::min)
    }

    /// `A v` by zero-padded FFT convolution.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.len(), "vector length must match the cell count");
        let pad = self.pad;
        let mut buf = vec![Complex64::new(0.0, 0.0); pad * pad];
        for (&(a, b), &x) in self.cells.iter().zip(v) {
            buf[a * pad + b] = Complex64::new(x, 0.0);
        }
        fft2(&mut buf, pad, &*self.fwd);
        for (z, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *z *= k;
        }
        fft2(&mut buf, pad, &*self.inv);
        let norm = 1.0 / (pad * pad) as f64;
        self.cells.iter().map(|&(a, b)| buf[a * pad + b].re * norm).collect()
    }

    /// Dense `A v`, for cross-checking [`apply`](Self::apply).
    pub fn apply_dense(&self, v: &[f64]) -> Vec<f64> {
        (0..self.len()).into_par_iter().map(|i| (0..self.len()).map(|j| self.entry(i, j) * v[j]).sum()).collect()
    }
}

/// In-place 2D transform of a row-major `n × n` buffer.
fn fft2(buf: &mut [Complex64], n: usize, fft: &dyn Fft<f64>) {
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = buf[i * n + j];
        }
        fft.process_with_scratch(&mut col, &mut scratch);
        for i in 0..n {
            buf[i * n + j] = col[i];
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaEstimate {
    pub beta: f64,
    pub h: f64,
    pub cells: usize,
    pub lambda: f64,
    pub iterations: usize,
    /// `‖A v - Λ v‖ / ‖v‖` at the returned vector.
    pub residual: f64,
    pub rayleigh: Vec<f64>,
}

/// Largest eigenvalue of the Nyström matrix by power iteration from the
/// all-ones vector.
pub fn lambda_beta(beta: f64, h: f64) -> Result<LambdaEstimate> {
    let op = NystromOperator::new(beta, h)?;
    power_iteration(&op)
}

pub(crate) fn power_iteration(op: &NystromOperator) -> Result<LambdaEstimate> {
    let n = op.len();
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut av = op.apply(&v);
    let mut history = Vec::new();
    let mut prev = f64::NAN;
    for it in 1..=MAX_ITERATIONS {
        let q: f64 = v.iter().zip(&av).map(|(a, b)| a * b).sum();
        history.push(q);
        let norm = av.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (q - prev).abs() < RAYLEIGH_TOL {
            let residual = av.iter().zip(&v).map(|(a, b)| (a - q * b).powi(2)).sum::<f64>().sqrt();
            return Ok(LambdaEstimate {
                beta: op.beta,
                h: op.h,
                cells: n,
                lambda: q,
                iterations: it,
                residual,
                rayleigh: history,
            });
        }
        prev = q;
        v = av.iter().map(|x| x / norm).collect();
        av = op.apply(&v);
    }
    let k = history.len();
    Err(Error::NonConvergence { iterations: MAX_ITERATIONS, last_change: (history[k - 1] - history[k - 2]).abs() })
}
