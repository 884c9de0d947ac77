//! ε-SVR on a precomputed kernel, solved by sequential minimal optimization.
//!
//! The dual is posed over 2n box-constrained variables (the α and α* blocks)
//! with the single equality constraint Σ(α − α*) = 0. Each step picks the
//! maximal-violating pair, solves the two-variable subproblem analytically
//! and updates the gradient from two cached kernel rows. The optimizer stops
//! when the KKT gap m(a) − M(a) drops below the tolerance.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::RegressError;
use crate::kernels::{KernelMatrix, KernelProvenance};

/// Curvature floor for the two-variable subproblem.
const TAU: f64 = 1e-12;
/// Curvature below this is treated as a genuinely indefinite kernel.
const CURVATURE_FAIL: f64 = -1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SvrParams {
    /// Box constraint on each dual variable.
    pub c: f64,
    /// Width of the insensitive tube.
    pub epsilon: f64,
    /// Stopping tolerance on the KKT gap.
    pub tol: f64,
    /// Cap on pair updates before the solver reports failure.
    pub max_iter: usize,
}

impl Default for SvrParams {
    fn default() -> Self {
        SvrParams {
            c: 1e3,
            epsilon: 0.01,
            tol: 1e-3,
            max_iter: 1_000_000,
        }
    }
}

impl SvrParams {
    pub fn new(c: f64) -> Self {
        SvrParams {
            c,
            ..SvrParams::default()
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

/// Fitted ε-SVR: signed dual coefficients β_i = α_i − α*_i aligned with
/// `support_ids` (the training record ids; most entries are typically 0).
#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    pub dual_coeffs: Vec<f64>,
    pub bias: f64,
    pub support_ids: Vec<String>,
    pub c: f64,
    pub epsilon: f64,
    pub kernel_provenance: KernelProvenance,
    pub iterations: usize,
    /// KKT gap m(a) − M(a) at exit; at most `tol` on success.
    pub kkt_gap: f64,
}

#[inline]
fn sign(p: usize, n: usize) -> f64 {
    if p < n {
        1.0
    } else {
        -1.0
    }
}

#[inline]
fn idx(p: usize, n: usize) -> usize {
    if p < n {
        p
    } else {
        p - n
    }
}

struct Working {
    n: usize,
    c: f64,
    a: Vec<f64>,
    grad: Vec<f64>,
}

impl Working {
    fn in_up(&self, p: usize) -> bool {
        if sign(p, self.n) > 0.0 {
            self.a[p] < self.c
        } else {
            self.a[p] > 0.0
        }
    }

    fn in_low(&self, p: usize) -> bool {
        if sign(p, self.n) > 0.0 {
            self.a[p] > 0.0
        } else {
            self.a[p] < self.c
        }
    }

    /// (m, argmax over I_up, M, argmin over I_low) of −s_p ∇_p.
    fn violating_pair(&self) -> (f64, Option<usize>, f64, Option<usize>) {
        let mut m = f64::NEG_INFINITY;
        let mut m_at = None;
        let mut mm = f64::INFINITY;
        let mut mm_at = None;
        for p in 0..2 * self.n {
            let v = -sign(p, self.n) * self.grad[p];
            if self.in_up(p) && v > m {
                m = v;
                m_at = Some(p);
            }
            if self.in_low(p) && v < mm {
                mm = v;
                mm_at = Some(p);
            }
        }
        (m, m_at, mm, mm_at)
    }
}

/// Fits an ε-SVR on a precomputed square kernel.
pub fn fit_svr(
    kernel: &KernelMatrix,
    y: &[f64],
    params: &SvrParams,
) -> Result<SvrModel, RegressError> {
    if !kernel.is_square() {
        return Err(RegressError::NotSquare);
    }
    let n = kernel.values.rows();
    if n < 2 {
        return Err(RegressError::TooFewSamples { needed: 2, got: n });
    }
    if y.len() != n {
        return Err(RegressError::LengthMismatch {
            expected: n,
            got: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(RegressError::NonFiniteTarget);
    }
    if !(params.c > 0.0) || !params.c.is_finite() {
        return Err(RegressError::InvalidParam { name: "c" });
    }
    if params.epsilon < 0.0 || !params.epsilon.is_finite() {
        return Err(RegressError::InvalidParam { name: "epsilon" });
    }
    if !(params.tol > 0.0) {
        return Err(RegressError::InvalidParam { name: "tol" });
    }

    let k = &kernel.values;
    let mut w = Working {
        n,
        c: params.c,
        a: vec![0.0; 2 * n],
        grad: (0..2 * n)
            .map(|p| {
                if p < n {
                    params.epsilon - y[p]
                } else {
                    params.epsilon + y[p - n]
                }
            })
            .collect(),
    };

    let mut iterations = 0usize;
    let gap = loop {
        let (m, m_at, mm, mm_at) = w.violating_pair();
        let gap = m - mm;
        if gap <= params.tol || m_at.is_none() || mm_at.is_none() {
            break gap;
        }
        if iterations >= params.max_iter {
            return Err(RegressError::SvrConvergence {
                iterations,
                gap,
            });
        }
        let i = m_at.expect("checked above");
        let j = mm_at.expect("checked above");
        let (ii, jj) = (idx(i, n), idx(j, n));
        let (si, sj) = (sign(i, n), sign(j, n));

        let mut q = k.get(ii, ii) + k.get(jj, jj) - 2.0 * k.get(ii, jj);
        if q < CURVATURE_FAIL {
            return Err(RegressError::NonPsdKernel { curvature: q });
        }
        if q < TAU {
            q = TAU;
        }
        // caps keep both variables inside [0, C]
        let cap_i = if si > 0.0 { params.c - w.a[i] } else { w.a[i] };
        let cap_j = if sj > 0.0 { w.a[j] } else { params.c - w.a[j] };
        let delta = (gap / q).min(cap_i).min(cap_j);

        if delta >= cap_i {
            w.a[i] = if si > 0.0 { params.c } else { 0.0 };
        } else {
            w.a[i] += si * delta;
        }
        if delta >= cap_j {
            w.a[j] = if sj > 0.0 { 0.0 } else { params.c };
        } else {
            w.a[j] -= sj * delta;
        }

        // Δβ at training point ii is +δ, at jj it is −δ
        for p in 0..2 * n {
            let t = idx(p, n);
            w.grad[p] += sign(p, n) * delta * (k.get(t, ii) - k.get(t, jj));
        }
        iterations += 1;
    };

    // bias from the free variables, midpoint of the bounds otherwise
    let mut b_sum = 0.0;
    let mut b_count = 0usize;
    for p in 0..2 * n {
        if w.a[p] > 0.0 && w.a[p] < params.c {
            b_sum += -sign(p, n) * w.grad[p];
            b_count += 1;
        }
    }
    let bias = if b_count > 0 {
        b_sum / b_count as f64
    } else {
        let (m, _, mm, _) = w.violating_pair();
        if m.is_finite() && mm.is_finite() {
            0.5 * (m + mm)
        } else {
            0.0
        }
    };

    let dual_coeffs: Vec<f64> = (0..n).map(|i| w.a[i] - w.a[n + i]).collect();
    Ok(SvrModel {
        dual_coeffs,
        bias,
        support_ids: kernel.row_ids.clone(),
        c: params.c,
        epsilon: params.epsilon,
        kernel_provenance: kernel.provenance.clone(),
        iterations,
        kkt_gap: gap,
    })
}

/// Predictions over a cross kernel (virtual rows × training columns):
/// prediction_j = Σ_i β_i K_cross[j, i] + bias.
pub fn predict_svr(model: &SvrModel, k_cross: &KernelMatrix) -> Result<Vec<f64>, RegressError> {
    if k_cross.col_ids != model.support_ids {
        return Err(RegressError::IdMismatch);
    }
    let mut out = Vec::with_capacity(k_cross.values.rows());
    for j in 0..k_cross.values.rows() {
        let row = k_cross.values.row(j);
        let p: f64 = row
            .iter()
            .zip(&model.dual_coeffs)
            .map(|(k, b)| k * b)
            .sum();
        out.push(p + model.bias);
    }
    Ok(out)
}

/// Dual objective in the signed coefficients:
/// ½βᵀKβ + ε Σ|β| − yᵀβ. Minimized by the optimal β; used to compare the
/// SMO result against an independent QP solve.
pub fn dual_objective(k: &crate::linalg::Mat, y: &[f64], beta: &[f64], epsilon: f64) -> f64 {
    let n = beta.len();
    let mut quad = 0.0;
    for i in 0..n {
        let row = k.row(i);
        let mut acc = 0.0;
        for j in 0..n {
            acc += row[j] * beta[j];
        }
        quad += beta[i] * acc;
    }
    let abs_sum: f64 = beta.iter().map(|b| if *b < 0.0 { -b } else { *b }).sum();
    let y_dot: f64 = y.iter().zip(beta).map(|(a, b)| a * b).sum();
    0.5 * quad + epsilon * abs_sum - y_dot
}

impl SvrModel {
    /// Recomputes the KKT gap of the stored coefficients on a kernel/target
    /// pair. Zero at exact optimality; at most `tol` after a successful fit.
    pub fn kkt_residual(&self, kernel: &KernelMatrix, y: &[f64]) -> Result<f64, RegressError> {
        if !kernel.is_square() || kernel.row_ids != self.support_ids {
            return Err(RegressError::IdMismatch);
        }
        let n = y.len();
        if n != self.dual_coeffs.len() {
            return Err(RegressError::LengthMismatch {
                expected: self.dual_coeffs.len(),
                got: n,
            });
        }
        // rebuild the 2n-variable view: α = max(β, 0), α* = max(−β, 0)
        let mut a = vec![0.0; 2 * n];
        for i in 0..n {
            if self.dual_coeffs[i] > 0.0 {
                a[i] = self.dual_coeffs[i];
            } else {
                a[n + i] = -self.dual_coeffs[i];
            }
        }
        let kb: Vec<f64> = (0..n)
            .map(|i| {
                kernel
                    .values
                    .row(i)
                    .iter()
                    .zip(&self.dual_coeffs)
                    .map(|(k, b)| k * b)
                    .sum()
            })
            .collect();
        let mut m = f64::NEG_INFINITY;
        let mut mm = f64::INFINITY;
        for p in 0..2 * n {
            let i = idx(p, n);
            let s = sign(p, n);
            let grad = s * kb[i] + self.epsilon - s * y[i];
            let v = -s * grad;
            let up = if s > 0.0 { a[p] < self.c } else { a[p] > 0.0 };
            let low = if s > 0.0 { a[p] > 0.0 } else { a[p] < self.c };
            if up && v > m {
                m = v;
            }
            if low && v < mm {
                mm = v;
            }
        }
        Ok((m - mm).max(0.0))
    }
}
