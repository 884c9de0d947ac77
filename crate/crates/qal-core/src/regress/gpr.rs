//! Gaussian process regression with the analytic posterior. The training
//! kernel is regularized as K + σ²_reg I, factorized once by Cholesky, and
//! predictions reuse the stored factor through triangular solves.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::string::String;
use alloc::vec::Vec;

use super::{RegressError, UncertaintyEstimate, UncertaintyMethod};
use crate::kernels::{KernelMatrix, KernelProvenance};
use crate::linalg::{cholesky, solve_lower, solve_lower_transpose, LinalgError, Mat};

/// Diagonal bump applied once by [`fit_gpr_jittered`] when the regularized
/// kernel fails to factorize.
pub const GPR_JITTER: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct GprModel {
    /// Lower-triangular factor of K + σ²_reg I (+ jitter, when applied).
    pub cholesky_factor: Mat,
    /// (K + σ²_reg I)⁻¹ y, computed via the triangular solves.
    pub alpha: Vec<f64>,
    pub train_targets: Vec<f64>,
    pub sigma_reg: f64,
    pub train_ids: Vec<String>,
    pub kernel_provenance: KernelProvenance,
    /// Diagonal jitter that was added on top of σ²_reg (0 when none).
    pub jitter: f64,
}

fn check_fit_inputs(kernel: &KernelMatrix, y: &[f64], sigma_reg: f64) -> Result<usize, RegressError> {
    if !kernel.is_square() {
        return Err(RegressError::NotSquare);
    }
    let n = kernel.values.rows();
    if n == 0 {
        return Err(RegressError::EmptyInput);
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
    if sigma_reg < 0.0 || !sigma_reg.is_finite() {
        return Err(RegressError::InvalidParam { name: "sigma_reg" });
    }
    Ok(n)
}

fn fit_with_diag(
    kernel: &KernelMatrix,
    y: &[f64],
    sigma_reg: f64,
    extra: f64,
) -> Result<GprModel, LinalgError> {
    let n = kernel.values.rows();
    let mut a = kernel.values.clone();
    let bump = sigma_reg * sigma_reg + extra;
    for i in 0..n {
        a.set(i, i, a.get(i, i) + bump);
    }
    let l = cholesky(&a)?;
    let z = solve_lower(&l, y);
    let alpha = solve_lower_transpose(&l, &z);
    Ok(GprModel {
        cholesky_factor: l,
        alpha,
        train_targets: y.to_vec(),
        sigma_reg,
        train_ids: kernel.row_ids.clone(),
        kernel_provenance: kernel.provenance.clone(),
        jitter: extra,
    })
}

/// Fits a GP posterior on K + σ²_reg I. Fails when the regularized kernel is
/// not positive definite; the error advises adding jitter (see
/// [`fit_gpr_jittered`]).
pub fn fit_gpr(kernel: &KernelMatrix, y: &[f64], sigma_reg: f64) -> Result<GprModel, RegressError> {
    check_fit_inputs(kernel, y, sigma_reg)?;
    fit_with_diag(kernel, y, sigma_reg, 0.0).map_err(|_| RegressError::NotPositiveDefinite)
}

/// [`fit_gpr`] with one automatic retry: on a Cholesky failure a diagonal
/// jitter of 1e-10 is added once and recorded in the model before giving up.
pub fn fit_gpr_jittered(
    kernel: &KernelMatrix,
    y: &[f64],
    sigma_reg: f64,
) -> Result<GprModel, RegressError> {
    check_fit_inputs(kernel, y, sigma_reg)?;
    match fit_with_diag(kernel, y, sigma_reg, 0.0) {
        Ok(m) => Ok(m),
        Err(_) => fit_with_diag(kernel, y, sigma_reg, GPR_JITTER)
            .map_err(|_| RegressError::NotPositiveDefinite),
    }
}

impl GprModel {
    /// Posterior mean at the cross-kernel rows.
    pub fn predict_mean(&self, k_cross: &KernelMatrix) -> Result<Vec<f64>, RegressError> {
        if k_cross.col_ids != self.train_ids {
            return Err(RegressError::IdMismatch);
        }
        Ok((0..k_cross.values.rows())
            .map(|j| {
                k_cross
                    .values
                    .row(j)
                    .iter()
                    .zip(&self.alpha)
                    .map(|(k, a)| k * a)
                    .sum()
            })
            .collect())
    }
}

/// Posterior mean and standard deviation: μ_j = k_*ᵀα and
/// σ_j² = k(x_j, x_j) − ‖L⁻¹k_*‖², clamped at zero.
pub fn predict_gpr(
    model: &GprModel,
    k_cross: &KernelMatrix,
    k_diag_test: &[f64],
) -> Result<UncertaintyEstimate, RegressError> {
    if k_cross.col_ids != model.train_ids {
        return Err(RegressError::IdMismatch);
    }
    let m = k_cross.values.rows();
    if k_diag_test.len() != m {
        return Err(RegressError::LengthMismatch {
            expected: m,
            got: k_diag_test.len(),
        });
    }
    let mut mu = Vec::with_capacity(m);
    let mut sigma = Vec::with_capacity(m);
    for j in 0..m {
        let row = k_cross.values.row(j);
        mu.push(row.iter().zip(&model.alpha).map(|(k, a)| k * a).sum());
        let v = solve_lower(&model.cholesky_factor, row);
        let reduction: f64 = v.iter().map(|x| x * x).sum();
        let var = (k_diag_test[j] - reduction).max(0.0);
        sigma.push(var.sqrt());
    }
    Ok(UncertaintyEstimate {
        mu,
        sigma,
        method: UncertaintyMethod::GprAnalytic,
        resamples: 0,
    })
}
