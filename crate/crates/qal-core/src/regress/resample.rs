//! Resampling-based epistemic uncertainty: K-fold cross-validation and the
//! non-parametric bootstrap. Each resample trains one surrogate and predicts
//! every virtual point; μ is the mean over resamples and σ the sample
//! standard deviation (denominator K−1).

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    fit_gpr_jittered, fit_svr, predict_svr, RegressError, SvrParams, UncertaintyEstimate,
    UncertaintyMethod,
};
use crate::kernels::KernelMatrix;

/// Consecutive fit failures tolerated while redrawing a bootstrap resample.
const BOOTSTRAP_RETRY_CAP: usize = 50;

/// The surrogate family a resampling loop trains on each split.
#[derive(Debug, Clone, PartialEq)]
pub enum SurrogateKind {
    Svr(SvrParams),
    Gpr { sigma_reg: f64 },
}

impl SurrogateKind {
    /// Fits on the training sub-kernel and predicts the cross-kernel rows
    /// (mean prediction only; resampling spread provides the σ).
    pub fn fit_predict(
        &self,
        k_train: &KernelMatrix,
        y: &[f64],
        k_cross: &KernelMatrix,
    ) -> Result<Vec<f64>, RegressError> {
        match self {
            SurrogateKind::Svr(params) => {
                let model = fit_svr(k_train, y, params)?;
                predict_svr(&model, k_cross)
            }
            SurrogateKind::Gpr { sigma_reg } => {
                let model = fit_gpr_jittered(k_train, y, *sigma_reg)?;
                model.predict_mean(k_cross)
            }
        }
    }
}

/// Disjoint fold index sets after a seeded shuffle of 0..n. The first
/// `n % folds` folds take one extra element.
pub fn kfold_indices(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    let base = n / folds;
    let extra = n % folds;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0usize;
    for f in 0..folds {
        let len = base + usize::from(f < extra);
        out.push(idx[start..start + len].to_vec());
        start += len;
    }
    out
}

fn spread(predictions: &[Vec<f64>], n_virtual: usize) -> (Vec<f64>, Vec<f64>) {
    let p = predictions.len() as f64;
    let mut mu = vec![0.0; n_virtual];
    for row in predictions {
        for (m, v) in mu.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in mu.iter_mut() {
        *m /= p;
    }
    let mut sigma = vec![0.0; n_virtual];
    if predictions.len() > 1 {
        for row in predictions {
            for (s, (v, m)) in sigma.iter_mut().zip(row.iter().zip(&mu)) {
                let d = v - m;
                *s += d * d;
            }
        }
        for s in sigma.iter_mut() {
            *s = (*s / (p - 1.0)).sqrt();
        }
    }
    (mu, sigma)
}

fn check_resample_inputs(
    k_obs: &KernelMatrix,
    y: &[f64],
    k_cross: &KernelMatrix,
) -> Result<(usize, usize), RegressError> {
    if !k_obs.is_square() {
        return Err(RegressError::NotSquare);
    }
    let n = k_obs.values.rows();
    if y.len() != n {
        return Err(RegressError::LengthMismatch {
            expected: n,
            got: y.len(),
        });
    }
    if k_cross.col_ids != k_obs.col_ids {
        return Err(RegressError::IdMismatch);
    }
    Ok((n, k_cross.values.rows()))
}

/// K-fold cross-validated uncertainty: one surrogate per left-out fold, each
/// trained on the remaining folds and predicting every virtual point.
pub fn cv_uncertainty(
    kind: &SurrogateKind,
    k_obs: &KernelMatrix,
    y: &[f64],
    k_cross: &KernelMatrix,
    folds: usize,
    seed: u64,
) -> Result<UncertaintyEstimate, RegressError> {
    let (n, n_virtual) = check_resample_inputs(k_obs, y, k_cross)?;
    if folds < 2 {
        return Err(RegressError::InvalidParam { name: "folds" });
    }
    if n < folds {
        return Err(RegressError::TooFewSamples {
            needed: folds,
            got: n,
        });
    }
    let fold_sets = kfold_indices(n, folds, seed);
    let all_virtual: Vec<usize> = (0..n_virtual).collect();
    let mut predictions = Vec::with_capacity(folds);
    for held_out in 0..folds {
        let train: Vec<usize> = fold_sets
            .iter()
            .enumerate()
            .filter(|(f, _)| *f != held_out)
            .flat_map(|(_, set)| set.iter().copied())
            .collect();
        let k_tr = k_obs.select(&train, &train);
        let y_tr: Vec<f64> = train.iter().map(|&i| y[i]).collect();
        let k_cr = k_cross.select(&all_virtual, &train);
        predictions.push(kind.fit_predict(&k_tr, &y_tr, &k_cr)?);
    }
    let (mu, sigma) = spread(&predictions, n_virtual);
    Ok(UncertaintyEstimate {
        mu,
        sigma,
        method: UncertaintyMethod::Cv,
        resamples: folds,
    })
}

/// Bootstrap uncertainty: B resamples with replacement of the observed set.
/// A degenerate resample (a fit that fails) is redrawn, up to a retry cap.
pub fn bootstrap_uncertainty(
    kind: &SurrogateKind,
    k_obs: &KernelMatrix,
    y: &[f64],
    k_cross: &KernelMatrix,
    resamples: usize,
    seed: u64,
) -> Result<UncertaintyEstimate, RegressError> {
    let (n, n_virtual) = check_resample_inputs(k_obs, y, k_cross)?;
    if resamples < 2 {
        return Err(RegressError::InvalidParam { name: "resamples" });
    }
    if n < 1 {
        return Err(RegressError::EmptyInput);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all_virtual: Vec<usize> = (0..n_virtual).collect();
    let mut predictions = Vec::with_capacity(resamples);
    let mut failures = 0usize;
    while predictions.len() < resamples {
        let draw: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
        let k_tr = k_obs.select(&draw, &draw);
        let y_tr: Vec<f64> = draw.iter().map(|&i| y[i]).collect();
        let k_cr = k_cross.select(&all_virtual, &draw);
        match kind.fit_predict(&k_tr, &y_tr, &k_cr) {
            Ok(p) => predictions.push(p),
            Err(_) => {
                failures += 1;
                if failures > BOOTSTRAP_RETRY_CAP {
                    return Err(RegressError::DegenerateResample);
                }
            }
        }
    }
    let (mu, sigma) = spread(&predictions, n_virtual);
    Ok(UncertaintyEstimate {
        mu,
        sigma,
        method: UncertaintyMethod::Bootstrap,
        resamples,
    })
}
