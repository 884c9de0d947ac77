//! Surrogate regression over precomputed kernels: ε-SVR solved by SMO, GPR
//! with the analytic posterior, resampling-based uncertainty, grid search and
//! error metrics.

mod gpr;
mod grid;
mod resample;
mod svr;

pub use gpr::{fit_gpr, fit_gpr_jittered, predict_gpr, GprModel};
pub use grid::{
    grid_search, Grid, GridAxis, GridCell, GridProblem, GridSearchResult, SurrogateFamily,
};
pub use resample::{bootstrap_uncertainty, cv_uncertainty, kfold_indices, SurrogateKind};
pub use svr::{dual_objective, fit_svr, predict_svr, SvrModel, SvrParams};

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::kernels::KernelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UncertaintyMethod {
    Cv,
    Bootstrap,
    GprAnalytic,
}

impl UncertaintyMethod {
    pub fn name(&self) -> &'static str {
        match self {
            UncertaintyMethod::Cv => "cv",
            UncertaintyMethod::Bootstrap => "bootstrap",
            UncertaintyMethod::GprAnalytic => "gpr_analytic",
        }
    }
}

/// Predictive mean and standard deviation per virtual point.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintyEstimate {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub method: UncertaintyMethod,
    /// Fold or bootstrap count; 0 for the analytic posterior.
    pub resamples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegressError {
    NotSquare,
    IdMismatch,
    LengthMismatch { expected: usize, got: usize },
    NonFiniteTarget,
    InvalidParam { name: &'static str },
    TooFewSamples { needed: usize, got: usize },
    /// SMO hit the pair-update cap before reaching the tolerance.
    SvrConvergence { iterations: usize, gap: f64 },
    /// Strongly negative curvature encountered along an SMO direction.
    NonPsdKernel { curvature: f64 },
    /// K + σ²I is not positive definite; add regularization (jitter).
    NotPositiveDefinite,
    /// Bootstrap redraws kept producing singular fits.
    DegenerateResample,
    EmptyGrid,
    UnknownGridAxis(String),
    EmptyInput,
    Kernel(KernelError),
}

impl fmt::Display for RegressError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegressError::NotSquare => write!(f, "training kernel must be square"),
            RegressError::IdMismatch => write!(f, "kernel ids do not match training ids"),
            RegressError::LengthMismatch { expected, got } => {
                write!(f, "length mismatch: expected {expected}, got {got}")
            }
            RegressError::NonFiniteTarget => write!(f, "non-finite target value"),
            RegressError::InvalidParam { name } => write!(f, "invalid parameter `{name}`"),
            RegressError::TooFewSamples { needed, got } => {
                write!(f, "too few samples: need at least {needed}, got {got}")
            }
            RegressError::SvrConvergence { iterations, gap } => write!(
                f,
                "SVR solver did not converge within {iterations} updates (KKT gap {gap:e})"
            ),
            RegressError::NonPsdKernel { curvature } => {
                write!(f, "kernel is not PSD within tolerance (curvature {curvature:e})")
            }
            RegressError::NotPositiveDefinite => write!(
                f,
                "kernel + regularization is not positive definite; increase sigma or add jitter"
            ),
            RegressError::DegenerateResample => {
                write!(f, "bootstrap resampling kept producing degenerate fits")
            }
            RegressError::EmptyGrid => write!(f, "hyperparameter grid is empty"),
            RegressError::UnknownGridAxis(name) => write!(f, "unknown grid axis `{name}`"),
            RegressError::EmptyInput => write!(f, "empty input"),
            RegressError::Kernel(e) => write!(f, "kernel construction failed: {e}"),
        }
    }
}

impl core::error::Error for RegressError {}

impl From<KernelError> for RegressError {
    fn from(e: KernelError) -> Self {
        RegressError::Kernel(e)
    }
}

/// Mean absolute error of a prediction vector.
pub fn mae(y_true: &[f64], y_pred: &[f64]) -> Result<f64, RegressError> {
    if y_true.is_empty() {
        return Err(RegressError::EmptyInput);
    }
    if y_true.len() != y_pred.len() {
        return Err(RegressError::LengthMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    let sum: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(t, p)| {
            let d = t - p;
            if d < 0.0 {
                -d
            } else {
                d
            }
        })
        .sum();
    Ok(sum / y_true.len() as f64)
}

/// Seeded shuffle split into (train, test) index sets, both sorted. The test
/// share is rounded to the nearest count but kept within 1..=n−1.
pub fn train_test_split(
    n: usize,
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), RegressError> {
    if n < 2 {
        return Err(RegressError::TooFewSamples { needed: 2, got: n });
    }
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(RegressError::InvalidParam {
            name: "test_fraction",
        });
    }
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    let raw = (n as f64 * test_fraction + 0.5) as usize;
    let n_test = raw.clamp(1, n - 1);
    let mut test: Vec<usize> = idx[..n_test].to_vec();
    let mut train: Vec<usize> = idx[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    Ok((train, test))
}
