//! Acquisition functions and batch selection — the decision-making side of
//! the loop. Scores are oriented so that larger is always better internally;
//! [`select_batch`] returns the top-k indices in descending score order with
//! ties broken by the smaller index.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

/// Objective direction of a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

impl Direction {
    pub fn name(&self) -> &'static str {
        match self {
            Direction::Minimize => "minimize",
            Direction::Maximize => "maximize",
        }
    }

    /// True when `a` is better than `b` under this direction.
    pub fn is_better(&self, a: f64, b: f64) -> bool {
        match self {
            Direction::Minimize => a < b,
            Direction::Maximize => a > b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcquisitionMode {
    EiMin,
    EiMax,
    ExploitMin,
    ExploitMax,
    Lcb,
    Ucb,
}

/// Scores over the virtual points, plus the incumbent that produced them
/// (EI modes only).
#[derive(Debug, Clone, PartialEq)]
pub struct AcquisitionScores {
    pub scores: Vec<f64>,
    pub mode: AcquisitionMode,
    pub incumbent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AcquireError {
    NonFiniteInput,
    NegativeSigma,
    NegativeKappa,
    EmptyVirtualSet,
    BatchSizeOutOfRange { k: usize, len: usize },
}

impl fmt::Display for AcquireError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AcquireError::NonFiniteInput => write!(f, "non-finite acquisition input"),
            AcquireError::NegativeSigma => write!(f, "sigma must be >= 0"),
            AcquireError::NegativeKappa => write!(f, "kappa must be >= 0"),
            AcquireError::EmptyVirtualSet => write!(f, "empty virtual set"),
            AcquireError::BatchSizeOutOfRange { k, len } => {
                write!(f, "batch size {k} out of range 1..={len}")
            }
        }
    }
}

impl core::error::Error for AcquireError {}

/// Standard normal density φ(z).
pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

/// Standard normal CDF Φ(z), computed via the complementary error function
/// for tail accuracy.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
}

/// Below this σ the analytic σ→0 limit max(T, 0) is used, avoiding 0/0 in z.
const SIGMA_FLOOR: f64 = 1e-12;

fn ei_with_margin(t: f64, sigma: f64) -> Result<f64, AcquireError> {
    if !t.is_finite() || !sigma.is_finite() {
        return Err(AcquireError::NonFiniteInput);
    }
    if sigma < 0.0 {
        return Err(AcquireError::NegativeSigma);
    }
    if sigma <= SIGMA_FLOOR {
        return Ok(t.max(0.0));
    }
    let z = t / sigma;
    let ei = t * normal_cdf(z) + sigma * normal_pdf(z);
    Ok(ei.max(0.0))
}

/// Expected improvement for minimization:
/// (f_min − μ)Φ(z) + σφ(z) with z = (f_min − μ)/σ.
pub fn ei_min(mu: f64, sigma: f64, f_min: f64) -> Result<f64, AcquireError> {
    if !mu.is_finite() || !f_min.is_finite() {
        return Err(AcquireError::NonFiniteInput);
    }
    ei_with_margin(f_min - mu, sigma)
}

/// Expected improvement for maximization: the mirror of [`ei_min`] with
/// margin T = μ − f_max.
pub fn ei_max(mu: f64, sigma: f64, f_max: f64) -> Result<f64, AcquireError> {
    if !mu.is_finite() || !f_max.is_finite() {
        return Err(AcquireError::NonFiniteInput);
    }
    ei_with_margin(mu - f_max, sigma)
}

/// Confidence-bound score, already oriented larger-is-better: −(μ − κσ) when
/// minimizing (LCB), μ + κσ when maximizing (UCB).
pub fn confidence_bound(
    mu: f64,
    sigma: f64,
    kappa: f64,
    direction: Direction,
) -> Result<f64, AcquireError> {
    if !mu.is_finite() || !sigma.is_finite() || !kappa.is_finite() {
        return Err(AcquireError::NonFiniteInput);
    }
    if sigma < 0.0 {
        return Err(AcquireError::NegativeSigma);
    }
    if kappa < 0.0 {
        return Err(AcquireError::NegativeKappa);
    }
    Ok(match direction {
        Direction::Minimize => -(mu - kappa * sigma),
        Direction::Maximize => mu + kappa * sigma,
    })
}

/// Pure exploitation: −μ when minimizing, μ when maximizing.
pub fn exploit(mu: f64, direction: Direction) -> f64 {
    match direction {
        Direction::Minimize => -mu,
        Direction::Maximize => mu,
    }
}

/// Indices of the k largest scores, descending; equal scores order by the
/// smaller index first.
pub fn select_batch(scores: &AcquisitionScores, k: usize) -> Result<Vec<usize>, AcquireError> {
    let n = scores.scores.len();
    if n == 0 {
        return Err(AcquireError::EmptyVirtualSet);
    }
    if k < 1 || k > n {
        return Err(AcquireError::BatchSizeOutOfRange { k, len: n });
    }
    if scores.scores.iter().any(|s| !s.is_finite()) {
        return Err(AcquireError::NonFiniteInput);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        scores.scores[b]
            .partial_cmp(&scores.scores[a])
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order.truncate(k);
    Ok(order)
}
