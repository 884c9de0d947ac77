//! Gaussian kernel density estimation of a property distribution.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use super::CampaignError;
use crate::acquire::normal_pdf;

/// Gaussian KDE evaluated on a grid: f(t) = (1/(n·h)) Σ φ((t − v_i)/h).
pub fn kde(values: &[f64], bandwidth: f64, grid: &[f64]) -> Result<Vec<f64>, CampaignError> {
    if values.is_empty() {
        return Err(CampaignError::EmptyValues);
    }
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(CampaignError::InvalidBandwidth);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CampaignError::EmptyValues);
    }
    let n = values.len() as f64;
    Ok(grid
        .iter()
        .map(|&t| {
            values
                .iter()
                .map(|&v| normal_pdf((t - v) / bandwidth))
                .sum::<f64>()
                / (n * bandwidth)
        })
        .collect())
}

/// Silverman's rule of thumb: 0.9·min(σ̂, IQR/1.34)·n^(−1/5), with a small
/// data-scaled floor for degenerate samples.
pub fn silverman_bandwidth(values: &[f64]) -> f64 {
    let n = values.len();
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let std = if n > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 {
        std.min(iqr / 1.34)
    } else {
        std
    };
    let h = 0.9 * spread * nf.powf(-0.2);
    if h.is_finite() && h > 0.0 {
        h
    } else {
        (mean.abs() * 1e-3).max(1e-3)
    }
}

/// Linearly interpolated quantile of a sorted slice.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = q * (n - 1) as f64;
    let lo = pos as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Evaluation grid spanning [min − 3h, max + 3h] with `points` samples.
pub fn kde_grid(values: &[f64], bandwidth: f64, points: usize) -> Vec<f64> {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min) - 3.0 * bandwidth;
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 3.0 * bandwidth;
    if points < 2 {
        return alloc::vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + step * i as f64).collect()
}
