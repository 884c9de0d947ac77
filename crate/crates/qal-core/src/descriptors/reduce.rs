//! Standard scaling and PCA. Fit states are immutable; transforms are pure.
//! PCA components come from a Jacobi eigendecomposition of the sample
//! covariance, with a sign convention (first entry of magnitude above 1e-12
//! made positive) so results are reproducible across eigensolvers.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use super::DescriptorError;
use crate::linalg::{jacobi_eigen, Mat};

/// Per-feature mean and population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalerState {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

/// Columns whose std falls below this are mapped to 0 instead of dividing.
const STD_GUARD: f64 = 1e-12;

fn check_rows(rows: &[Vec<f64>]) -> Result<usize, DescriptorError> {
    if rows.is_empty() {
        return Err(DescriptorError::EmptyFit);
    }
    let d = rows[0].len();
    for r in rows {
        if r.len() != d {
            return Err(DescriptorError::DimensionMismatch {
                expected: d,
                got: r.len(),
            });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(DescriptorError::NonFiniteInput);
        }
    }
    Ok(d)
}

pub fn standard_scale_fit(rows: &[Vec<f64>]) -> Result<ScalerState, DescriptorError> {
    let d = check_rows(rows)?;
    let n = rows.len() as f64;
    let mut mean = vec![0.0; d];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    let mut var = vec![0.0; d];
    for r in rows {
        for ((s, v), m) in var.iter_mut().zip(r).zip(&mean) {
            let c = v - m;
            *s += c * c;
        }
    }
    let std = var.into_iter().map(|s| (s / n).sqrt()).collect();
    Ok(ScalerState { mean, std })
}

pub fn standard_scale_transform(
    state: &ScalerState,
    rows: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>, DescriptorError> {
    let d = state.mean.len();
    rows.iter()
        .map(|r| {
            if r.len() != d {
                return Err(DescriptorError::DimensionMismatch {
                    expected: d,
                    got: r.len(),
                });
            }
            Ok(r.iter()
                .zip(&state.mean)
                .zip(&state.std)
                .map(|((v, m), s)| if *s < STD_GUARD { 0.0 } else { (v - m) / s })
                .collect())
        })
        .collect()
}

/// Orthonormal component rows (one per retained component) with their
/// explained variances, sorted nonincreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PcaState {
    pub mean: Vec<f64>,
    pub components: Mat,
    pub explained_variance: Vec<f64>,
}

impl PcaState {
    pub fn n_components(&self) -> usize {
        self.components.rows()
    }
}

pub fn pca_fit(rows: &[Vec<f64>], n_components: usize) -> Result<PcaState, DescriptorError> {
    let d = check_rows(rows)?;
    let n = rows.len();
    if n_components < 1 {
        return Err(DescriptorError::TooManyComponents {
            requested: n_components,
            available: 0,
        });
    }
    let available = d.min(n.saturating_sub(1));
    if n_components > available {
        return Err(DescriptorError::TooManyComponents {
            requested: n_components,
            available,
        });
    }
    let mut mean = vec![0.0; d];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    // sample covariance of the centered rows
    let mut cov = Mat::zeros(d, d);
    for r in rows {
        let centered: Vec<f64> = r.iter().zip(&mean).map(|(v, m)| v - m).collect();
        for i in 0..d {
            for j in i..d {
                let add = centered[i] * centered[j];
                cov.set(i, j, cov.get(i, j) + add);
                if i != j {
                    cov.set(j, i, cov.get(j, i) + add);
                }
            }
        }
    }
    let denom = (n - 1) as f64;
    let total: f64 = (0..d).map(|i| cov.get(i, i)).sum::<f64>() / denom;
    if total < 1e-300 {
        return Err(DescriptorError::DegenerateData);
    }
    let mut scaled = Mat::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            scaled.set(i, j, cov.get(i, j) / denom);
        }
    }
    let eig = jacobi_eigen(&scaled).map_err(|_| DescriptorError::DegenerateData)?;
    let mut components = Mat::zeros(n_components, d);
    let mut explained_variance = Vec::with_capacity(n_components);
    for c in 0..n_components {
        let row = eig.vectors.row(c);
        // sign convention: first entry of magnitude above the guard positive
        let flip = row
            .iter()
            .find(|v| v.abs() > 1e-12)
            .map_or(1.0, |v| if *v < 0.0 { -1.0 } else { 1.0 });
        for (j, v) in row.iter().enumerate() {
            components.set(c, j, flip * v);
        }
        explained_variance.push(eig.values[c].max(0.0));
    }
    Ok(PcaState {
        mean,
        components,
        explained_variance,
    })
}

pub fn pca_transform(state: &PcaState, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, DescriptorError> {
    let d = state.mean.len();
    rows.iter()
        .map(|r| {
            if r.len() != d {
                return Err(DescriptorError::DimensionMismatch {
                    expected: d,
                    got: r.len(),
                });
            }
            let centered: Vec<f64> = r.iter().zip(&state.mean).map(|(v, m)| v - m).collect();
            Ok((0..state.components.rows())
                .map(|c| {
                    state
                        .components
                        .row(c)
                        .iter()
                        .zip(&centered)
                        .map(|(w, x)| w * x)
                        .sum()
                })
                .collect())
        })
        .collect()
}
