//! Exhaustive grid search with cross-validated MAE scoring.
//!
//! Cells enumerate the Cartesian product of the axes in declaration order
//! with the last axis varying fastest. The fold split is drawn once per
//! search, so every cell is scored on the same partitions; ties on the mean
//! MAE break toward the earlier cell.

use alloc::string::String;
use alloc::vec::Vec;

use super::{kfold_indices, mae, RegressError, SurrogateKind, SvrParams};
use crate::kernels::{KernelKind, KernelMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct GridAxis {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Grid {
    pub axes: Vec<GridAxis>,
}

impl Grid {
    pub fn new() -> Self {
        Grid { axes: Vec::new() }
    }

    pub fn axis(mut self, name: &str, values: &[f64]) -> Self {
        self.axes.push(GridAxis {
            name: String::from(name),
            values: values.to_vec(),
        });
        self
    }

    fn cells(&self) -> Vec<Vec<(String, f64)>> {
        let mut cells: Vec<Vec<(String, f64)>> = alloc::vec![Vec::new()];
        for axis in &self.axes {
            let mut next = Vec::with_capacity(cells.len() * axis.values.len());
            for cell in &cells {
                for &v in &axis.values {
                    let mut c = cell.clone();
                    c.push((axis.name.clone(), v));
                    next.push(c);
                }
            }
            cells = next;
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SurrogateFamily {
    Svr,
    Gpr,
}

/// A dataset plus the surrogate/kernel configuration the grid perturbs.
#[derive(Debug, Clone, PartialEq)]
pub struct GridProblem {
    pub features: Vec<Vec<f64>>,
    pub ids: Vec<String>,
    pub targets: Vec<f64>,
    pub surrogate: SurrogateKind,
    pub kernel: KernelKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub settings: Vec<(String, f64)>,
    pub fold_maes: Vec<f64>,
    pub mean_mae: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSearchResult {
    pub cells: Vec<GridCell>,
    /// Index of the winning cell (smallest mean MAE, earliest on ties).
    pub best: usize,
}

impl GridSearchResult {
    pub fn best_cell(&self) -> &GridCell {
        &self.cells[self.best]
    }
}

fn axis_is_kernel_param(name: &str) -> bool {
    matches!(name, "gamma" | "sigma0_sq" | "noise" | "pqk_gamma")
}

fn apply_setting(
    surrogate: &mut SurrogateKind,
    kernel: &mut KernelKind,
    name: &str,
    value: f64,
) -> Result<(), RegressError> {
    match (name, &mut *surrogate, &mut *kernel) {
        ("c", SurrogateKind::Svr(p), _) => p.c = value,
        ("epsilon", SurrogateKind::Svr(p), _) => p.epsilon = value,
        ("sigma", SurrogateKind::Gpr { sigma_reg }, _) => *sigma_reg = value,
        ("gamma", _, KernelKind::Rbf { gamma }) => *gamma = value,
        ("sigma0_sq", _, KernelKind::DotWhite { sigma0_sq, .. }) => *sigma0_sq = value,
        ("noise", _, KernelKind::DotWhite { noise, .. }) => *noise = value,
        ("pqk_gamma", _, KernelKind::Pqk { gamma, .. }) => *gamma = value,
        _ => return Err(RegressError::UnknownGridAxis(String::from(name))),
    }
    Ok(())
}

fn cell_score(
    problem: &GridProblem,
    kernel_matrix: &KernelMatrix,
    surrogate: &SurrogateKind,
    fold_sets: &[Vec<usize>],
) -> Result<(Vec<f64>, f64), RegressError> {
    let mut fold_maes = Vec::with_capacity(fold_sets.len());
    for held_out in 0..fold_sets.len() {
        let train: Vec<usize> = fold_sets
            .iter()
            .enumerate()
            .filter(|(f, _)| *f != held_out)
            .flat_map(|(_, set)| set.iter().copied())
            .collect();
        let test = &fold_sets[held_out];
        let k_tr = kernel_matrix.select(&train, &train);
        let y_tr: Vec<f64> = train.iter().map(|&i| problem.targets[i]).collect();
        let k_te = kernel_matrix.select(test, &train);
        let pred = surrogate.fit_predict(&k_tr, &y_tr, &k_te)?;
        let y_te: Vec<f64> = test.iter().map(|&i| problem.targets[i]).collect();
        fold_maes.push(mae(&y_te, &pred)?);
    }
    let mean = fold_maes.iter().sum::<f64>() / fold_maes.len() as f64;
    Ok((fold_maes, mean))
}

/// Exhaustive cross-validated MAE over the Cartesian grid.
pub fn grid_search(
    problem: &GridProblem,
    grid: &Grid,
    folds: usize,
    seed: u64,
) -> Result<GridSearchResult, RegressError> {
    if grid.axes.is_empty() || grid.axes.iter().any(|a| a.values.is_empty()) {
        return Err(RegressError::EmptyGrid);
    }
    let n = problem.targets.len();
    if problem.features.len() != n || problem.ids.len() != n {
        return Err(RegressError::LengthMismatch {
            expected: n,
            got: problem.features.len(),
        });
    }
    if folds < 2 {
        return Err(RegressError::InvalidParam { name: "folds" });
    }
    if n < folds {
        return Err(RegressError::TooFewSamples {
            needed: folds,
            got: n,
        });
    }
    // the axis names must be resolvable before any expensive work
    for axis in &grid.axes {
        let mut s = problem.surrogate.clone();
        let mut k = problem.kernel.clone();
        apply_setting(&mut s, &mut k, &axis.name, axis.values[0])?;
    }

    let fold_sets = kfold_indices(n, folds, seed);
    let kernel_varies = grid.axes.iter().any(|a| axis_is_kernel_param(&a.name));
    let base_kernel = if kernel_varies {
        None
    } else {
        Some(problem.kernel.square(&problem.features, &problem.ids)?)
    };

    let mut cells = Vec::new();
    let mut best = 0usize;
    let mut best_mae = f64::INFINITY;
    for settings in grid.cells() {
        let mut surrogate = problem.surrogate.clone();
        let mut kernel = problem.kernel.clone();
        for (name, value) in &settings {
            apply_setting(&mut surrogate, &mut kernel, name, *value)?;
        }
        let owned;
        let kernel_matrix = match &base_kernel {
            Some(k) => k,
            None => {
                owned = kernel.square(&problem.features, &problem.ids)?;
                &owned
            }
        };
        let (fold_maes, mean_mae) = cell_score(problem, kernel_matrix, &surrogate, &fold_sets)?;
        if mean_mae < best_mae {
            best_mae = mean_mae;
            best = cells.len();
        }
        cells.push(GridCell {
            settings,
            fold_maes,
            mean_mae,
        });
    }
    Ok(GridSearchResult { cells, best })
}

impl Default for SurrogateKind {
    fn default() -> Self {
        SurrogateKind::Svr(SvrParams::default())
    }
}
