//! Classical and quantum kernel functions and Gram-matrix construction.
//!
//! Square Gram matrices are computed on the upper triangle and mirrored,
//! caching the encoded statevectors so a matrix over n rows costs O(n)
//! encodings and O(n²) overlaps. Construction is entrywise-pure: computing
//! any row subset (see [`fqk_row`] / [`pqk_row`]) yields bit-identical values
//! to the serial path, so callers may parallelize over disjoint entries.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{min_eigenvalue, LinalgError, Mat};
use crate::qsim::{self, encode_state, FeatureMapSpec, QsimError, Statevector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamilyTag {
    Rbf,
    DotWhite,
    Fqk,
    Pqk,
    /// Loaded from CSV; original provenance is not recorded in the file.
    Imported,
}

impl KernelFamilyTag {
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamilyTag::Rbf => "rbf",
            KernelFamilyTag::DotWhite => "dot_white",
            KernelFamilyTag::Fqk => "fqk",
            KernelFamilyTag::Pqk => "pqk",
            KernelFamilyTag::Imported => "imported",
        }
    }
}

/// Where a kernel matrix came from: family, hyperparameters and (for quantum
/// kernels) the hash of the encoding circuit spec.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelProvenance {
    pub family: KernelFamilyTag,
    pub params: Vec<(String, f64)>,
    pub feature_map_hash: Option<u64>,
}

impl KernelProvenance {
    pub fn new(family: KernelFamilyTag) -> Self {
        KernelProvenance {
            family,
            params: Vec::new(),
            feature_map_hash: None,
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.push((name.to_string(), value));
        self
    }

    pub fn with_feature_map(mut self, spec: &FeatureMapSpec) -> Self {
        self.feature_map_hash = Some(spec.hash());
        self
    }
}

/// Gram matrix with record identifiers and provenance. Square matrices
/// (`row_ids == col_ids`) of the unit-diagonal families are symmetric PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    pub values: Mat,
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    pub provenance: KernelProvenance,
}

impl KernelMatrix {
    pub fn is_square(&self) -> bool {
        self.row_ids == self.col_ids && self.values.is_square()
    }

    /// Submatrix restricted to the given row/column indices (repeats allowed,
    /// as produced by bootstrap resampling).
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> KernelMatrix {
        KernelMatrix {
            values: self.values.select(rows, cols),
            row_ids: rows.iter().map(|&i| self.row_ids[i].clone()).collect(),
            col_ids: cols.iter().map(|&j| self.col_ids[j].clone()).collect(),
            provenance: self.provenance.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelError {
    DimensionMismatch { expected: usize, got: usize },
    NonFiniteInput,
    InvalidHyperparameter { name: &'static str },
    NotSquare,
    EmptyInput,
    Qsim(QsimError),
    Linalg(LinalgError),
    Csv { line: usize, message: String },
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelError::DimensionMismatch { expected, got } => {
                write!(f, "vector dimension mismatch: expected {expected}, got {got}")
            }
            KernelError::NonFiniteInput => write!(f, "non-finite input component"),
            KernelError::InvalidHyperparameter { name } => {
                write!(f, "invalid kernel hyperparameter `{name}`")
            }
            KernelError::NotSquare => write!(f, "kernel matrix is not square"),
            KernelError::EmptyInput => write!(f, "empty input row set"),
            KernelError::Qsim(e) => write!(f, "encoding failed: {e}"),
            KernelError::Linalg(e) => write!(f, "eigensolver failed: {e}"),
            KernelError::Csv { line, message } => write!(f, "kernel CSV line {line}: {message}"),
        }
    }
}

impl core::error::Error for KernelError {}

impl From<QsimError> for KernelError {
    fn from(e: QsimError) -> Self {
        KernelError::Qsim(e)
    }
}

impl From<LinalgError> for KernelError {
    fn from(e: LinalgError) -> Self {
        KernelError::Linalg(e)
    }
}

fn check_pair(xi: &[f64], xj: &[f64]) -> Result<(), KernelError> {
    if xi.len() != xj.len() {
        return Err(KernelError::DimensionMismatch {
            expected: xi.len(),
            got: xj.len(),
        });
    }
    if xi.iter().chain(xj.iter()).any(|v| !v.is_finite()) {
        return Err(KernelError::NonFiniteInput);
    }
    Ok(())
}

/// RBF kernel exp(−γ‖xi−xj‖²); γ = 1/(2l²) for length scale l.
pub fn rbf_kernel(xi: &[f64], xj: &[f64], gamma: f64) -> Result<f64, KernelError> {
    check_pair(xi, xj)?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(KernelError::InvalidHyperparameter { name: "gamma" });
    }
    let d2: f64 = xi
        .iter()
        .zip(xj)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((-gamma * d2).exp())
}

/// DotProduct + White kernel: σ₀² + xi·xj + ν·δ_ij. The white-noise term
/// contributes only when `i == j`, i.e. the same record of the same set.
pub fn dotproduct_white_kernel(
    xi: &[f64],
    xj: &[f64],
    i: usize,
    j: usize,
    sigma0_sq: f64,
    noise: f64,
) -> Result<f64, KernelError> {
    check_pair(xi, xj)?;
    if sigma0_sq < 0.0 || !sigma0_sq.is_finite() {
        return Err(KernelError::InvalidHyperparameter { name: "sigma0_sq" });
    }
    if noise < 0.0 || !noise.is_finite() {
        return Err(KernelError::InvalidHyperparameter { name: "noise" });
    }
    let dot: f64 = xi.iter().zip(xj).map(|(a, b)| a * b).sum();
    let white = if i == j { noise } else { 0.0 };
    Ok(sigma0_sq + dot + white)
}

fn check_rows(rows: &[Vec<f64>], ids: &[String]) -> Result<(), KernelError> {
    if rows.is_empty() {
        return Err(KernelError::EmptyInput);
    }
    if rows.len() != ids.len() {
        return Err(KernelError::DimensionMismatch {
            expected: rows.len(),
            got: ids.len(),
        });
    }
    let d = rows[0].len();
    for r in rows {
        if r.len() != d {
            return Err(KernelError::DimensionMismatch {
                expected: d,
                got: r.len(),
            });
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(KernelError::NonFiniteInput);
        }
    }
    Ok(())
}

/// Squared overlap |⟨ψ(x)|ψ(y)⟩|² of two encoded states (the fidelity).
pub fn fidelity(a: &Statevector, b: &Statevector) -> Result<f64, KernelError> {
    Ok(qsim::overlap(a, b)?.norm_sqr())
}

/// Encodes every row once; the cache backs both the square and cross cases.
pub fn encode_rows(spec: &FeatureMapSpec, rows: &[Vec<f64>]) -> Result<Vec<Statevector>, KernelError> {
    rows.iter()
        .map(|r| encode_state(spec, r).map_err(KernelError::from))
        .collect()
}

/// One row of an FQK Gram matrix from cached states.
pub fn fqk_row(row_state: &Statevector, col_states: &[Statevector]) -> Result<Vec<f64>, KernelError> {
    col_states.iter().map(|c| fidelity(row_state, c)).collect()
}

/// Rows `range` of the square FQK Gram matrix from cached states, with the
/// self-fidelity pinned to exactly 1. Disjoint ranges assemble to the same
/// bits as the serial construction, so drivers may split them over threads.
pub fn fqk_square_rows(
    states: &[Statevector],
    range: core::ops::Range<usize>,
) -> Result<Vec<Vec<f64>>, KernelError> {
    range
        .map(|i| {
            let mut row = fqk_row(&states[i], states)?;
            row[i] = 1.0;
            Ok(row)
        })
        .collect()
}

/// Fidelity quantum kernel matrix. `y` selects the cross case
/// (rows × columns over two row sets); omit it for the square Gram matrix.
pub fn fqk_matrix(
    spec: &FeatureMapSpec,
    x: &[Vec<f64>],
    x_ids: &[String],
    y: Option<(&[Vec<f64>], &[String])>,
) -> Result<KernelMatrix, KernelError> {
    check_rows(x, x_ids)?;
    let provenance = KernelProvenance::new(KernelFamilyTag::Fqk).with_feature_map(spec);
    let x_states = encode_rows(spec, x)?;
    match y {
        None => {
            let n = x.len();
            let mut values = Mat::zeros(n, n);
            for i in 0..n {
                values.set(i, i, 1.0);
                for j in (i + 1)..n {
                    let v = fidelity(&x_states[i], &x_states[j])?;
                    values.set(i, j, v);
                    values.set(j, i, v);
                }
            }
            Ok(KernelMatrix {
                values,
                row_ids: x_ids.to_vec(),
                col_ids: x_ids.to_vec(),
                provenance,
            })
        }
        Some((y_rows, y_ids)) => {
            check_rows(y_rows, y_ids)?;
            let y_states = encode_rows(spec, y_rows)?;
            let mut values = Mat::zeros(x.len(), y_rows.len());
            for (i, xs) in x_states.iter().enumerate() {
                let row = fqk_row(xs, &y_states)?;
                values.row_mut(i).copy_from_slice(&row);
            }
            Ok(KernelMatrix {
                values,
                row_ids: x_ids.to_vec(),
                col_ids: y_ids.to_vec(),
                provenance,
            })
        }
    }
}

/// Per-qubit Bloch-vector embedding: for every qubit k the expectation values
/// (tr\[Xρ_k\], tr\[Yρ_k\], tr\[Zρ_k\]) of its one-qubit reduction, concatenated in
/// qubit order. Length 3·n_qubits.
pub fn bloch_embedding(spec: &FeatureMapSpec, x: &[f64]) -> Result<Vec<f64>, KernelError> {
    let state = encode_state(spec, x)?;
    let mut out = Vec::with_capacity(3 * spec.n_qubits);
    for k in 0..spec.n_qubits {
        let rho = qsim::reduced_density_matrix(&state, k)?;
        let (bx, by, bz) = rho.bloch_components();
        out.push(bx);
        out.push(by);
        out.push(bz);
    }
    Ok(out)
}

fn gaussian_of_embeddings(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
    (-gamma * d2).exp()
}

/// One row of a PQK Gram matrix from cached embeddings.
pub fn pqk_row(row_emb: &[f64], col_embs: &[Vec<f64>], gamma: f64) -> Vec<f64> {
    col_embs
        .iter()
        .map(|c| gaussian_of_embeddings(row_emb, c, gamma))
        .collect()
}

/// Rows `range` of the square PQK Gram matrix from cached embeddings, with
/// the self-kernel pinned to exactly 1 (see [`fqk_square_rows`]).
pub fn pqk_square_rows(
    embeddings: &[Vec<f64>],
    gamma: f64,
    range: core::ops::Range<usize>,
) -> Vec<Vec<f64>> {
    range
        .map(|i| {
            let mut row = pqk_row(&embeddings[i], embeddings, gamma);
            row[i] = 1.0;
            row
        })
        .collect()
}

/// Bloch embeddings for every row, cached for Gram construction.
pub fn embed_rows(spec: &FeatureMapSpec, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, KernelError> {
    rows.iter().map(|r| bloch_embedding(spec, r)).collect()
}

/// Projected quantum kernel matrix: a Gaussian of the per-qubit Bloch-vector
/// embedding distance, exp(−γ Σ_{k,P} (tr\[Pρ_k(x_i)\] − tr\[Pρ_k(x_j)\])²) with
/// P running over the unweighted set {X, Y, Z}.
pub fn pqk_matrix(
    spec: &FeatureMapSpec,
    x: &[Vec<f64>],
    x_ids: &[String],
    y: Option<(&[Vec<f64>], &[String])>,
    gamma: f64,
) -> Result<KernelMatrix, KernelError> {
    check_rows(x, x_ids)?;
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(KernelError::InvalidHyperparameter { name: "pqk_gamma" });
    }
    let provenance = KernelProvenance::new(KernelFamilyTag::Pqk)
        .with_param("pqk_gamma", gamma)
        .with_feature_map(spec);
    let x_embs = embed_rows(spec, x)?;
    match y {
        None => {
            let n = x.len();
            let mut values = Mat::zeros(n, n);
            for i in 0..n {
                values.set(i, i, 1.0);
                for j in (i + 1)..n {
                    let v = gaussian_of_embeddings(&x_embs[i], &x_embs[j], gamma);
                    values.set(i, j, v);
                    values.set(j, i, v);
                }
            }
            Ok(KernelMatrix {
                values,
                row_ids: x_ids.to_vec(),
                col_ids: x_ids.to_vec(),
                provenance,
            })
        }
        Some((y_rows, y_ids)) => {
            check_rows(y_rows, y_ids)?;
            let y_embs = embed_rows(spec, y_rows)?;
            let mut values = Mat::zeros(x.len(), y_rows.len());
            for (i, e) in x_embs.iter().enumerate() {
                let row = pqk_row(e, &y_embs, gamma);
                values.row_mut(i).copy_from_slice(&row);
            }
            Ok(KernelMatrix {
                values,
                row_ids: x_ids.to_vec(),
                col_ids: y_ids.to_vec(),
                provenance,
            })
        }
    }
}

/// The kernel families a surrogate can be driven by, with their
/// hyperparameters. Builds square, cross and self-diagonal kernels.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind {
    Rbf { gamma: f64 },
    DotWhite { sigma0_sq: f64, noise: f64 },
    Fqk { spec: FeatureMapSpec },
    Pqk { spec: FeatureMapSpec, gamma: f64 },
}

impl KernelKind {
    pub fn family(&self) -> KernelFamilyTag {
        match self {
            KernelKind::Rbf { .. } => KernelFamilyTag::Rbf,
            KernelKind::DotWhite { .. } => KernelFamilyTag::DotWhite,
            KernelKind::Fqk { .. } => KernelFamilyTag::Fqk,
            KernelKind::Pqk { .. } => KernelFamilyTag::Pqk,
        }
    }

    /// Square Gram matrix over one row set.
    pub fn square(&self, x: &[Vec<f64>], ids: &[String]) -> Result<KernelMatrix, KernelError> {
        check_rows(x, ids)?;
        match self {
            KernelKind::Rbf { gamma } => {
                let n = x.len();
                let mut values = Mat::zeros(n, n);
                for i in 0..n {
                    values.set(i, i, 1.0);
                    for j in (i + 1)..n {
                        let v = rbf_kernel(&x[i], &x[j], *gamma)?;
                        values.set(i, j, v);
                        values.set(j, i, v);
                    }
                }
                Ok(KernelMatrix {
                    values,
                    row_ids: ids.to_vec(),
                    col_ids: ids.to_vec(),
                    provenance: KernelProvenance::new(KernelFamilyTag::Rbf)
                        .with_param("gamma", *gamma),
                })
            }
            KernelKind::DotWhite { sigma0_sq, noise } => {
                let n = x.len();
                let mut values = Mat::zeros(n, n);
                for i in 0..n {
                    for j in i..n {
                        let v = dotproduct_white_kernel(&x[i], &x[j], i, j, *sigma0_sq, *noise)?;
                        values.set(i, j, v);
                        values.set(j, i, v);
                    }
                }
                Ok(KernelMatrix {
                    values,
                    row_ids: ids.to_vec(),
                    col_ids: ids.to_vec(),
                    provenance: KernelProvenance::new(KernelFamilyTag::DotWhite)
                        .with_param("sigma0_sq", *sigma0_sq)
                        .with_param("noise", *noise),
                })
            }
            KernelKind::Fqk { spec } => fqk_matrix(spec, x, ids, None),
            KernelKind::Pqk { spec, gamma } => pqk_matrix(spec, x, ids, None, *gamma),
        }
    }

    /// Cross kernel: rows = virtual points, columns = training points. The
    /// white-noise term never contributes here (distinct record sets).
    pub fn cross(
        &self,
        x: &[Vec<f64>],
        x_ids: &[String],
        train: &[Vec<f64>],
        train_ids: &[String],
    ) -> Result<KernelMatrix, KernelError> {
        check_rows(x, x_ids)?;
        check_rows(train, train_ids)?;
        match self {
            KernelKind::Rbf { gamma } => {
                let mut values = Mat::zeros(x.len(), train.len());
                for i in 0..x.len() {
                    for j in 0..train.len() {
                        values.set(i, j, rbf_kernel(&x[i], &train[j], *gamma)?);
                    }
                }
                Ok(KernelMatrix {
                    values,
                    row_ids: x_ids.to_vec(),
                    col_ids: train_ids.to_vec(),
                    provenance: KernelProvenance::new(KernelFamilyTag::Rbf)
                        .with_param("gamma", *gamma),
                })
            }
            KernelKind::DotWhite { sigma0_sq, noise } => {
                let mut values = Mat::zeros(x.len(), train.len());
                for i in 0..x.len() {
                    for j in 0..train.len() {
                        // i/j index different sets: δ_ij = 0 by construction
                        values.set(
                            i,
                            j,
                            dotproduct_white_kernel(&x[i], &train[j], 0, 1, *sigma0_sq, *noise)?,
                        );
                    }
                }
                Ok(KernelMatrix {
                    values,
                    row_ids: x_ids.to_vec(),
                    col_ids: train_ids.to_vec(),
                    provenance: KernelProvenance::new(KernelFamilyTag::DotWhite)
                        .with_param("sigma0_sq", *sigma0_sq)
                        .with_param("noise", *noise),
                })
            }
            KernelKind::Fqk { spec } => fqk_matrix(spec, x, x_ids, Some((train, train_ids))),
            KernelKind::Pqk { spec, gamma } => {
                pqk_matrix(spec, x, x_ids, Some((train, train_ids)), *gamma)
            }
        }
    }

    /// Self-kernel k(x, x) of each row, the prior variance used by the GP
    /// posterior. Includes the white-noise level for DotWhite.
    pub fn self_diag(&self, x: &[Vec<f64>]) -> Result<Vec<f64>, KernelError> {
        match self {
            KernelKind::Rbf { .. } | KernelKind::Fqk { .. } | KernelKind::Pqk { .. } => {
                Ok(alloc::vec![1.0; x.len()])
            }
            KernelKind::DotWhite { sigma0_sq, noise } => x
                .iter()
                .map(|r| dotproduct_white_kernel(r, r, 0, 0, *sigma0_sq, *noise))
                .collect(),
        }
    }
}

/// Validation report for a square kernel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelDiagnostics {
    pub symmetric: bool,
    pub symmetry_deviation: f64,
    pub min_eigenvalue: f64,
    /// max |K_ii − 1| (meaningful for the unit-diagonal families).
    pub diag_max_dev: f64,
}

/// Symmetry, spectrum and diagonal diagnostics of a square kernel matrix.
pub fn validate_kernel(k: &KernelMatrix) -> Result<KernelDiagnostics, KernelError> {
    if !k.values.is_square() {
        return Err(KernelError::NotSquare);
    }
    let symmetry_deviation = k.values.max_symmetry_deviation();
    let min_eig = min_eigenvalue(&k.values)?;
    let mut diag_max_dev: f64 = 0.0;
    for i in 0..k.values.rows() {
        diag_max_dev = diag_max_dev.max((k.values.get(i, i) - 1.0).abs());
    }
    Ok(KernelDiagnostics {
        symmetric: symmetry_deviation <= 1e-10,
        symmetry_deviation,
        min_eigenvalue: min_eig,
        diag_max_dev,
    })
}

/// CSV export: header `id,<col ids...>`, then one row per record with the row
/// id in the first column. Values use the shortest round-trip float form.
pub fn kernel_to_csv(k: &KernelMatrix) -> String {
    let mut out = String::from("id");
    for id in &k.col_ids {
        out.push(',');
        out.push_str(id);
    }
    out.push('\n');
    for (i, id) in k.row_ids.iter().enumerate() {
        out.push_str(id);
        for j in 0..k.values.cols() {
            out.push(',');
            out.push_str(&k.values.get(i, j).to_string());
        }
        out.push('\n');
    }
    out
}

/// Parses the CSV form produced by [`kernel_to_csv`]. Provenance is tagged
/// `imported`; the file format does not carry it.
pub fn kernel_from_csv(text: &str) -> Result<KernelMatrix, KernelError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(KernelError::Csv {
        line: 1,
        message: "missing header".to_string(),
    })?;
    let mut cols = header.split(',');
    let first = cols.next().unwrap_or("");
    if first != "id" {
        return Err(KernelError::Csv {
            line: 1,
            message: "header must start with `id`".to_string(),
        });
    }
    let col_ids: Vec<String> = cols.map(|c| c.to_string()).collect();
    if col_ids.is_empty() {
        return Err(KernelError::Csv {
            line: 1,
            message: "no column ids".to_string(),
        });
    }
    let mut row_ids = Vec::new();
    let mut data = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let id = fields.next().unwrap_or("").to_string();
        if id.is_empty() {
            return Err(KernelError::Csv {
                line: idx + 1,
                message: "empty row id".to_string(),
            });
        }
        let mut count = 0;
        for field in fields {
            let v: f64 = field.trim().parse().map_err(|_| KernelError::Csv {
                line: idx + 1,
                message: alloc::format!("bad number {field:?}"),
            })?;
            data.push(v);
            count += 1;
        }
        if count != col_ids.len() {
            return Err(KernelError::Csv {
                line: idx + 1,
                message: alloc::format!("expected {} values, got {count}", col_ids.len()),
            });
        }
        row_ids.push(id);
    }
    if row_ids.is_empty() {
        return Err(KernelError::Csv {
            line: 2,
            message: "no data rows".to_string(),
        });
    }
    let values = Mat::from_vec(row_ids.len(), col_ids.len(), data)
        .expect("consistent row lengths checked above");
    Ok(KernelMatrix {
        values,
        row_ids,
        col_ids,
        provenance: KernelProvenance::new(KernelFamilyTag::Imported),
    })
}
