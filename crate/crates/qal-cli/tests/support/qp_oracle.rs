//! Independent numerical oracles for the acceptance gate: a dense
//! projected-gradient solve of the SVR dual and a dense-inverse GP
//! posterior. Kept free of the library's solver paths.

use qal_core::kernels::{KernelFamilyTag, KernelMatrix, KernelProvenance};
use qal_core::linalg::Mat;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_unit_psd(n: usize, rng: &mut ChaCha8Rng) -> Mat {
    let dim = n + 2;
    let feats: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let ridge = 0.1;
    let norms: Vec<f64> = feats
        .iter()
        .map(|f| (f.iter().map(|x| x * x).sum::<f64>() + ridge).sqrt())
        .collect();
    let mut m = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let dot: f64 = feats[i].iter().zip(&feats[j]).map(|(a, b)| a * b).sum();
            let extra = if i == j { ridge } else { 0.0 };
            m.set(i, j, (dot + extra) / (norms[i] * norms[j]));
        }
    }
    m
}

pub fn kernel_matrix(values: Mat) -> KernelMatrix {
    let n = values.rows();
    let ids: Vec<String> = (0..n).map(|i| format!("t{i}")).collect();
    KernelMatrix {
        values,
        row_ids: ids.clone(),
        col_ids: ids,
        provenance: KernelProvenance::new(KernelFamilyTag::Imported),
    }
}

/// Optimal dual objective of the ε-SVR problem by projected gradient with
/// exact line search over the 2n-variable box/hyperplane formulation.
pub fn solve(k: &Mat, y: &[f64], c: f64, epsilon: f64) -> f64 {
    let n = y.len();
    let m = 2 * n;
    let signs: Vec<f64> = (0..m).map(|p| if p < n { 1.0 } else { -1.0 }).collect();
    let q: Vec<Vec<f64>> = (0..m)
        .map(|a| {
            (0..m)
                .map(|b| signs[a] * signs[b] * k.get(a % n, b % n))
                .collect()
        })
        .collect();
    let lin: Vec<f64> = (0..m)
        .map(|p| {
            if p < n {
                epsilon - y[p]
            } else {
                epsilon + y[p - n]
            }
        })
        .collect();

    let clip = |x: f64| x.clamp(0.0, c);
    let project = |v: &[f64]| -> Vec<f64> {
        let residual = |lambda: f64| -> f64 {
            v.iter()
                .zip(&signs)
                .map(|(vi, si)| si * clip(vi - lambda * si))
                .sum()
        };
        let bound = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs())) + c + 1.0;
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if residual(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);
        v.iter()
            .zip(&signs)
            .map(|(vi, si)| clip(vi - lambda * si))
            .collect()
    };

    let lipschitz: f64 = q
        .iter()
        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        + 1.0;
    let eta = 1.0 / lipschitz;
    let mut a = project(&vec![0.0; m]);
    let mut stalled = 0usize;
    for _ in 0..200_000 {
        let grad: Vec<f64> = (0..m)
            .map(|i| q[i].iter().zip(&a).map(|(qq, aa)| qq * aa).sum::<f64>() + lin[i])
            .collect();
        let moved: Vec<f64> = a.iter().zip(&grad).map(|(ai, gi)| ai - eta * gi).collect();
        let target = project(&moved);
        let d: Vec<f64> = target.iter().zip(&a).map(|(t, ai)| t - ai).collect();
        if d.iter().map(|x| x * x).sum::<f64>() < 1e-24 {
            break;
        }
        let gd: f64 = grad.iter().zip(&d).map(|(x, z)| x * z).sum();
        let qd: f64 = (0..m)
            .map(|i| d[i] * q[i].iter().zip(&d).map(|(qq, dd)| qq * dd).sum::<f64>())
            .sum();
        let t = if qd > 1e-300 {
            (-gd / qd).clamp(0.0, 1.0)
        } else {
            1.0
        };
        for (ai, di) in a.iter_mut().zip(&d) {
            *ai += t * di;
        }
        let decrease = -(t * gd + 0.5 * t * t * qd);
        if decrease < 1e-16 {
            stalled += 1;
            if stalled >= 100 {
                break;
            }
        } else {
            stalled = 0;
        }
    }

    let mut obj = 0.0;
    for i in 0..m {
        let mut acc = 0.0;
        for j in 0..m {
            acc += q[i][j] * a[j];
        }
        obj += 0.5 * a[i] * acc + lin[i] * a[i];
    }
    obj
}

fn dense_inverse(m: &Mat) -> Vec<Vec<f64>> {
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let diag = a[col][col];
        assert!(diag.abs() > 1e-300, "oracle matrix singular");
        for j in 0..n {
            a[col][j] /= diag;
            inv[col][j] /= diag;
        }
        for row in 0..n {
            if row != col {
                let factor = a[row][col];
                for j in 0..n {
                    a[row][j] -= factor * a[col][j];
                    inv[row][j] -= factor * inv[col][j];
                }
            }
        }
    }
    inv
}

/// GP posterior (means, variances) via the explicit inverse of K + σ²I.
pub fn gpr_reference(
    k: &Mat,
    y: &[f64],
    sigma_reg: f64,
    cross: &Mat,
    diag: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = y.len();
    let mut reg = k.clone();
    for i in 0..n {
        reg.set(i, i, reg.get(i, i) + sigma_reg * sigma_reg);
    }
    let inv = dense_inverse(&reg);
    let mut mus = Vec::with_capacity(cross.rows());
    let mut vars = Vec::with_capacity(cross.rows());
    for j in 0..cross.rows() {
        let kstar = cross.row(j);
        let mut mu = 0.0;
        let mut quad = 0.0;
        for p in 0..n {
            let mut inv_k = 0.0;
            let mut inv_y = 0.0;
            for qx in 0..n {
                inv_k += inv[p][qx] * kstar[qx];
                inv_y += inv[p][qx] * y[qx];
            }
            mu += kstar[p] * inv_y;
            quad += kstar[p] * inv_k;
        }
        mus.push(mu);
        vars.push((diag[j] - quad).max(0.0));
    }
    (mus, vars)
}
