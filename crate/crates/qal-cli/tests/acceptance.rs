//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line (run with `cargo test --test acceptance -- --nocapture`
//! to see the lines on success).

use std::time::Instant;

use qal_core::acquire::{ei_max, ei_min, Direction};
use qal_core::campaign::{
    run_campaign, run_seed, run_single, synthetic_dataset, AcquisitionChoice, CampaignConfig,
    CampaignResult, ConstraintDirection, Dataset, InitConstraint, MaterialRecord, Preprocessing,
    SyntheticKind, UncertaintyConfig,
};
use qal_core::kernels::{fqk_matrix, pqk_matrix, validate_kernel, KernelKind, KernelMatrix};
use qal_core::linalg::Mat;
use qal_core::qsim::{
    build_feature_map, encode_state, reduced_density_matrix, Entanglement,
    FeatureMapFamily, Statevector,
};
use qal_core::regress::{dual_objective, fit_gpr, fit_svr, predict_gpr, SurrogateKind, SvrParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(number: u8, name: &str, outcome: Result<String, String>) {
    match outcome {
        Ok(detail) => println!("acceptance criterion {number} ({name}): PASS - {detail}"),
        Err(detail) => {
            println!("acceptance criterion {number} ({name}): FAIL - {detail}");
            panic!("acceptance criterion {number} ({name}) failed: {detail}");
        }
    }
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("r{i:03}")).collect()
}

// ---------------------------------------------------------------- criterion 1

#[test]
fn criterion_1_quantum_kernel_correctness() {
    let started = Instant::now();
    let outcome = (|| -> Result<String, String> {
        // closed form on a 50×50 grid
        let spec = build_feature_map(FeatureMapFamily::Z, 1, 1, Entanglement::None)
            .map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        for i in 0..50 {
            for j in 0..50 {
                let x = -2.45 + 0.1 * i as f64;
                let y = -2.45 + 0.1 * j as f64;
                let k = fqk_matrix(&spec, &[vec![x]], &ids(1), Some((&[vec![y]], &ids(1))))
                    .map_err(|e| e.to_string())?;
                let dev = (k.values.get(0, 0) - (x - y).cos().powi(2)).abs();
                worst = worst.max(dev);
            }
        }
        if worst > 1e-10 {
            return Err(format!("closed-form deviation {worst:e} > 1e-10"));
        }

        // Gram invariants across all families at n ∈ {2, 4}, 30 random rows
        let mut worst_sym = 0.0f64;
        let mut worst_eig = f64::INFINITY;
        let mut worst_diag = 0.0f64;
        for n_qubits in [2usize, 4] {
            let specs = [
                build_feature_map(FeatureMapFamily::Z, n_qubits, 5, Entanglement::None),
                build_feature_map(FeatureMapFamily::Zz, n_qubits, 5, Entanglement::Full),
                build_feature_map(FeatureMapFamily::Pauli, n_qubits, 5, Entanglement::Full),
                build_feature_map(FeatureMapFamily::HighDim, n_qubits, 4, Entanglement::Linear),
                build_feature_map(FeatureMapFamily::YzCx, n_qubits, 4, Entanglement::Linear),
            ];
            let mut rng = ChaCha8Rng::seed_from_u64(990 + n_qubits as u64);
            let rows: Vec<Vec<f64>> = (0..30)
                .map(|_| (0..n_qubits).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            for spec in specs {
                let spec = spec.map_err(|e| e.to_string())?;
                let fqk = fqk_matrix(&spec, &rows, &ids(30), None).map_err(|e| e.to_string())?;
                let pqk =
                    pqk_matrix(&spec, &rows, &ids(30), None, 1.0).map_err(|e| e.to_string())?;
                for k in [&fqk, &pqk] {
                    let d = validate_kernel(k).map_err(|e| e.to_string())?;
                    worst_sym = worst_sym.max(d.symmetry_deviation);
                    worst_eig = worst_eig.min(d.min_eigenvalue);
                    worst_diag = worst_diag.max(d.diag_max_dev);
                }
            }
        }
        if worst_sym > 1e-10 {
            return Err(format!("symmetry deviation {worst_sym:e} > 1e-10"));
        }
        if worst_eig < -1e-8 {
            return Err(format!("min eigenvalue {worst_eig:e} < -1e-8"));
        }
        if worst_diag > 1e-10 {
            return Err(format!("diagonal deviation {worst_diag:e} > 1e-10"));
        }
        let elapsed = started.elapsed().as_secs_f64();
        if elapsed >= 30.0 {
            return Err(format!("runtime {elapsed:.1} s >= 30 s"));
        }
        Ok(format!(
            "closed-form dev {worst:.1e}; Gram sym {worst_sym:.1e}, min eig {worst_eig:.1e}, diag {worst_diag:.1e}; {elapsed:.1} s"
        ))
    })();
    report(1, "quantum-kernel correctness", outcome);
}

// ---------------------------------------------------------------- criterion 2

#[test]
fn criterion_2_rdm_bloch_correctness() {
    let outcome = (|| -> Result<String, String> {
        // Bell pair: both reductions equal I/2
        let mut bell = Statevector::zero_state(2).map_err(|e| e.to_string())?;
        bell.apply_gate(qal_core::qsim::Gate::H { q: 0 })
            .map_err(|e| e.to_string())?;
        bell.apply_gate(qal_core::qsim::Gate::Cx {
            control: 0,
            target: 1,
        })
        .map_err(|e| e.to_string())?;
        let mut worst_bell = 0.0f64;
        for k in 0..2 {
            let rho = reduced_density_matrix(&bell, k).map_err(|e| e.to_string())?;
            let e = rho.elements();
            worst_bell = worst_bell
                .max((e[0][0].re - 0.5).abs())
                .max((e[1][1].re - 0.5).abs())
                .max(e[0][1].norm())
                .max(e[1][0].norm());
        }
        if worst_bell > 1e-10 {
            return Err(format!("Bell 1-RDM deviates from I/2 by {worst_bell:e}"));
        }

        // product states factorize into single-qubit projectors
        let spec = build_feature_map(FeatureMapFamily::Z, 4, 3, Entanglement::None)
            .map_err(|e| e.to_string())?;
        let single = build_feature_map(FeatureMapFamily::Z, 1, 3, Entanglement::None)
            .map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut worst_product = 0.0f64;
        for _ in 0..50 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let state = encode_state(&spec, &x).map_err(|e| e.to_string())?;
            for k in 0..4 {
                let rho = reduced_density_matrix(&state, k).map_err(|e| e.to_string())?;
                let sub = encode_state(&single, &[x[k]]).map_err(|e| e.to_string())?;
                let amp = sub.amplitudes();
                let got = rho.elements();
                for r in 0..2 {
                    for c in 0..2 {
                        worst_product =
                            worst_product.max((got[r][c] - amp[r] * amp[c].conj()).norm());
                    }
                }
            }
        }
        if worst_product > 1e-10 {
            return Err(format!("product-state RDM deviation {worst_product:e}"));
        }

        // PQK self-kernel exactly 1 within 1e-12
        let spec = build_feature_map(FeatureMapFamily::HighDim, 3, 4, Entanglement::Linear)
            .map_err(|e| e.to_string())?;
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![0.3 * i as f64, -0.1 * i as f64, 1.0])
            .collect();
        let k = pqk_matrix(&spec, &rows, &ids(10), None, 1.7).map_err(|e| e.to_string())?;
        let mut worst_diag = 0.0f64;
        for i in 0..10 {
            worst_diag = worst_diag.max((k.values.get(i, i) - 1.0).abs());
        }
        if worst_diag > 1e-12 {
            return Err(format!("PQK(x,x) deviates from 1 by {worst_diag:e}"));
        }
        Ok(format!(
            "Bell dev {worst_bell:.1e}; product dev {worst_product:.1e}; PQK diag dev {worst_diag:.1e}"
        ))
    })();
    report(2, "RDM/Bloch correctness", outcome);
}

// ---------------------------------------------------------------- criterion 3

#[path = "support/qp_oracle.rs"]
mod qp_oracle;

#[test]
fn criterion_3_surrogate_oracles() {
    let outcome = (|| -> Result<String, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(3003);
        let mut worst_gap = 0.0f64;
        let mut worst_kkt = 0.0f64;
        for case in 0..50 {
            let n = rng.gen_range(3..=12);
            let k = qp_oracle::random_unit_psd(n, &mut rng);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let c = [1.0, 5.0, 10.0][case % 3];
            let epsilon = [0.0, 0.01, 0.1][case % 3];
            let params = SvrParams::new(c).with_epsilon(epsilon).with_tol(1e-7);
            let kernel = qp_oracle::kernel_matrix(k.clone());
            let model =
                fit_svr(&kernel, &y, &params).map_err(|e| format!("case {case}: {e}"))?;
            let kkt = model
                .kkt_residual(&kernel, &y)
                .map_err(|e| format!("case {case}: {e}"))?;
            worst_kkt = worst_kkt.max(kkt);
            let oracle_obj = qp_oracle::solve(&k, &y, c, epsilon);
            let smo_obj = dual_objective(&k, &y, &model.dual_coeffs, epsilon);
            worst_gap = worst_gap.max((smo_obj - oracle_obj).abs());
        }
        if worst_gap > 1e-6 {
            return Err(format!("SVR objective gap {worst_gap:e} > 1e-6"));
        }
        if worst_kkt > 1e-6 {
            return Err(format!("SVR KKT residual {worst_kkt:e} > 1e-6"));
        }

        // GPR against the dense-inverse oracle
        let mut worst_mu = 0.0f64;
        let mut worst_var = 0.0f64;
        for case in 0..50 {
            let n = rng.gen_range(2..=8);
            let k = qp_oracle::random_unit_psd(n, &mut rng);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let sigma_reg = [0.01f64, 0.1, 1.0][case % 3];
            let kernel = qp_oracle::kernel_matrix(k.clone());
            let model = fit_gpr(&kernel, &y, sigma_reg).map_err(|e| e.to_string())?;
            let m = rng.gen_range(1..=4);
            let mut cross = Mat::zeros(m, n);
            let mut diag = Vec::with_capacity(m);
            for j in 0..m {
                for i in 0..n {
                    cross.set(j, i, rng.gen_range(-0.9..0.9));
                }
                diag.push(rng.gen_range(0.8..1.2));
            }
            let k_cross = KernelMatrix {
                values: cross.clone(),
                row_ids: (0..m).map(|i| format!("v{i}")).collect(),
                col_ids: kernel.col_ids.clone(),
                provenance: kernel.provenance.clone(),
            };
            let est = predict_gpr(&model, &k_cross, &diag).map_err(|e| e.to_string())?;
            let (mu_ref, var_ref) = qp_oracle::gpr_reference(&k, &y, sigma_reg, &cross, &diag);
            for j in 0..m {
                worst_mu = worst_mu.max((est.mu[j] - mu_ref[j]).abs());
                worst_var = worst_var.max((est.sigma[j] * est.sigma[j] - var_ref[j]).abs());
            }
        }
        if worst_mu > 1e-8 || worst_var > 1e-8 {
            return Err(format!(
                "GPR deviation mu {worst_mu:e} / var {worst_var:e} > 1e-8"
            ));
        }

        // the scalar hand case: k(x,x)=1, y=2, σ²_reg=1 → μ=1, σ²=0.5
        let kernel = qp_oracle::kernel_matrix(Mat::identity(1));
        let model = fit_gpr(&kernel, &[2.0], 1.0).map_err(|e| e.to_string())?;
        let est = predict_gpr(&model, &kernel, &[1.0]).map_err(|e| e.to_string())?;
        if (est.mu[0] - 1.0).abs() > 1e-12 || (est.sigma[0] * est.sigma[0] - 0.5).abs() > 1e-12 {
            return Err(format!(
                "scalar case gave mu {} sigma² {}",
                est.mu[0],
                est.sigma[0] * est.sigma[0]
            ));
        }
        Ok(format!(
            "SVR gap {worst_gap:.1e}, KKT {worst_kkt:.1e}; GPR mu {worst_mu:.1e}, var {worst_var:.1e}"
        ))
    })();
    report(3, "surrogate oracles", outcome);
}

// ---------------------------------------------------------------- criterion 4

#[test]
fn criterion_4_acquisition_closed_forms() {
    let outcome = (|| -> Result<String, String> {
        let v1 = ei_min(0.0, 1.0, 0.0).map_err(|e| e.to_string())?;
        if (v1 - 0.39894).abs() > 1e-5 {
            return Err(format!("ei_min(0,1,0) = {v1}, expected 0.39894 ± 1e-5"));
        }
        let v2 = ei_min(-1.0, 1.0, 0.0).map_err(|e| e.to_string())?;
        if (v2 - 1.08332).abs() > 1e-5 {
            return Err(format!("ei_min(-1,1,0) = {v2}, expected 1.08332 ± 1e-5"));
        }

        // nondecreasing in σ on a numeric grid
        for &(mu, f) in &[(0.0, 0.0), (0.7, 0.0), (-1.3, 0.4)] {
            let mut prev = -1.0;
            for step in 0..500 {
                let sigma = step as f64 * 0.01;
                let ei = ei_min(mu, sigma, f).map_err(|e| e.to_string())?;
                if ei < prev - 1e-12 {
                    return Err(format!("EI decreased in sigma at mu={mu}, sigma={sigma}"));
                }
                prev = ei;
            }
        }

        // σ→0 limit
        let mut worst_limit = 0.0f64;
        for &t in &[-1.5, -0.5, 0.5, 1.5] {
            let ei = ei_min(-t, 1e-6, 0.0).map_err(|e| e.to_string())?;
            worst_limit = worst_limit.max((ei - t.max(0.0)).abs());
        }
        if worst_limit > 1e-8 {
            return Err(format!("sigma→0 limit deviation {worst_limit:e} > 1e-8"));
        }

        // reflection identity
        let mut rng = ChaCha8Rng::seed_from_u64(4004);
        let mut worst_reflect = 0.0f64;
        for _ in 0..500 {
            let mu = rng.gen_range(-4.0..4.0);
            let sigma = rng.gen_range(0.0..3.0);
            let f = rng.gen_range(-4.0..4.0);
            let a = ei_max(mu, sigma, f).map_err(|e| e.to_string())?;
            let b = ei_min(-mu, sigma, -f).map_err(|e| e.to_string())?;
            worst_reflect = worst_reflect.max((a - b).abs());
        }
        if worst_reflect > 1e-12 {
            return Err(format!("reflection identity deviation {worst_reflect:e}"));
        }
        Ok(format!(
            "phi(0) case {v1:.5}; unit case {v2:.5}; limit dev {worst_limit:.1e}; reflection dev {worst_reflect:.1e}"
        ))
    })();
    report(4, "acquisition closed forms", outcome);
}

// ---------------------------------------------------------------- criterion 5

#[test]
fn criterion_5_descriptor_pins() {
    use qal_core::descriptors::{
        double_perovskite_descriptor, single_perovskite_descriptor, spin_descriptor,
        tolerance_factors, DescriptorError, DoublePerovskiteComposition, IonPropertyTable,
        PerovskiteComposition, SiteIon,
    };
    let outcome = (|| -> Result<String, String> {
        let spin = spin_descriptor(4).map_err(|e| e.to_string())?;
        if spin[0] != 4.0 || spin[1] != 1.5 || (spin[2] - 3.8730).abs() > 5e-3 || spin[3] != 3.0 {
            return Err(format!("spin_descriptor(4) = {spin:?}"));
        }

        let table = IonPropertyTable::builtin();
        let single = single_perovskite_descriptor(
            &PerovskiteComposition {
                site_a: vec![SiteIon::from_label("Ba2+", 1.0).map_err(|e| e.to_string())?],
                site_b: vec![SiteIon::from_label("Ti4+", 1.0).map_err(|e| e.to_string())?],
            },
            &table,
        )
        .map_err(|e| e.to_string())?;
        if single.len() != 34 {
            return Err(format!("single descriptor length {} != 34", single.len()));
        }
        let double = double_perovskite_descriptor(
            &DoublePerovskiteComposition {
                site_a: vec![SiteIon::from_label("La3+", 1.0).map_err(|e| e.to_string())?],
                site_a_prime: vec![SiteIon::from_label("Sr2+", 1.0).map_err(|e| e.to_string())?],
                site_b: vec![SiteIon::from_label("Fe3+", 1.0).map_err(|e| e.to_string())?],
                site_b_prime: vec![SiteIon::from_label("Ti4+", 1.0).map_err(|e| e.to_string())?],
            },
            &table,
        )
        .map_err(|e| e.to_string())?;
        if double.len() != 64 {
            return Err(format!("double descriptor length {} != 64", double.len()));
        }

        match tolerance_factors(0.9, 0.9, 1.4, 2.0) {
            Err(DescriptorError::ToleranceSingularity) => {}
            other => return Err(format!("equal radii gave {other:?}, expected singularity")),
        }

        // PCA orthonormality at 1e-8
        let mut rng = ChaCha8Rng::seed_from_u64(5005);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let pca = qal_core::descriptors::pca_fit(&rows, 5).map_err(|e| e.to_string())?;
        let mut worst = 0.0f64;
        for i in 0..5 {
            for j in 0..5 {
                let dot: f64 = pca
                    .components
                    .row(i)
                    .iter()
                    .zip(pca.components.row(j))
                    .map(|(a, b)| a * b)
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - expect).abs());
            }
        }
        if worst > 1e-8 {
            return Err(format!("PCA orthonormality deviation {worst:e} > 1e-8"));
        }
        Ok(format!(
            "spin [4, 1.5, {:.4}, 3]; lengths 34/64; singularity raised; PCA dev {worst:.1e}",
            spin[2]
        ))
    })();
    report(5, "descriptor pins", outcome);
}

// ---------------------------------------------------------------- criterion 6

fn bowl_campaign_config(
    acquisition: AcquisitionChoice,
    kernel: KernelKind,
    threshold: f64,
) -> CampaignConfig {
    CampaignConfig {
        objective: Direction::Minimize,
        surrogate: SurrogateKind::Svr(SvrParams::new(1000.0).with_epsilon(0.01)),
        kernel,
        uncertainty: UncertaintyConfig::Cv { folds: 5 },
        acquisition,
        n_init: 10,
        init_constraint: Some(InitConstraint {
            threshold,
            direction: ConstraintDirection::Ge,
        }),
        n_selected: 1,
        n_cycles: 30,
        n_runs: 20,
        master_seed: 20260810,
        preprocessing: Preprocessing {
            scale: false,
            pca_components: None,
        },
        report_split: None,
    }
}

/// First cycle in which the optimum is selected; `31` means not found.
fn cycles_to_optimum(result: &CampaignResult, optimum_id: &str, n_cycles: usize) -> Vec<usize> {
    result
        .runs
        .iter()
        .map(|run| {
            run.selections
                .iter()
                .find(|s| s.id == optimum_id)
                .map(|s| s.cycle)
                .unwrap_or(n_cycles + 1)
        })
        .collect()
}

fn median(values: &[usize]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2] as f64
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) as f64 / 2.0
    }
}

#[test]
fn criterion_6_loop_behavior() {
    let started = Instant::now();
    let outcome = (|| -> Result<String, String> {
        let synth = synthetic_dataset(SyntheticKind::SmoothBowl, 100, 7, 616)
            .map_err(|e| e.to_string())?;
        // constrain the initial pool away from the optimum: only the worse
        // three quarters of the targets qualify
        let mut targets: Vec<f64> = synth.dataset.records().iter().map(|r| r.target).collect();
        targets.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let threshold = targets[25];

        let quantum_spec = build_feature_map(FeatureMapFamily::Z, 7, 2, Entanglement::None)
            .map_err(|e| e.to_string())?;
        let quantum = bowl_campaign_config(
            AcquisitionChoice::Ei,
            KernelKind::Fqk { spec: quantum_spec },
            threshold,
        );
        let classical = bowl_campaign_config(
            AcquisitionChoice::Ei,
            KernelKind::Rbf { gamma: 0.1 },
            threshold,
        );
        let random = bowl_campaign_config(
            AcquisitionChoice::Random,
            KernelKind::Rbf { gamma: 0.1 },
            threshold,
        );

        let quantum_result = run_campaign(&quantum, &synth.dataset).map_err(|e| e.to_string())?;
        let classical_result =
            run_campaign(&classical, &synth.dataset).map_err(|e| e.to_string())?;
        let random_result = run_campaign(&random, &synth.dataset).map_err(|e| e.to_string())?;

        let q_cycles = cycles_to_optimum(&quantum_result, &synth.optimum_id, 30);
        let c_cycles = cycles_to_optimum(&classical_result, &synth.optimum_id, 30);
        let r_cycles = cycles_to_optimum(&random_result, &synth.optimum_id, 30);

        let q_hits = q_cycles.iter().filter(|&&c| c <= 30).count();
        let c_hits = c_cycles.iter().filter(|&&c| c <= 30).count();
        if q_hits < 18 {
            return Err(format!("quantum campaign found the optimum in {q_hits}/20 runs (< 18)"));
        }
        if c_hits < 18 {
            return Err(format!(
                "classical campaign found the optimum in {c_hits}/20 runs (< 18)"
            ));
        }
        let q_median = median(&q_cycles);
        let r_median = median(&r_cycles);
        if !(q_median < r_median) {
            return Err(format!(
                "EI median {q_median} does not beat seed-paired random {r_median}"
            ));
        }
        let elapsed = started.elapsed().as_secs_f64();
        if elapsed >= 300.0 {
            return Err(format!("runtime {elapsed:.0} s >= 300 s"));
        }
        Ok(format!(
            "quantum {q_hits}/20 (median {q_median}), classical {c_hits}/20 (median {}), random median {r_median}; {elapsed:.0} s",
            median(&c_cycles)
        ))
    })();
    report(6, "loop behavior on the smooth bowl", outcome);
}

// ---------------------------------------------------------------- criterion 7

#[path = "support/replay.rs"]
mod replay;

#[test]
fn criterion_7_paper_protocol_replay() {
    let outcome = replay::run_all();
    report(7, "paper-protocol replay", outcome);
}

// ---------------------------------------------------------------- criterion 8

#[test]
fn criterion_8_thread_count_determinism() {
    let outcome = (|| -> Result<String, String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let dataset_path = dir.path().join("data.csv");
        let synth = synthetic_dataset(SyntheticKind::SmoothBowl, 40, 4, 88)
            .map_err(|e| e.to_string())?;
        let names: Vec<String> = (0..4).map(|i| format!("f{i}")).collect();
        let csv = qal_cli::dataset::write_dataset_csv(synth.dataset.records(), &names)
            .map_err(|e| e.to_string())?;
        std::fs::write(&dataset_path, csv).map_err(|e| e.to_string())?;
        let config_text = format!(
            r#"
[campaign]
objective = "minimize"
n_init = 6
n_selected = 2
n_cycles = 6
n_runs = 5
master_seed = 424242
report_split = 0.9

[surrogate]
model = "svr"
kernel = "fqk"
c = 500.0

[surrogate.feature_map]
family = "zz"
n_qubits = 4
reps = 2
entanglement = "full"

[uncertainty]
method = "cv"
folds = 3

[preprocessing]
scale = true

[data]
dataset = {dataset_path:?}
"#
        );
        let config_path = dir.path().join("c.toml");
        std::fs::write(&config_path, config_text).map_err(|e| e.to_string())?;

        let run_with = |threads: usize, sub: &str| -> Result<(), String> {
            let out_dir = dir.path().join(sub);
            let code = qal_cli::dispatch([
                "qal",
                "campaign",
                "--config",
                config_path.to_str().unwrap(),
                "--out",
                out_dir.to_str().unwrap(),
                "--threads",
                &threads.to_string(),
            ]);
            if code != 0 {
                return Err(format!("campaign with {threads} threads exited {code}"));
            }
            Ok(())
        };
        run_with(1, "one")?;
        run_with(4, "four")?;
        run_with(1, "one_again")?;

        let mut compared = 0;
        for file in [
            "trajectory.csv",
            "aggregate.csv",
            "kde.csv",
            "diagnostics.csv",
            "manifest.toml",
        ] {
            let read = |sub: &str| -> Result<Vec<u8>, String> {
                std::fs::read(dir.path().join(sub).join(file))
                    .map_err(|e| format!("{file}: {e}"))
            };
            let one = read("one")?;
            if one != read("four")? {
                return Err(format!("{file} differs between 1 and 4 threads"));
            }
            if one != read("one_again")? {
                return Err(format!("{file} differs between identical invocations"));
            }
            compared += 1;
        }
        Ok(format!("{compared} result files byte-identical across 1/4 threads and reruns"))
    })();
    report(8, "thread-count determinism", outcome);
}

// keep the oracle-injection style check close to the loop criteria: an
// exactly-learnable target must be exploited immediately
#[test]
fn exploit_with_exact_surrogate_is_immediate() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let weights: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let records: Vec<MaterialRecord> = (0..20)
        .map(|i| {
            let features: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let target = features.iter().zip(&weights).map(|(x, w)| x * w).sum();
            MaterialRecord {
                id: format!("lin{i}"),
                features,
                target,
            }
        })
        .collect();
    let best_id = records
        .iter()
        .min_by(|a, b| a.target.partial_cmp(&b.target).unwrap())
        .unwrap()
        .id
        .clone();
    let dataset = Dataset::new(records).unwrap();
    let config = CampaignConfig {
        objective: Direction::Minimize,
        surrogate: SurrogateKind::Gpr { sigma_reg: 0.0 },
        kernel: KernelKind::DotWhite {
            sigma0_sq: 1.0,
            noise: 0.0,
        },
        uncertainty: UncertaintyConfig::GprAnalytic,
        acquisition: AcquisitionChoice::Exploit,
        n_init: 4,
        init_constraint: None,
        n_selected: 1,
        n_cycles: 2,
        n_runs: 1,
        master_seed: 31,
        preprocessing: Preprocessing::default(),
        report_split: None,
    };
    let result = run_single(&config, &dataset, 0, run_seed(31, 0)).unwrap();
    if !result.observed_ids[..4].contains(&best_id) {
        assert_eq!(result.selections[0].id, best_id);
    }
}
