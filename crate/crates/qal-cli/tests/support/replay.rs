//! End-to-end replay of the four reference campaign protocols against
//! schema-compatible synthetic stand-in datasets. Each system's pinned loop
//! parameters (initial pool size and constraint, batch size, cycle budget,
//! qubit count, repetitions, 5-fold CV) are encoded in a config document,
//! parsed, validated and executed through the CLI dispatch path, and the
//! emitted trajectory/aggregate/KDE files are checked for shape and
//! per-run monotone best-so-far.

use std::fmt::Write as _;
use std::path::Path;

use qal_core::campaign::{synthetic_dataset, SyntheticKind};
use qal_core::descriptors::{
    double_perovskite_descriptor, DoublePerovskiteComposition, IonPropertyTable, SiteIon,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Monotonically maps raw scores onto an evenly spaced target range by rank;
/// `ascending = false` hands the best (lowest) raw score the top value.
fn rank_map(scores: &[f64], lo: f64, hi: f64, ascending: bool) -> Vec<f64> {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].partial_cmp(&scores[b]).unwrap());
    let mut out = vec![0.0; n];
    for (rank, &idx) in order.iter().enumerate() {
        let frac = rank as f64 / (n - 1) as f64;
        let frac = if ascending { frac } else { 1.0 - frac };
        out[idx] = lo + (hi - lo) * frac;
    }
    out
}

fn write_feature_dataset(
    path: &Path,
    ids: &[String],
    features: &[Vec<f64>],
    targets: &[f64],
) -> Result<(), String> {
    let dim = features[0].len();
    let mut csv = String::from("id");
    for i in 0..dim {
        let _ = write!(csv, ",f{i}");
    }
    csv.push_str(",target\n");
    for ((id, feats), target) in ids.iter().zip(features).zip(targets) {
        csv.push_str(id);
        for v in feats {
            let _ = write!(csv, ",{v}");
        }
        let _ = writeln!(csv, ",{target}");
    }
    std::fs::write(path, csv).map_err(|e| e.to_string())
}

struct System {
    name: &'static str,
    config_file: &'static str,
    objective_max: bool,
    n_runs: usize,
    n_cycles: usize,
}

/// System I stand-in: 74 records, 7 raw features, piezoelectric-like targets
/// in pC/N with at least 22 records at or below 300.
fn system_i(dir: &Path) -> Result<System, String> {
    let synth =
        synthetic_dataset(SyntheticKind::SmoothBowl, 74, 7, 710).map_err(|e| e.to_string())?;
    let records = synth.dataset.records();
    let scores: Vec<f64> = records.iter().map(|r| r.target).collect();
    let targets = rank_map(&scores, 50.0, 600.0, false);
    let ids: Vec<String> = records.iter().map(|r| r.id.clone()).collect();
    let features: Vec<Vec<f64>> = records.iter().map(|r| r.features.clone()).collect();
    write_feature_dataset(&dir.join("system1.csv"), &ids, &features, &targets)?;
    let below = targets.iter().filter(|t| **t <= 300.0).count();
    if below < 22 {
        return Err(format!("system I stand-in has only {below} records <= 300"));
    }
    Ok(System {
        name: "I",
        config_file: "system_i.toml",
        objective_max: true,
        n_runs: 2,
        n_cycles: 20,
    })
}

/// System II stand-in: 54 double-perovskite compositions featurized to 64
/// entries, band-gap-like targets in eV with at least 10 records >= 2.0.
fn system_ii(dir: &Path) -> Result<System, String> {
    let table = IonPropertyTable::builtin();
    let a_ions = ["Ba2+", "Sr2+", "Ca2+", "La3+", "Na+", "K+", "Pb2+", "Bi3+"];
    let b_ions = [
        "Ti4+", "Zr4+", "Sn4+", "Hf4+", "Nb5+", "Ta5+", "Fe3+", "Al3+", "Sc3+", "Mn3+",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(720);
    let mut features = Vec::with_capacity(54);
    let mut ids = Vec::with_capacity(54);
    for i in 0..54 {
        let pick = |rng: &mut ChaCha8Rng, pool: &[&str]| -> Result<Vec<SiteIon>, String> {
            let ion = pool[rng.gen_range(0..pool.len())];
            SiteIon::from_label(ion, 1.0)
                .map(|s| vec![s])
                .map_err(|e| e.to_string())
        };
        let comp = DoublePerovskiteComposition {
            site_a: pick(&mut rng, &a_ions)?,
            site_a_prime: pick(&mut rng, &a_ions)?,
            site_b: pick(&mut rng, &b_ions)?,
            site_b_prime: pick(&mut rng, &b_ions)?,
        };
        features.push(double_perovskite_descriptor(&comp, &table).map_err(|e| e.to_string())?);
        ids.push(format!("dp{i:03}"));
    }
    // smooth composite of the descriptor drives the band-gap-like target
    let scores: Vec<f64> = features
        .iter()
        .map(|f| f.iter().enumerate().map(|(i, v)| v * ((i as f64 * 0.37).sin())).sum())
        .collect();
    let targets = rank_map(&scores, 0.5, 4.0, true);
    write_feature_dataset(&dir.join("system2.csv"), &ids, &features, &targets)?;
    let above = targets.iter().filter(|t| **t >= 2.0).count();
    if above < 10 {
        return Err(format!("system II stand-in has only {above} records >= 2.0"));
    }
    Ok(System {
        name: "II",
        config_file: "system_ii.toml",
        objective_max: false,
        n_runs: 2,
        n_cycles: 20,
    })
}

/// System III stand-in: 242 single-perovskite records with the 34-entry
/// descriptor and energy-storage-like targets in mJ/cm³, at least 73 at or
/// below 65.
fn system_iii(dir: &Path) -> Result<System, String> {
    let synth = synthetic_dataset(SyntheticKind::PerovskiteLike, 242, 1, 730)
        .map_err(|e| e.to_string())?;
    let records = synth.dataset.records();
    let scores: Vec<f64> = records.iter().map(|r| r.target).collect();
    let targets = rank_map(&scores, 5.0, 130.0, true);
    let ids: Vec<String> = records.iter().map(|r| r.id.clone()).collect();
    let features: Vec<Vec<f64>> = records.iter().map(|r| r.features.clone()).collect();
    write_feature_dataset(&dir.join("system3.csv"), &ids, &features, &targets)?;
    let below = targets.iter().filter(|t| **t <= 65.0).count();
    if below < 73 {
        return Err(format!("system III stand-in has only {below} records <= 65"));
    }
    Ok(System {
        name: "III",
        config_file: "system_iii.toml",
        objective_max: true,
        n_runs: 2,
        n_cycles: 50,
    })
}

/// System IV stand-in: 55 dopant arrangements of a 14-atom cluster, three
/// spin multiplicities each (165 records), energies from a pair potential
/// plus a multiplicity penalty; the doublet sheet carries the minimum. The
/// dataset ships as an id,target CSV plus an XYZ sidecar directory.
fn system_iv(dir: &Path) -> Result<System, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(740);
    // one shared 14-site geometry; arrangements differ in which sites carry Al
    let mut sites: Vec<[f64; 3]> = Vec::new();
    while sites.len() < 14 {
        let p = [
            rng.gen_range(0.0..7.0),
            rng.gen_range(0.0..7.0),
            rng.gen_range(0.0..7.0),
        ];
        let ok = sites.iter().all(|s| {
            let d2: f64 = s.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum();
            d2 > 4.0
        });
        if ok {
            sites.push(p);
        }
    }
    // every 6th 3-subset of the 14 sites, 55 arrangements
    let mut arrangements = Vec::new();
    'outer: for a in 0..14 {
        for b in (a + 1)..14 {
            for c in (b + 1)..14 {
                arrangements.push([a, b, c]);
                if arrangements.len() >= 55 * 6 {
                    break 'outer;
                }
            }
        }
    }
    let arrangements: Vec<[usize; 3]> = arrangements.into_iter().step_by(6).take(55).collect();

    let pair_energy = |al: &[usize; 3]| -> f64 {
        let mut e = 0.0;
        for i in 0..14 {
            for j in (i + 1)..14 {
                let d2: f64 = sites[i]
                    .iter()
                    .zip(&sites[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                let d = d2.sqrt();
                let depth = match (al.contains(&i), al.contains(&j)) {
                    (true, true) => 0.6,
                    (true, false) | (false, true) => 0.9,
                    (false, false) => 1.0,
                };
                let r = 2.35 / d;
                e += depth * (r.powi(12) - 2.0 * r.powi(6));
            }
        }
        e
    };

    let xyz_dir = dir.join("xyz");
    std::fs::create_dir_all(&xyz_dir).map_err(|e| e.to_string())?;
    let mut index = String::from("id,target\n");
    let mut energies = Vec::new();
    for (h, al) in arrangements.iter().enumerate() {
        let base = pair_energy(al);
        for sm in [2u32, 4, 6] {
            let id = format!("h{h:03}_m{sm}");
            let mut xyz = String::new();
            let _ = writeln!(xyz, "14");
            let _ = writeln!(xyz, "arrangement {h} multiplicity={sm}");
            for (s, pos) in sites.iter().enumerate() {
                let element = if al.contains(&s) { "Al" } else { "Si" };
                let _ = writeln!(xyz, "{element} {} {} {}", pos[0], pos[1], pos[2]);
            }
            std::fs::write(xyz_dir.join(format!("{id}.xyz")), xyz).map_err(|e| e.to_string())?;
            let penalty = 0.25 * (sm as f64 / 2.0 - 1.0) * (1.0 + 0.2 * (h as f64).sin());
            let energy = base + penalty;
            let _ = writeln!(index, "{id},{energy}");
            energies.push(energy);
        }
    }
    std::fs::write(dir.join("system4.csv"), index).map_err(|e| e.to_string())?;

    // the shipped config freezes the 40th-percentile constraint threshold of
    // this seeded stand-in; verify the frozen value still splits the data
    let mut sorted = energies.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let threshold = sorted[(energies.len() as f64 * 0.4) as usize];
    let frozen = -12.715817367589_f64;
    if (threshold - frozen).abs() > 1e-9 {
        return Err(format!(
            "system IV threshold drifted: generator {threshold}, shipped config {frozen}"
        ));
    }
    Ok(System {
        name: "IV",
        config_file: "system_iv.toml",
        objective_max: false,
        n_runs: 2,
        n_cycles: 60,
    })
}

fn check_outputs(dir: &Path, system: &System) -> Result<(), String> {
    let out_dir = dir.join(format!("out_{}", system.name));
    let trajectory = std::fs::read_to_string(out_dir.join("trajectory.csv"))
        .map_err(|e| format!("system {}: trajectory.csv: {e}", system.name))?;
    let mut lines = trajectory.lines();
    if lines.next() != Some("run,cycle,selected_ids,best_so_far") {
        return Err(format!("system {}: trajectory header malformed", system.name));
    }
    let mut per_run: Vec<Vec<f64>> = vec![Vec::new(); system.n_runs];
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(format!("system {}: bad trajectory row {line:?}", system.name));
        }
        let run: usize = fields[0].parse().map_err(|_| "bad run index".to_string())?;
        let best: f64 = fields[3].parse().map_err(|_| "bad best value".to_string())?;
        per_run[run].push(best);
    }
    for (run, bests) in per_run.iter().enumerate() {
        if bests.len() != system.n_cycles + 1 {
            return Err(format!(
                "system {}: run {run} has {} trajectory rows, expected {}",
                system.name,
                bests.len(),
                system.n_cycles + 1
            ));
        }
        for w in bests.windows(2) {
            let ok = if system.objective_max {
                w[1] >= w[0]
            } else {
                w[1] <= w[0]
            };
            if !ok {
                return Err(format!(
                    "system {}: run {run} best-so-far is not monotone",
                    system.name
                ));
            }
        }
    }
    let aggregate = std::fs::read_to_string(out_dir.join("aggregate.csv"))
        .map_err(|e| format!("system {}: aggregate.csv: {e}", system.name))?;
    if aggregate.lines().count() != system.n_cycles + 2 {
        return Err(format!("system {}: aggregate row count off", system.name));
    }
    let kde = std::fs::read_to_string(out_dir.join("kde.csv"))
        .map_err(|e| format!("system {}: kde.csv: {e}", system.name))?;
    if !kde.starts_with("grid,density\n") || kde.lines().count() < 10 {
        return Err(format!("system {}: kde.csv malformed", system.name));
    }
    Ok(())
}

pub fn run_all() -> Result<String, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let systems = [
        system_i(dir.path())?,
        system_ii(dir.path())?,
        system_iii(dir.path())?,
        system_iv(dir.path())?,
    ];
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for system in &systems {
        let config_path = dir.path().join(system.config_file);
        std::fs::copy(shipped.join(system.config_file), &config_path)
            .map_err(|e| format!("copying {}: {e}", system.config_file))?;
        let out_dir = dir.path().join(format!("out_{}", system.name));
        let code = qal_cli::dispatch([
            "qal",
            "campaign",
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
            "--runs",
            &system.n_runs.to_string(),
        ]);
        if code != 0 {
            return Err(format!("system {} campaign exited {code}", system.name));
        }
        check_outputs(dir.path(), system)?;
    }
    Ok("systems I-IV executed end-to-end with monotone trajectories and full result files".into())
}
