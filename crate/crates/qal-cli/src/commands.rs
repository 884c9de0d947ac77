//! Subcommand implementations.

use std::path::{Path, PathBuf};

use crate::args::{Cli, Command, DescriptorKind};
use crate::config::{self, CliConfig, MbtrSection};
use crate::dataset::{
    featurize_structures, read_dataset, read_structure_dataset, write_dataset_csv, LoadedDataset,
};
use crate::emit::{self, Manifest};
use crate::error::CliError;
use crate::runner::{build_square_kernel_threaded, run_campaign_threaded};
use qal_core::campaign::{
    aggregate_runs, kde, kde_grid, silverman_bandwidth, synthetic_dataset, SyntheticKind,
};
use qal_core::descriptors::{
    double_perovskite_columns, double_perovskite_descriptor, parse_xyz, pca_fit, pca_transform,
    single_perovskite_columns, single_perovskite_descriptor, spin_columns, spin_descriptor,
    standard_scale_fit, standard_scale_transform, DoublePerovskiteComposition, IonPropertyTable,
    PerovskiteComposition, SiteIon, Structure,
};
use qal_core::kernels::kernel_to_csv;
use qal_core::regress::{
    fit_gpr_jittered, fit_svr, grid_search, mae, predict_svr, train_test_split, Grid, GridProblem,
    SurrogateKind,
};

pub fn run(cli: Cli) -> Result<(), CliError> {
    let verbose = cli.verbose || std::env::var("QAL_VERBOSE").is_ok_and(|v| v == "1");
    match cli.command {
        Command::Synth {
            kind,
            records,
            dim,
            seed,
            out,
        } => cmd_synth(&kind, records, dim, seed, &out),
        Command::Descriptors {
            kind,
            input,
            xyz_dir,
            table,
            mbtr_min,
            mbtr_max,
            mbtr_bins,
            mbtr_sigma,
            no_spin,
            out,
        } => {
            let mbtr = MbtrSection {
                min: mbtr_min,
                max: mbtr_max,
                n_bins: mbtr_bins,
                sigma: mbtr_sigma,
                spin: !no_spin,
            };
            cmd_descriptors(kind, input.as_deref(), xyz_dir.as_deref(), table.as_deref(), &mbtr, &out)
        }
        Command::Kernel {
            config,
            out,
            threads,
        } => cmd_kernel(&config, &out, threads),
        Command::Fit {
            config,
            seed,
            test_fraction,
        } => cmd_fit(&config, seed, test_fraction),
        Command::Gridsearch { config, out, seed } => cmd_gridsearch(&config, &out, seed),
        Command::Campaign {
            config,
            seed,
            runs,
            out,
            threads,
        } => cmd_campaign(&config, seed, runs, out, threads, verbose),
        Command::Kde {
            input,
            column,
            bandwidth,
            grid_points,
            out,
        } => cmd_kde(&input, &column, bandwidth, grid_points, &out),
    }
}

fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| CliError::data(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    std::fs::write(path, content)
        .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
}

fn cmd_synth(kind: &str, records: usize, dim: usize, seed: u64, out: &Path) -> Result<(), CliError> {
    let kind = SyntheticKind::parse(kind).ok_or_else(|| {
        CliError::usage(format!(
            "unknown synthetic kind {kind:?} (expected smooth_bowl, rough_multimodal or perovskite_like)"
        ))
    })?;
    let synth = synthetic_dataset(kind, records, dim, seed).map_err(CliError::from)?;
    let feature_names: Vec<String> = match kind {
        SyntheticKind::PerovskiteLike => single_perovskite_columns(),
        _ => (0..dim).map(|i| format!("f{i}")).collect(),
    };
    let csv = write_dataset_csv(synth.dataset.records(), &feature_names)?;
    write_text(out, &csv)?;
    println!(
        "records={} optimum_id={} direction={}",
        synth.dataset.len(),
        synth.optimum_id,
        synth.direction.name()
    );
    Ok(())
}

fn parse_site(cell: &str, line: usize) -> Result<Vec<SiteIon>, CliError> {
    let mut ions = Vec::new();
    for part in cell.split_whitespace() {
        let (label, fraction) = part.rsplit_once(':').ok_or_else(|| {
            CliError::data(format!(
                "line {line}: site entry {part:?} is not `Ion:fraction`"
            ))
        })?;
        let fraction: f64 = fraction.parse().map_err(|_| {
            CliError::data(format!("line {line}: bad fraction in {part:?}"))
        })?;
        ions.push(
            SiteIon::from_label(label, fraction)
                .map_err(|e| CliError::data(format!("line {line}: {e}")))?,
        );
    }
    if ions.is_empty() {
        return Err(CliError::data(format!("line {line}: empty site")));
    }
    Ok(ions)
}

struct CompositionRows {
    ids: Vec<String>,
    cells: Vec<Vec<String>>,
    targets: Option<Vec<f64>>,
}

fn read_composition_csv(
    path: &Path,
    expected_header: &[&str],
) -> Result<CompositionRows, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::data(format!("{}: empty file", path.display())))?;
    let cols: Vec<&str> = header.split(',').collect();
    let with_target = cols.last() == Some(&"target");
    let body_cols = if with_target { &cols[..cols.len() - 1] } else { &cols[..] };
    if body_cols != expected_header {
        return Err(CliError::data(format!(
            "{}: expected header `{}[,target]`, got {header:?}",
            path.display(),
            expected_header.join(",")
        )));
    }
    let mut ids = Vec::new();
    let mut cells = Vec::new();
    let mut targets = if with_target { Some(Vec::new()) } else { None };
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(CliError::data(format!(
                "{}:{}: expected {} fields, got {}",
                path.display(),
                idx + 1,
                cols.len(),
                fields.len()
            )));
        }
        ids.push(fields[0].to_string());
        let body_end = if with_target { fields.len() - 1 } else { fields.len() };
        cells.push(fields[1..body_end].iter().map(|s| s.to_string()).collect());
        if let Some(t) = targets.as_mut() {
            let v: f64 = fields[fields.len() - 1].trim().parse().map_err(|_| {
                CliError::data(format!(
                    "{}:{}: bad target {:?}",
                    path.display(),
                    idx + 1,
                    fields[fields.len() - 1]
                ))
            })?;
            t.push(v);
        }
    }
    Ok(CompositionRows { ids, cells, targets })
}

fn feature_csv(
    ids: &[String],
    columns: &[String],
    rows: &[Vec<f64>],
    targets: Option<&[f64]>,
) -> String {
    use std::fmt::Write as _;
    let mut out = String::from("id");
    for c in columns {
        out.push(',');
        out.push_str(c);
    }
    if targets.is_some() {
        out.push_str(",target");
    }
    out.push('\n');
    for (i, id) in ids.iter().enumerate() {
        out.push_str(id);
        for v in &rows[i] {
            let _ = write!(out, ",{v}");
        }
        if let Some(t) = targets {
            let _ = write!(out, ",{}", t[i]);
        }
        out.push('\n');
    }
    out
}

fn load_table(path: Option<&Path>) -> Result<IonPropertyTable, CliError> {
    match path {
        None => Ok(IonPropertyTable::builtin()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::data(format!("cannot read {}: {e}", p.display())))?;
            IonPropertyTable::parse_csv(&text)
                .map_err(|e| CliError::data(format!("{}: {e}", p.display())))
        }
    }
}

fn cmd_descriptors(
    kind: DescriptorKind,
    input: Option<&Path>,
    xyz_dir: Option<&Path>,
    table: Option<&Path>,
    mbtr: &MbtrSection,
    out: &Path,
) -> Result<(), CliError> {
    match kind {
        DescriptorKind::Single => {
            let input = input.ok_or_else(|| CliError::usage("--input is required"))?;
            let rows = read_composition_csv(input, &["id", "a_site", "b_site"])?;
            let table = load_table(table)?;
            let mut features = Vec::new();
            for (i, cell) in rows.cells.iter().enumerate() {
                let comp = PerovskiteComposition {
                    site_a: parse_site(&cell[0], i + 2)?,
                    site_b: parse_site(&cell[1], i + 2)?,
                };
                features.push(single_perovskite_descriptor(&comp, &table)?);
            }
            let csv = feature_csv(
                &rows.ids,
                &single_perovskite_columns(),
                &features,
                rows.targets.as_deref(),
            );
            write_text(out, &csv)?;
        }
        DescriptorKind::Double => {
            let input = input.ok_or_else(|| CliError::usage("--input is required"))?;
            let rows = read_composition_csv(
                input,
                &["id", "a_site", "a_prime_site", "b_site", "b_prime_site"],
            )?;
            let table = load_table(table)?;
            let mut features = Vec::new();
            for (i, cell) in rows.cells.iter().enumerate() {
                let comp = DoublePerovskiteComposition {
                    site_a: parse_site(&cell[0], i + 2)?,
                    site_a_prime: parse_site(&cell[1], i + 2)?,
                    site_b: parse_site(&cell[2], i + 2)?,
                    site_b_prime: parse_site(&cell[3], i + 2)?,
                };
                features.push(double_perovskite_descriptor(&comp, &table)?);
            }
            let csv = feature_csv(
                &rows.ids,
                &double_perovskite_columns(),
                &features,
                rows.targets.as_deref(),
            );
            write_text(out, &csv)?;
        }
        DescriptorKind::Spin => {
            let input = input.ok_or_else(|| CliError::usage("--input is required"))?;
            let rows = read_composition_csv(input, &["id", "multiplicity"])?;
            let mut features = Vec::new();
            for (i, cell) in rows.cells.iter().enumerate() {
                let m: u32 = cell[0].trim().parse().map_err(|_| {
                    CliError::data(format!("line {}: bad multiplicity {:?}", i + 2, cell[0]))
                })?;
                features.push(spin_descriptor(m)?.to_vec());
            }
            let csv = feature_csv(&rows.ids, &spin_columns(), &features, rows.targets.as_deref());
            write_text(out, &csv)?;
        }
        DescriptorKind::Xyz => {
            let dir = xyz_dir.ok_or_else(|| CliError::usage("--xyz-dir is required"))?;
            let (entries, structures) = match input {
                Some(index) => {
                    let rows = read_composition_csv(index, &["id"])?;
                    let targets = rows.targets.ok_or_else(|| {
                        CliError::data("xyz index CSV needs the header `id,target`")
                    })?;
                    let entries: Vec<(String, f64)> =
                        rows.ids.into_iter().zip(targets).collect();
                    let structures = entries
                        .iter()
                        .map(|(id, _)| read_structure(dir, id))
                        .collect::<Result<Vec<_>, _>>()?;
                    (entries, structures)
                }
                None => {
                    let mut names: Vec<String> = std::fs::read_dir(dir)
                        .map_err(|e| {
                            CliError::data(format!("cannot read {}: {e}", dir.display()))
                        })?
                        .filter_map(|entry| entry.ok())
                        .filter_map(|entry| {
                            let name = entry.file_name().to_string_lossy().to_string();
                            name.strip_suffix(".xyz").map(|s| s.to_string())
                        })
                        .collect();
                    names.sort();
                    if names.is_empty() {
                        return Err(CliError::data(format!(
                            "{}: no .xyz files",
                            dir.display()
                        )));
                    }
                    let entries: Vec<(String, f64)> =
                        names.iter().map(|n| (n.clone(), 0.0)).collect();
                    let structures = names
                        .iter()
                        .map(|id| read_structure(dir, id))
                        .collect::<Result<Vec<_>, _>>()?;
                    (entries, structures)
                }
            };
            let (records, columns) = featurize_structures(&entries, &structures, mbtr)?;
            let ids: Vec<String> = records.iter().map(|r| r.id.clone()).collect();
            let rows: Vec<Vec<f64>> = records.iter().map(|r| r.features.clone()).collect();
            let targets: Option<Vec<f64>> =
                input.map(|_| records.iter().map(|r| r.target).collect());
            let csv = feature_csv(&ids, &columns, &rows, targets.as_deref());
            write_text(out, &csv)?;
        }
    }
    Ok(())
}

fn read_structure(dir: &Path, id: &str) -> Result<Structure, CliError> {
    let file = dir.join(format!("{id}.xyz"));
    let text = std::fs::read_to_string(&file)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", file.display())))?;
    parse_xyz(&text).map_err(|e| CliError::data(format!("{}: {e}", file.display())))
}

/// Scale/PCA per the config, fit on the given rows.
fn preprocess_all(
    config: &CliConfig,
    rows: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>, CliError> {
    let mut out = rows.to_vec();
    if config.preprocessing.scale {
        let scaler = standard_scale_fit(&out)?;
        out = standard_scale_transform(&scaler, &out)?;
    }
    if let Some(nc) = config.preprocessing.pca_components {
        let pca = pca_fit(&out, nc)?;
        out = pca_transform(&pca, &out)?;
    }
    Ok(out)
}

fn load_config_dataset(config: &CliConfig) -> Result<LoadedDataset, CliError> {
    let dataset = config
        .data
        .dataset
        .as_ref()
        .ok_or_else(|| CliError::data("config: missing data.dataset path"))?;
    match &config.data.xyz_dir {
        Some(dir) => {
            let mbtr = config.mbtr.as_ref().ok_or_else(|| {
                CliError::data("config: structure datasets need an [mbtr] section")
            })?;
            read_structure_dataset(dataset, dir, mbtr)
        }
        None => read_dataset(dataset),
    }
}

fn cmd_kernel(config_path: &Path, out: &Path, threads: usize) -> Result<(), CliError> {
    let config = config::parse_config(config_path)?;
    let kind = config::kernel_kind(&config.surrogate)?;
    let loaded = load_config_dataset(&config)?;
    let rows: Vec<Vec<f64>> = loaded
        .dataset
        .records()
        .iter()
        .map(|r| r.features.clone())
        .collect();
    let ids: Vec<String> = loaded
        .dataset
        .records()
        .iter()
        .map(|r| r.id.clone())
        .collect();
    let rows = preprocess_all(&config, &rows)?;
    let kernel = build_square_kernel_threaded(&kind, &rows, &ids, threads)?;
    write_text(out, &kernel_to_csv(&kernel))?;
    println!("rows={} kernel={}", ids.len(), config.surrogate.kernel);
    Ok(())
}

fn cmd_fit(config_path: &Path, seed: Option<u64>, test_fraction: f64) -> Result<(), CliError> {
    let config = config::parse_config(config_path)?;
    let surrogate = config::surrogate_kind(&config.surrogate)?;
    let kind = config::kernel_kind(&config.surrogate)?;
    let loaded = load_config_dataset(&config)?;
    let seed = seed
        .or_else(|| config.campaign.as_ref().map(|c| c.master_seed))
        .unwrap_or(0);
    let n = loaded.dataset.len();
    let (train, test) = train_test_split(n, test_fraction, seed)?;

    let take = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<String>, Vec<f64>) {
        let records = loaded.dataset.records();
        (
            idx.iter().map(|&i| records[i].features.clone()).collect(),
            idx.iter().map(|&i| records[i].id.clone()).collect(),
            idx.iter().map(|&i| records[i].target).collect(),
        )
    };
    let (f_tr_raw, id_tr, y_tr) = take(&train);
    let (f_te_raw, id_te, y_te) = take(&test);

    // preprocessing is fit on the training split only
    let mut f_tr = f_tr_raw;
    let mut f_te = f_te_raw;
    if config.preprocessing.scale {
        let scaler = standard_scale_fit(&f_tr)?;
        f_tr = standard_scale_transform(&scaler, &f_tr)?;
        f_te = standard_scale_transform(&scaler, &f_te)?;
    }
    if let Some(nc) = config.preprocessing.pca_components {
        let pca = pca_fit(&f_tr, nc)?;
        f_tr = pca_transform(&pca, &f_tr)?;
        f_te = pca_transform(&pca, &f_te)?;
    }

    let k_tr = kind.square(&f_tr, &id_tr)?;
    let k_te = kind.cross(&f_te, &id_te, &f_tr, &id_tr)?;
    let (pred_tr, pred_te) = match &surrogate {
        SurrogateKind::Svr(params) => {
            let model = fit_svr(&k_tr, &y_tr, params)?;
            (predict_svr(&model, &k_tr)?, predict_svr(&model, &k_te)?)
        }
        SurrogateKind::Gpr { sigma_reg } => {
            let model = fit_gpr_jittered(&k_tr, &y_tr, *sigma_reg)?;
            (model.predict_mean(&k_tr)?, model.predict_mean(&k_te)?)
        }
    };
    println!(
        "n_train={} n_test={} train_mae={} test_mae={} seed={seed}",
        train.len(),
        test.len(),
        mae(&y_tr, &pred_tr)?,
        mae(&y_te, &pred_te)?
    );
    Ok(())
}

fn cmd_gridsearch(config_path: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let config = config::parse_config(config_path)?;
    let grid_section = config
        .grid
        .as_ref()
        .ok_or_else(|| CliError::data("config: gridsearch needs a [grid] section"))?;
    let loaded = load_config_dataset(&config)?;
    let rows: Vec<Vec<f64>> = loaded
        .dataset
        .records()
        .iter()
        .map(|r| r.features.clone())
        .collect();
    let features = preprocess_all(&config, &rows)?;
    let problem = GridProblem {
        features,
        ids: loaded
            .dataset
            .records()
            .iter()
            .map(|r| r.id.clone())
            .collect(),
        targets: loaded
            .dataset
            .records()
            .iter()
            .map(|r| r.target)
            .collect(),
        surrogate: config::surrogate_kind(&config.surrogate)?,
        kernel: config::kernel_kind(&config.surrogate)?,
    };
    let mut grid = Grid::new();
    for axis in &grid_section.axes {
        grid = grid.axis(&axis.name, &axis.values);
    }
    let seed = seed
        .or_else(|| config.campaign.as_ref().map(|c| c.master_seed))
        .unwrap_or(0);
    let result = grid_search(&problem, &grid, grid_section.folds, seed)?;

    use std::fmt::Write as _;
    let mut csv = String::from("id");
    for axis in &grid_section.axes {
        csv.push(',');
        csv.push_str(&axis.name);
    }
    csv.push_str(",mean_mae");
    for f in 0..grid_section.folds {
        let _ = write!(csv, ",fold_mae_{f}");
    }
    csv.push('\n');
    for (i, cell) in result.cells.iter().enumerate() {
        let _ = write!(csv, "{i}");
        for (_, value) in &cell.settings {
            let _ = write!(csv, ",{value}");
        }
        let _ = write!(csv, ",{}", cell.mean_mae);
        for f in &cell.fold_maes {
            let _ = write!(csv, ",{f}");
        }
        csv.push('\n');
    }
    write_text(out, &csv)?;

    let best = result.best_cell();
    let settings: Vec<String> = best
        .settings
        .iter()
        .map(|(name, value)| format!("{name}={value}"))
        .collect();
    println!(
        "best cell={} {} mean_mae={}",
        result.best,
        settings.join(" "),
        best.mean_mae
    );
    Ok(())
}

fn cmd_campaign(
    config_path: &Path,
    seed: Option<u64>,
    runs: Option<usize>,
    out: Option<PathBuf>,
    threads: usize,
    verbose: bool,
) -> Result<(), CliError> {
    let mut config = config::parse_config(config_path)?;
    {
        let section = config
            .campaign
            .as_mut()
            .ok_or_else(|| CliError::data("config: missing [campaign] section"))?;
        if let Some(s) = seed {
            section.master_seed = s;
        }
        if let Some(r) = runs {
            section.n_runs = r;
        }
    }
    let core = config::campaign_config(&config)?;
    let loaded = load_config_dataset(&config)?;
    let out_dir = out
        .or_else(|| std::env::var_os("QAL_OUT_DIR").map(PathBuf::from))
        .or_else(|| config.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("results"));

    let result = run_campaign_threaded(&core, &loaded.dataset, threads, verbose)?;
    let aggregate = aggregate_runs(&result)?;

    // KDE of the property values sampled by the first run, the single-run
    // distribution analysis
    let observed_targets: Vec<f64> = {
        let records = loaded.dataset.records();
        result.runs[0]
            .observed_ids
            .iter()
            .filter_map(|id| records.iter().find(|r| &r.id == id))
            .map(|r| r.target)
            .collect()
    };
    let bandwidth = silverman_bandwidth(&observed_targets);
    let grid = kde_grid(&observed_targets, bandwidth, 256);
    let density = kde(&observed_targets, bandwidth, &grid)?;

    let manifest = Manifest {
        config_hash: config::config_hash(&config)?,
        master_seed: core.master_seed,
        n_runs: core.n_runs,
        kde_bandwidth: Some(bandwidth),
    };
    emit::emit_results(
        &result,
        &aggregate,
        Some((&grid, &density)),
        &manifest,
        &out_dir,
    )?;

    let final_mean = aggregate.mean.last().copied().unwrap_or(f64::NAN);
    println!(
        "runs={} cycles={} final_mean_best={} out={}",
        core.n_runs,
        core.n_cycles,
        final_mean,
        out_dir.display()
    );
    Ok(())
}

fn cmd_kde(
    input: &Path,
    column: &str,
    bandwidth: Option<f64>,
    grid_points: usize,
    out: &Path,
) -> Result<(), CliError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::data(format!("cannot read {}: {e}", input.display())))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::data(format!("{}: empty file", input.display())))?;
    let col = header
        .split(',')
        .position(|c| c == column)
        .ok_or_else(|| {
            CliError::data(format!(
                "{}: CSV missing `{column}` column",
                input.display()
            ))
        })?;
    let mut values = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let field = line.split(',').nth(col).ok_or_else(|| {
            CliError::data(format!("{}:{}: short row", input.display(), idx + 1))
        })?;
        let v: f64 = field.trim().parse().map_err(|_| {
            CliError::data(format!(
                "{}:{}: bad value {field:?}",
                input.display(),
                idx + 1
            ))
        })?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(CliError::data(format!("{}: no values", input.display())));
    }
    let h = match bandwidth {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(_) => return Err(CliError::usage("--bandwidth must be > 0")),
        None => silverman_bandwidth(&values),
    };
    let grid = kde_grid(&values, h, grid_points);
    let density = kde(&values, h, &grid)?;
    write_text(out, &emit::kde_csv(&grid, &density))?;
    println!("values={} bandwidth={h}", values.len());
    Ok(())
}
