//! Result-file emission: `trajectory.csv`, `aggregate.csv`, `kde.csv` and a
//! provenance manifest. Files are UTF-8 with LF endings and contain no
//! timestamps, so identical campaigns emit byte-identical directories.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::CliError;
use qal_core::campaign::{AggregateTrajectory, CampaignResult};

pub fn trajectory_csv(result: &CampaignResult) -> String {
    let mut out = String::from("run,cycle,selected_ids,best_so_far\n");
    for run in &result.runs {
        let mut by_cycle: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for s in &run.selections {
            by_cycle.entry(s.cycle).or_default().push(&s.id);
        }
        for (cycle, best) in run.best_so_far.iter().enumerate() {
            let ids = by_cycle
                .get(&cycle)
                .map(|v| v.join(";"))
                .unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{}", run.run_index, cycle, ids, best);
        }
    }
    out
}

pub fn aggregate_csv(aggregate: &AggregateTrajectory) -> String {
    let mut out = String::from("cycle,mean,min,max\n");
    for cycle in 0..aggregate.mean.len() {
        let _ = writeln!(
            out,
            "{cycle},{},{},{}",
            aggregate.mean[cycle], aggregate.min[cycle], aggregate.max[cycle]
        );
    }
    out
}

pub fn kde_csv(grid: &[f64], density: &[f64]) -> String {
    let mut out = String::from("grid,density\n");
    for (g, d) in grid.iter().zip(density) {
        let _ = writeln!(out, "{g},{d}");
    }
    out
}

pub fn diagnostics_csv(result: &CampaignResult) -> String {
    let mut out = String::from("run,cycle,n_observed,train_mae,test_mae\n");
    for run in &result.runs {
        for d in &run.diagnostics {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                run.run_index, d.cycle, d.n_observed, d.train_mae, d.test_mae
            );
        }
    }
    out
}

pub struct Manifest {
    pub config_hash: u64,
    pub master_seed: u64,
    pub n_runs: usize,
    pub kde_bandwidth: Option<f64>,
}

pub fn manifest_toml(manifest: &Manifest) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "config_hash = \"{:016x}\"", manifest.config_hash);
    let _ = writeln!(out, "master_seed = {}", manifest.master_seed);
    let _ = writeln!(out, "n_runs = {}", manifest.n_runs);
    if let Some(h) = manifest.kde_bandwidth {
        let _ = writeln!(out, "kde_bandwidth = {h}");
    }
    let _ = writeln!(out, "cli_version = \"{}\"", env!("CARGO_PKG_VERSION"));
    out
}

/// Writes the campaign result files into `out_dir`, creating it if absent.
pub fn emit_results(
    result: &CampaignResult,
    aggregate: &AggregateTrajectory,
    kde: Option<(&[f64], &[f64])>,
    manifest: &Manifest,
    out_dir: &Path,
) -> Result<(), CliError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", out_dir.display())))?;
    let write = |name: &str, content: String| -> Result<(), CliError> {
        let path = out_dir.join(name);
        std::fs::write(&path, content)
            .map_err(|e| CliError::data(format!("cannot write {}: {e}", path.display())))
    };
    write("trajectory.csv", trajectory_csv(result))?;
    write("aggregate.csv", aggregate_csv(aggregate))?;
    if let Some((grid, density)) = kde {
        write("kde.csv", kde_csv(grid, density))?;
    }
    if result.runs.iter().any(|r| !r.diagnostics.is_empty()) {
        write("diagnostics.csv", diagnostics_csv(result))?;
    }
    write("manifest.toml", manifest_toml(manifest))?;
    Ok(())
}
