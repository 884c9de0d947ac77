//! Dataset ingestion and emission.
//!
//! The dataset CSV carries `id,<feature columns...>,target`. For structure
//! campaigns the CSV shrinks to `id,target` and a sidecar directory provides
//! one XYZ file per record id; features are then the inverse-distance pair
//! descriptor over the dataset-wide element set, optionally concatenated
//! with the spin-multiplicity vector from each file's comment line.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::MbtrSection;
use crate::error::CliError;
use qal_core::campaign::{Dataset, MaterialRecord};
use qal_core::descriptors::{
    mbtr_k2_columns, mbtr_k2_with_elements, parse_xyz, spin_columns, spin_descriptor, MbtrGrid,
    Structure,
};

#[derive(Debug)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    pub feature_names: Vec<String>,
}

/// Reads a plain feature CSV dataset.
pub fn read_dataset(path: &Path) -> Result<LoadedDataset, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read dataset {}: {e}", path.display())))?;
    parse_dataset_str(&text, path)
}

fn parse_dataset_str(text: &str, path: &Path) -> Result<LoadedDataset, CliError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::data(format!("{}: empty dataset", path.display())))?;
    let columns: Vec<&str> = header.split(',').collect();
    if columns.first() != Some(&"id") {
        return Err(CliError::data(format!(
            "{}: dataset CSV missing `id` column (first header field)",
            path.display()
        )));
    }
    if columns.last() != Some(&"target") {
        return Err(CliError::data(format!(
            "{}: dataset CSV missing `target` column (last header field)",
            path.display()
        )));
    }
    if columns.len() < 3 {
        return Err(CliError::data(format!(
            "{}: dataset CSV needs at least one feature column",
            path.display()
        )));
    }
    let n_features = columns.len() - 2;
    let feature_names: Vec<String> = columns[1..columns.len() - 1]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut records = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != columns.len() {
            return Err(CliError::data(format!(
                "{}:{}: expected {} fields, got {}",
                path.display(),
                idx + 1,
                columns.len(),
                fields.len()
            )));
        }
        let parse = |s: &str, what: &str| -> Result<f64, CliError> {
            s.trim().parse().map_err(|_| {
                CliError::data(format!(
                    "{}:{}: bad {what} value {s:?}",
                    path.display(),
                    idx + 1
                ))
            })
        };
        let features: Vec<f64> = fields[1..=n_features]
            .iter()
            .map(|f| parse(f, "feature"))
            .collect::<Result<_, _>>()?;
        let target = parse(fields[n_features + 1], "target")?;
        records.push(MaterialRecord {
            id: fields[0].to_string(),
            features,
            target,
        });
    }
    let dataset = Dataset::new(records)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    Ok(LoadedDataset {
        dataset,
        feature_names,
    })
}

/// Reads an `id,target` CSV plus a sidecar XYZ directory keyed by id and
/// featurizes each structure.
pub fn read_structure_dataset(
    index_path: &Path,
    xyz_dir: &Path,
    mbtr: &MbtrSection,
) -> Result<LoadedDataset, CliError> {
    let text = std::fs::read_to_string(index_path)
        .map_err(|e| CliError::data(format!("cannot read dataset {}: {e}", index_path.display())))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| CliError::data(format!("{}: empty dataset", index_path.display())))?;
    if header != "id,target" {
        return Err(CliError::data(format!(
            "{}: structure datasets use the header `id,target` (features come from the XYZ sidecar)",
            index_path.display()
        )));
    }
    let mut entries: Vec<(String, f64)> = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (id, target) = line.split_once(',').ok_or_else(|| {
            CliError::data(format!(
                "{}:{}: expected `id,target`",
                index_path.display(),
                idx + 1
            ))
        })?;
        let target: f64 = target.trim().parse().map_err(|_| {
            CliError::data(format!(
                "{}:{}: bad target value {target:?}",
                index_path.display(),
                idx + 1
            ))
        })?;
        entries.push((id.to_string(), target));
    }

    let mut structures: Vec<Structure> = Vec::with_capacity(entries.len());
    for (id, _) in &entries {
        let file = xyz_dir.join(format!("{id}.xyz"));
        let xyz = std::fs::read_to_string(&file)
            .map_err(|e| CliError::data(format!("cannot read {}: {e}", file.display())))?;
        let structure = parse_xyz(&xyz)
            .map_err(|e| CliError::data(format!("{}: {e}", file.display())))?;
        structures.push(structure);
    }
    let (records, feature_names) = featurize_structures(&entries, &structures, mbtr)?;
    let dataset = Dataset::new(records)
        .map_err(|e| CliError::data(format!("{}: {e}", index_path.display())))?;
    Ok(LoadedDataset {
        dataset,
        feature_names,
    })
}

/// Joint structure(+spin) features over a dataset-wide element set.
pub fn featurize_structures(
    entries: &[(String, f64)],
    structures: &[Structure],
    mbtr: &MbtrSection,
) -> Result<(Vec<MaterialRecord>, Vec<String>), CliError> {
    let grid = MbtrGrid {
        min: mbtr.min,
        max: mbtr.max,
        n_bins: mbtr.n_bins,
        sigma: mbtr.sigma,
    };
    let mut elements: Vec<String> = structures
        .iter()
        .flat_map(|s| s.elements())
        .collect();
    elements.sort();
    elements.dedup();
    let mut feature_names = mbtr_k2_columns(&elements, grid.n_bins);
    if mbtr.spin {
        feature_names.extend(spin_columns());
    }
    let mut records = Vec::with_capacity(entries.len());
    for ((id, target), structure) in entries.iter().zip(structures) {
        let mut features = mbtr_k2_with_elements(structure, &grid, &elements)?;
        if mbtr.spin {
            features.extend(spin_descriptor(structure.multiplicity)?);
        }
        records.push(MaterialRecord {
            id: id.clone(),
            features,
            target: *target,
        });
    }
    Ok((records, feature_names))
}

/// Writes a dataset in the `id,<features...>,target` format with LF endings.
pub fn write_dataset_csv(
    records: &[MaterialRecord],
    feature_names: &[String],
) -> Result<String, CliError> {
    let mut out = String::from("id");
    for name in feature_names {
        out.push(',');
        out.push_str(name);
    }
    out.push_str(",target\n");
    for r in records {
        if r.features.len() != feature_names.len() {
            return Err(CliError::data(format!(
                "record {:?} has {} features, header names {}",
                r.id,
                r.features.len(),
                feature_names.len()
            )));
        }
        out.push_str(&r.id);
        for v in &r.features {
            let _ = write!(out, ",{v}");
        }
        let _ = writeln!(out, ",{}", r.target);
    }
    Ok(out)
}
