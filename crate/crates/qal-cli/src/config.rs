//! The structured-text configuration document. Unknown keys are rejected
//! everywhere, constraints are validated before any work starts, and the
//! document round-trips through `serialize`/`parse_config_str`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use qal_core::acquire::Direction;
use qal_core::campaign::{
    AcquisitionChoice, CampaignConfig, ConstraintDirection, InitConstraint, Preprocessing,
    UncertaintyConfig,
};
use qal_core::descriptors::MbtrGrid;
use qal_core::kernels::KernelKind;
use qal_core::qsim::{build_feature_map, Entanglement, FeatureMapFamily, FeatureMapSpec};
use qal_core::regress::{SurrogateKind, SvrParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CliConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub campaign: Option<CampaignSection>,
    #[serde(default)]
    pub surrogate: SurrogateSection,
    #[serde(default)]
    pub uncertainty: UncertaintySection,
    #[serde(default)]
    pub acquisition: AcquisitionSection,
    #[serde(default)]
    pub preprocessing: PreprocessingSection,
    #[serde(default)]
    pub data: DataSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mbtr: Option<MbtrSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSection {
    pub objective: String,
    pub n_init: usize,
    #[serde(default = "default_one")]
    pub n_selected: usize,
    pub n_cycles: usize,
    #[serde(default = "default_one")]
    pub n_runs: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_split: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_constraint: Option<ConstraintSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSection {
    pub threshold: f64,
    pub direction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurrogateSection {
    #[serde(default = "default_model")]
    pub model: String,
    #[serde(default = "default_kernel")]
    pub kernel: String,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_sigma0_sq")]
    pub sigma0_sq: f64,
    #[serde(default = "default_noise")]
    pub noise: f64,
    #[serde(default = "default_pqk_gamma")]
    pub pqk_gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_map: Option<FeatureMapSection>,
}

impl Default for SurrogateSection {
    fn default() -> Self {
        SurrogateSection {
            model: default_model(),
            kernel: default_kernel(),
            c: default_c(),
            epsilon: default_epsilon(),
            tol: default_tol(),
            sigma: default_sigma(),
            gamma: default_gamma(),
            sigma0_sq: default_sigma0_sq(),
            noise: default_noise(),
            pqk_gamma: default_pqk_gamma(),
            feature_map: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureMapSection {
    pub family: String,
    pub n_qubits: usize,
    pub reps: usize,
    pub entanglement: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pauli_strings: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UncertaintySection {
    #[serde(default = "default_uncertainty")]
    pub method: String,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default = "default_resamples")]
    pub resamples: usize,
}

impl Default for UncertaintySection {
    fn default() -> Self {
        UncertaintySection {
            method: default_uncertainty(),
            folds: default_folds(),
            resamples: default_resamples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcquisitionSection {
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
}

impl Default for AcquisitionSection {
    fn default() -> Self {
        AcquisitionSection {
            mode: default_mode(),
            kappa: default_kappa(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessingSection {
    #[serde(default = "default_true")]
    pub scale: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pca_components: Option<usize>,
}

impl Default for PreprocessingSection {
    fn default() -> Self {
        PreprocessingSection {
            scale: true,
            pca_components: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xyz_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ion_table: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MbtrSection {
    pub min: f64,
    pub max: f64,
    pub n_bins: usize,
    pub sigma: f64,
    #[serde(default = "default_true")]
    pub spin: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_folds")]
    pub folds: usize,
    pub axes: Vec<GridAxisSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridAxisSection {
    pub name: String,
    pub values: Vec<f64>,
}

fn default_one() -> usize {
    1
}
fn default_model() -> String {
    "svr".into()
}
fn default_kernel() -> String {
    "rbf".into()
}
fn default_c() -> f64 {
    1e3
}
fn default_epsilon() -> f64 {
    0.01
}
fn default_tol() -> f64 {
    1e-3
}
fn default_sigma() -> f64 {
    1e-3
}
fn default_gamma() -> f64 {
    0.1
}
fn default_sigma0_sq() -> f64 {
    1.0
}
fn default_noise() -> f64 {
    10.0
}
fn default_pqk_gamma() -> f64 {
    1.0
}
fn default_uncertainty() -> String {
    "cv".into()
}
fn default_folds() -> usize {
    5
}
fn default_resamples() -> usize {
    50
}
fn default_mode() -> String {
    "ei".into()
}
fn default_kappa() -> f64 {
    2.0
}
fn default_true() -> bool {
    true
}

/// Parses and statically validates a configuration file. Relative data paths
/// resolve against the config file's directory.
pub fn parse_config(path: &Path) -> Result<CliConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("cannot read config {}: {e}", path.display())))?;
    let mut config = parse_config_str(&text)?;
    if let Some(dir) = path.parent() {
        let anchor = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&p);
            }
        };
        if let Some(p) = config.data.dataset.as_mut() {
            anchor(p);
        }
        if let Some(p) = config.data.xyz_dir.as_mut() {
            anchor(p);
        }
        if let Some(p) = config.data.ion_table.as_mut() {
            anchor(p);
        }
        if let Some(p) = config.output.dir.as_mut() {
            anchor(p);
        }
    }
    Ok(config)
}

/// Parses a configuration document from text and validates the field values
/// that do not require touching the filesystem.
pub fn parse_config_str(text: &str) -> Result<CliConfig, CliError> {
    let config: CliConfig =
        toml::from_str(text).map_err(|e| CliError::data(format!("config: {e}")))?;
    validate(&config)?;
    Ok(config)
}

pub fn serialize(config: &CliConfig) -> Result<String, CliError> {
    toml::to_string(config).map_err(|e| CliError::data(format!("config serialization: {e}")))
}

fn validate(config: &CliConfig) -> Result<(), CliError> {
    if let Some(c) = &config.campaign {
        parse_direction(&c.objective)?;
        if c.n_init == 0 {
            return Err(CliError::data("config: campaign.n_init must be >= 1"));
        }
        if c.n_selected == 0 {
            return Err(CliError::data("config: campaign.n_selected must be >= 1"));
        }
        if c.n_cycles == 0 {
            return Err(CliError::data("config: campaign.n_cycles must be >= 1"));
        }
        if c.n_runs == 0 {
            return Err(CliError::data("config: campaign.n_runs must be >= 1"));
        }
        if let Some(constraint) = &c.init_constraint {
            parse_constraint_direction(&constraint.direction)?;
        }
        if let Some(split) = c.report_split {
            if !(split > 0.0 && split < 1.0) {
                return Err(CliError::data(
                    "config: campaign.report_split must lie in (0, 1)",
                ));
            }
        }
    }
    surrogate_kind(&config.surrogate)?;
    kernel_kind(&config.surrogate)?;
    uncertainty_config(&config.uncertainty)?;
    if let Some(c) = &config.campaign {
        acquisition_choice(&config.acquisition, &c.objective)?;
    }
    if let Some(m) = &config.mbtr {
        MbtrGrid {
            min: m.min,
            max: m.max,
            n_bins: m.n_bins,
            sigma: m.sigma,
        }
        .validate()
        .map_err(|e| CliError::data(format!("config: mbtr: {e}")))?;
    }
    if let Some(g) = &config.grid {
        if g.axes.is_empty() || g.axes.iter().any(|a| a.values.is_empty()) {
            return Err(CliError::data("config: grid axes must be nonempty"));
        }
    }
    Ok(())
}

pub fn parse_direction(s: &str) -> Result<Direction, CliError> {
    match s {
        "minimize" => Ok(Direction::Minimize),
        "maximize" => Ok(Direction::Maximize),
        other => Err(CliError::data(format!(
            "config: unknown objective {other:?} (expected minimize or maximize)"
        ))),
    }
}

fn parse_constraint_direction(s: &str) -> Result<ConstraintDirection, CliError> {
    match s {
        "le" => Ok(ConstraintDirection::Le),
        "ge" => Ok(ConstraintDirection::Ge),
        other => Err(CliError::data(format!(
            "config: unknown constraint direction {other:?} (expected le or ge)"
        ))),
    }
}

pub fn feature_map_spec(section: &FeatureMapSection) -> Result<FeatureMapSpec, CliError> {
    let family = match section.family.as_str() {
        "z" => FeatureMapFamily::Z,
        "zz" => FeatureMapFamily::Zz,
        "pauli" => FeatureMapFamily::Pauli,
        "highdim" => FeatureMapFamily::HighDim,
        "yz_cx" => FeatureMapFamily::YzCx,
        other => {
            return Err(CliError::data(format!(
                "config: unknown feature map family {other:?}"
            )))
        }
    };
    let entanglement = match section.entanglement.as_str() {
        "none" => Entanglement::None,
        "full" => Entanglement::Full,
        "circular" => Entanglement::Circular,
        "linear" => Entanglement::Linear,
        other => {
            return Err(CliError::data(format!(
                "config: unknown entanglement {other:?}"
            )))
        }
    };
    let mut spec = build_feature_map(family, section.n_qubits, section.reps, entanglement)
        .map_err(|e| CliError::data(format!("config: feature_map: {e}")))?;
    if let Some(strings) = &section.pauli_strings {
        let refs: Vec<&str> = strings.iter().map(|s| s.as_str()).collect();
        spec = spec
            .with_pauli_strings(&refs)
            .map_err(|e| CliError::data(format!("config: feature_map: {e}")))?;
    }
    Ok(spec)
}

pub fn surrogate_kind(section: &SurrogateSection) -> Result<SurrogateKind, CliError> {
    match section.model.as_str() {
        "svr" => Ok(SurrogateKind::Svr(SvrParams {
            c: section.c,
            epsilon: section.epsilon,
            tol: section.tol,
            max_iter: 1_000_000,
        })),
        "gpr" => Ok(SurrogateKind::Gpr {
            sigma_reg: section.sigma,
        }),
        other => Err(CliError::data(format!(
            "config: unknown surrogate model {other:?} (expected svr or gpr)"
        ))),
    }
}

pub fn kernel_kind(section: &SurrogateSection) -> Result<KernelKind, CliError> {
    match section.kernel.as_str() {
        "rbf" => Ok(KernelKind::Rbf {
            gamma: section.gamma,
        }),
        "dot_white" => Ok(KernelKind::DotWhite {
            sigma0_sq: section.sigma0_sq,
            noise: section.noise,
        }),
        "fqk" | "pqk" => {
            let fm = section.feature_map.as_ref().ok_or_else(|| {
                CliError::data("config: quantum kernels need a [surrogate.feature_map] section")
            })?;
            let spec = feature_map_spec(fm)?;
            if section.kernel == "fqk" {
                Ok(KernelKind::Fqk { spec })
            } else {
                Ok(KernelKind::Pqk {
                    spec,
                    gamma: section.pqk_gamma,
                })
            }
        }
        other => Err(CliError::data(format!(
            "config: unknown kernel {other:?} (expected rbf, dot_white, fqk or pqk)"
        ))),
    }
}

pub fn uncertainty_config(section: &UncertaintySection) -> Result<UncertaintyConfig, CliError> {
    match section.method.as_str() {
        "cv" => Ok(UncertaintyConfig::Cv {
            folds: section.folds,
        }),
        "bootstrap" => Ok(UncertaintyConfig::Bootstrap {
            resamples: section.resamples,
        }),
        "gpr_analytic" => Ok(UncertaintyConfig::GprAnalytic),
        other => Err(CliError::data(format!(
            "config: unknown uncertainty method {other:?}"
        ))),
    }
}

pub fn acquisition_choice(
    section: &AcquisitionSection,
    objective: &str,
) -> Result<AcquisitionChoice, CliError> {
    match section.mode.as_str() {
        "ei" => Ok(AcquisitionChoice::Ei),
        "exploit" => Ok(AcquisitionChoice::Exploit),
        "cb" => Ok(AcquisitionChoice::ConfidenceBound {
            kappa: section.kappa,
        }),
        "lcb" => {
            if objective != "minimize" {
                return Err(CliError::data(
                    "config: lcb acquisition requires objective = \"minimize\"",
                ));
            }
            Ok(AcquisitionChoice::ConfidenceBound {
                kappa: section.kappa,
            })
        }
        "ucb" => {
            if objective != "maximize" {
                return Err(CliError::data(
                    "config: ucb acquisition requires objective = \"maximize\"",
                ));
            }
            Ok(AcquisitionChoice::ConfidenceBound {
                kappa: section.kappa,
            })
        }
        "random" => Ok(AcquisitionChoice::Random),
        other => Err(CliError::data(format!(
            "config: unknown acquisition mode {other:?}"
        ))),
    }
}

/// Assembles the core campaign configuration from the document, after any
/// command-line overrides have been applied.
pub fn campaign_config(config: &CliConfig) -> Result<CampaignConfig, CliError> {
    let section = config
        .campaign
        .as_ref()
        .ok_or_else(|| CliError::data("config: missing [campaign] section"))?;
    let objective = parse_direction(&section.objective)?;
    let init_constraint = section
        .init_constraint
        .as_ref()
        .map(|c| -> Result<InitConstraint, CliError> {
            Ok(InitConstraint {
                threshold: c.threshold,
                direction: parse_constraint_direction(&c.direction)?,
            })
        })
        .transpose()?;
    let core = CampaignConfig {
        objective,
        surrogate: surrogate_kind(&config.surrogate)?,
        kernel: kernel_kind(&config.surrogate)?,
        uncertainty: uncertainty_config(&config.uncertainty)?,
        acquisition: acquisition_choice(&config.acquisition, &section.objective)?,
        n_init: section.n_init,
        init_constraint,
        n_selected: section.n_selected,
        n_cycles: section.n_cycles,
        n_runs: section.n_runs,
        master_seed: section.master_seed,
        preprocessing: Preprocessing {
            scale: config.preprocessing.scale,
            pca_components: config.preprocessing.pca_components,
        },
        report_split: section.report_split,
    };
    core.validate()
        .map_err(|e| CliError::data(format!("config: {e}")))?;
    Ok(core)
}

/// FNV-1a hash of the serialized effective configuration, recorded in the
/// run manifest.
pub fn config_hash(config: &CliConfig) -> Result<u64, CliError> {
    let text = serialize(config)?;
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    Ok(h)
}
