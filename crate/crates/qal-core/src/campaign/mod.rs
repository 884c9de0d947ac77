//! The active-learning loop: pool management, per-cycle surrogate refresh,
//! acquisition-driven selection against the dataset oracle, multi-run
//! aggregation and KDE analysis.
//!
//! Every run is deterministic in (config, dataset, master_seed): run r uses
//! the seed `derive_seed(master_seed, r)` and derives per-cycle streams from
//! it, so runs may execute in parallel and still reproduce the serial result
//! bit for bit.

mod kde;
mod seed;
mod synth;

pub use kde::{kde, kde_grid, silverman_bandwidth};
pub use seed::{derive_seed, run_seed};
pub use synth::{synthetic_dataset, SyntheticDataset, SyntheticKind};

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::acquire::{
    self, select_batch, AcquireError, AcquisitionMode, AcquisitionScores, Direction,
};
use crate::descriptors::{
    pca_fit, pca_transform, standard_scale_fit, standard_scale_transform, DescriptorError,
};
use crate::kernels::{KernelError, KernelKind};
use crate::regress::{
    bootstrap_uncertainty, cv_uncertainty, fit_gpr_jittered, fit_svr, mae, predict_gpr,
    predict_svr, train_test_split, RegressError, SurrogateKind, UncertaintyEstimate,
};

/// One labeled material: raw descriptor plus the property value the dataset
/// oracle returns when the record is "measured".
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialRecord {
    pub id: String,
    pub features: Vec<f64>,
    pub target: f64,
}

/// Validated record collection: unique ids, a common feature dimension and
/// finite values throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<MaterialRecord>,
}

impl Dataset {
    pub fn new(records: Vec<MaterialRecord>) -> Result<Dataset, CampaignError> {
        if records.is_empty() {
            return Err(CampaignError::InvalidDataset(String::from("no records")));
        }
        let dim = records[0].features.len();
        if dim == 0 {
            return Err(CampaignError::InvalidDataset(String::from(
                "records need at least one feature",
            )));
        }
        let mut seen = BTreeSet::new();
        for r in &records {
            if !seen.insert(r.id.clone()) {
                return Err(CampaignError::InvalidDataset(format!(
                    "duplicate id {:?}",
                    r.id
                )));
            }
            if r.features.len() != dim {
                return Err(CampaignError::InvalidDataset(format!(
                    "record {:?} has {} features, expected {dim}",
                    r.id,
                    r.features.len()
                )));
            }
            if r.features.iter().any(|v| !v.is_finite()) || !r.target.is_finite() {
                return Err(CampaignError::InvalidDataset(format!(
                    "record {:?} carries non-finite values",
                    r.id
                )));
            }
        }
        Ok(Dataset { records })
    }

    pub fn records(&self) -> &[MaterialRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn feature_dim(&self) -> usize {
        self.records[0].features.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintDirection {
    /// target ≤ threshold qualifies.
    Le,
    /// target ≥ threshold qualifies.
    Ge,
}

/// Predicate the initial pool is drawn under; the rest of the dataset
/// (including violating records) forms the virtual space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitConstraint {
    pub threshold: f64,
    pub direction: ConstraintDirection,
}

impl InitConstraint {
    pub fn admits(&self, target: f64) -> bool {
        match self.direction {
            ConstraintDirection::Le => target <= self.threshold,
            ConstraintDirection::Ge => target >= self.threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UncertaintyConfig {
    Cv { folds: usize },
    Bootstrap { resamples: usize },
    /// GP posterior; requires a GPR surrogate.
    GprAnalytic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AcquisitionChoice {
    /// Expected improvement against the best observed target.
    Ei,
    /// Predicted mean only.
    Exploit,
    /// LCB when minimizing, UCB when maximizing.
    ConfidenceBound { kappa: f64 },
    /// Uniform random selection; the reference baseline.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Preprocessing {
    pub scale: bool,
    pub pca_components: Option<usize>,
}

/// Full loop specification. See [`CampaignConfig::validate`] for the
/// cross-field rules.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub objective: Direction,
    pub surrogate: SurrogateKind,
    pub kernel: KernelKind,
    pub uncertainty: UncertaintyConfig,
    pub acquisition: AcquisitionChoice,
    pub n_init: usize,
    pub init_constraint: Option<InitConstraint>,
    pub n_selected: usize,
    pub n_cycles: usize,
    pub n_runs: usize,
    pub master_seed: u64,
    pub preprocessing: Preprocessing,
    /// When set, each cycle fits a diagnostic model on this train share of
    /// the observed set and records train/test MAE.
    pub report_split: Option<f64>,
}

impl CampaignConfig {
    /// Smallest observed-set size the configured uncertainty method can work
    /// with.
    pub fn min_observed(&self) -> usize {
        let by_method = match self.uncertainty {
            UncertaintyConfig::Cv { folds } => folds,
            UncertaintyConfig::Bootstrap { .. } => 2,
            UncertaintyConfig::GprAnalytic => 1,
        };
        let by_surrogate = match self.surrogate {
            SurrogateKind::Svr(_) => 2,
            SurrogateKind::Gpr { .. } => 1,
        };
        by_method.max(by_surrogate)
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        if self.n_selected < 1 {
            return Err(CampaignError::InvalidConfig(String::from(
                "n_selected must be >= 1",
            )));
        }
        if self.n_cycles < 1 {
            return Err(CampaignError::InvalidConfig(String::from(
                "n_cycles must be >= 1",
            )));
        }
        if self.n_runs < 1 {
            return Err(CampaignError::InvalidConfig(String::from(
                "n_runs must be >= 1",
            )));
        }
        match self.uncertainty {
            UncertaintyConfig::Cv { folds } if folds < 2 => {
                return Err(CampaignError::InvalidConfig(String::from(
                    "cv folds must be >= 2",
                )));
            }
            UncertaintyConfig::Bootstrap { resamples } if resamples < 2 => {
                return Err(CampaignError::InvalidConfig(String::from(
                    "bootstrap resamples must be >= 2",
                )));
            }
            UncertaintyConfig::GprAnalytic => {
                if !matches!(self.surrogate, SurrogateKind::Gpr { .. }) {
                    return Err(CampaignError::InvalidConfig(String::from(
                        "gpr_analytic uncertainty requires a gpr surrogate",
                    )));
                }
            }
            _ => {}
        }
        if self.n_init < self.min_observed() {
            return Err(CampaignError::InvalidConfig(format!(
                "n_init {} is below the minimum {} required by the surrogate/uncertainty setup",
                self.n_init,
                self.min_observed()
            )));
        }
        if let AcquisitionChoice::ConfidenceBound { kappa } = self.acquisition {
            if kappa < 0.0 || !kappa.is_finite() {
                return Err(CampaignError::InvalidConfig(String::from(
                    "kappa must be finite and >= 0",
                )));
            }
        }
        if let Some(nc) = self.preprocessing.pca_components {
            if nc < 1 {
                return Err(CampaignError::InvalidConfig(String::from(
                    "pca_components must be >= 1",
                )));
            }
            if self.n_init < nc + 1 {
                return Err(CampaignError::InvalidConfig(format!(
                    "pca_components {nc} needs n_init >= {}",
                    nc + 1
                )));
            }
        }
        if let Some(frac) = self.report_split {
            if !(frac > 0.0 && frac < 1.0) {
                return Err(CampaignError::InvalidConfig(String::from(
                    "report_split must lie in (0, 1)",
                )));
            }
        }
        Ok(())
    }
}

/// One acquisition event: the cycle it happened in and the measured record.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionEvent {
    pub cycle: usize,
    pub id: String,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleDiagnostics {
    pub cycle: usize,
    pub n_observed: usize,
    pub train_mae: f64,
    pub test_mae: f64,
}

/// Per-run outcome. `best_so_far` has length n_cycles + 1 (entry 0 is the
/// initial pool's best); on early pool exhaustion the tail repeats the final
/// value.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub run_index: usize,
    pub run_seed: u64,
    pub selections: Vec<SelectionEvent>,
    pub best_so_far: Vec<f64>,
    pub observed_ids: Vec<String>,
    pub diagnostics: Vec<CycleDiagnostics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub runs: Vec<RunResult>,
}

/// Mean best-so-far trajectory across runs plus the min/max envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateTrajectory {
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CampaignError {
    InvalidConfig(String),
    InvalidDataset(String),
    /// Fewer constraint-satisfying records than the initial pool needs.
    InfeasibleConstraint { qualifying: usize, required: usize },
    NoRuns,
    EmptyValues,
    InvalidBandwidth,
    SynthesisFailed(String),
    /// A cycle step failed; carries the run/cycle context.
    Step {
        run: usize,
        cycle: usize,
        source: StepError,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepError {
    Kernel(KernelError),
    Regress(RegressError),
    Descriptor(DescriptorError),
    Acquire(AcquireError),
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepError::Kernel(e) => write!(f, "kernel: {e}"),
            StepError::Regress(e) => write!(f, "regression: {e}"),
            StepError::Descriptor(e) => write!(f, "preprocessing: {e}"),
            StepError::Acquire(e) => write!(f, "acquisition: {e}"),
        }
    }
}

impl fmt::Display for CampaignError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CampaignError::InvalidConfig(m) => write!(f, "invalid campaign config: {m}"),
            CampaignError::InvalidDataset(m) => write!(f, "invalid dataset: {m}"),
            CampaignError::InfeasibleConstraint {
                qualifying,
                required,
            } => write!(
                f,
                "initial-pool constraint admits only {qualifying} records, {required} needed"
            ),
            CampaignError::NoRuns => write!(f, "no runs to aggregate"),
            CampaignError::EmptyValues => write!(f, "no values to analyze"),
            CampaignError::InvalidBandwidth => write!(f, "bandwidth must be > 0"),
            CampaignError::SynthesisFailed(m) => write!(f, "dataset synthesis failed: {m}"),
            CampaignError::Step { run, cycle, source } => {
                write!(f, "run {run}, cycle {cycle}: {source}")
            }
        }
    }
}

impl core::error::Error for CampaignError {}

impl From<KernelError> for StepError {
    fn from(e: KernelError) -> Self {
        StepError::Kernel(e)
    }
}
impl From<RegressError> for StepError {
    fn from(e: RegressError) -> Self {
        StepError::Regress(e)
    }
}
impl From<DescriptorError> for StepError {
    fn from(e: DescriptorError) -> Self {
        StepError::Descriptor(e)
    }
}
impl From<AcquireError> for StepError {
    fn from(e: AcquireError) -> Self {
        StepError::Acquire(e)
    }
}

/// Draws the initial observed pool: a uniform seeded sample without
/// replacement from the constraint-satisfying records. The virtual space is
/// the full complement, violating records included. Both index lists are
/// sorted ascending.
pub fn init_pool(
    dataset: &Dataset,
    constraint: Option<&InitConstraint>,
    n_init: usize,
    run_seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), CampaignError> {
    let qualifying: Vec<usize> = dataset
        .records
        .iter()
        .enumerate()
        .filter(|(_, r)| constraint.is_none_or(|c| c.admits(r.target)))
        .map(|(i, _)| i)
        .collect();
    if qualifying.len() < n_init {
        return Err(CampaignError::InfeasibleConstraint {
            qualifying: qualifying.len(),
            required: n_init,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
    let mut pool = qualifying;
    pool.shuffle(&mut rng);
    let mut observed: Vec<usize> = pool[..n_init].to_vec();
    observed.sort_unstable();
    let chosen: BTreeSet<usize> = observed.iter().copied().collect();
    let virtual_pool: Vec<usize> = (0..dataset.len()).filter(|i| !chosen.contains(i)).collect();
    Ok((observed, virtual_pool))
}

fn best_target(dataset: &Dataset, observed: &[usize], objective: Direction) -> f64 {
    let mut best = dataset.records[observed[0]].target;
    for &i in &observed[1..] {
        let t = dataset.records[i].target;
        if objective.is_better(t, best) {
            best = t;
        }
    }
    best
}

type FeatureRows = Vec<Vec<f64>>;

fn preprocess(
    pre: &Preprocessing,
    observed: &[Vec<f64>],
    virtual_rows: &[Vec<f64>],
) -> Result<(FeatureRows, FeatureRows), DescriptorError> {
    let mut obs = observed.to_vec();
    let mut virt = virtual_rows.to_vec();
    if pre.scale {
        let scaler = standard_scale_fit(&obs)?;
        obs = standard_scale_transform(&scaler, &obs)?;
        virt = standard_scale_transform(&scaler, &virt)?;
    }
    if let Some(nc) = pre.pca_components {
        let pca = pca_fit(&obs, nc)?;
        obs = pca_transform(&pca, &obs)?;
        virt = pca_transform(&pca, &virt)?;
    }
    Ok((obs, virt))
}

fn predictive_estimate(
    config: &CampaignConfig,
    feats_obs: &[Vec<f64>],
    ids_obs: &[String],
    y_obs: &[f64],
    feats_virt: &[Vec<f64>],
    ids_virt: &[String],
    cv_seed: u64,
) -> Result<UncertaintyEstimate, StepError> {
    let k_obs = config.kernel.square(feats_obs, ids_obs)?;
    let k_cross = config.kernel.cross(feats_virt, ids_virt, feats_obs, ids_obs)?;
    match config.uncertainty {
        UncertaintyConfig::Cv { folds } => Ok(cv_uncertainty(
            &config.surrogate,
            &k_obs,
            y_obs,
            &k_cross,
            folds,
            cv_seed,
        )?),
        UncertaintyConfig::Bootstrap { resamples } => Ok(bootstrap_uncertainty(
            &config.surrogate,
            &k_obs,
            y_obs,
            &k_cross,
            resamples,
            cv_seed,
        )?),
        UncertaintyConfig::GprAnalytic => {
            let sigma_reg = match config.surrogate {
                SurrogateKind::Gpr { sigma_reg } => sigma_reg,
                // rejected by validate(); defensive fallthrough
                SurrogateKind::Svr(_) => {
                    return Err(StepError::Regress(RegressError::InvalidParam {
                        name: "uncertainty",
                    }))
                }
            };
            let model = fit_gpr_jittered(&k_obs, y_obs, sigma_reg)?;
            let diag = config.kernel.self_diag(feats_virt)?;
            Ok(predict_gpr(&model, &k_cross, &diag)?)
        }
    }
}

fn score_candidates(
    config: &CampaignConfig,
    estimate: &UncertaintyEstimate,
    incumbent: f64,
) -> Result<AcquisitionScores, StepError> {
    let (mode, incumbent_used) = match (config.acquisition, config.objective) {
        (AcquisitionChoice::Ei, Direction::Minimize) => (AcquisitionMode::EiMin, Some(incumbent)),
        (AcquisitionChoice::Ei, Direction::Maximize) => (AcquisitionMode::EiMax, Some(incumbent)),
        (AcquisitionChoice::Exploit, Direction::Minimize) => (AcquisitionMode::ExploitMin, None),
        (AcquisitionChoice::Exploit, Direction::Maximize) => (AcquisitionMode::ExploitMax, None),
        (AcquisitionChoice::ConfidenceBound { .. }, Direction::Minimize) => {
            (AcquisitionMode::Lcb, None)
        }
        (AcquisitionChoice::ConfidenceBound { .. }, Direction::Maximize) => {
            (AcquisitionMode::Ucb, None)
        }
        (AcquisitionChoice::Random, _) => {
            unreachable!("random selection bypasses scoring")
        }
    };
    let mut scores = Vec::with_capacity(estimate.mu.len());
    for (mu, sigma) in estimate.mu.iter().zip(&estimate.sigma) {
        let s = match config.acquisition {
            AcquisitionChoice::Ei => match config.objective {
                Direction::Minimize => acquire::ei_min(*mu, *sigma, incumbent)?,
                Direction::Maximize => acquire::ei_max(*mu, *sigma, incumbent)?,
            },
            AcquisitionChoice::Exploit => acquire::exploit(*mu, config.objective),
            AcquisitionChoice::ConfidenceBound { kappa } => {
                acquire::confidence_bound(*mu, *sigma, kappa, config.objective)?
            }
            AcquisitionChoice::Random => unreachable!(),
        };
        scores.push(s);
    }
    Ok(AcquisitionScores {
        scores,
        mode,
        incumbent: incumbent_used,
    })
}

fn cycle_diagnostics(
    config: &CampaignConfig,
    cycle: usize,
    feats_obs: &[Vec<f64>],
    ids_obs: &[String],
    y_obs: &[f64],
    split_seed: u64,
) -> Result<Option<CycleDiagnostics>, StepError> {
    let frac = match config.report_split {
        Some(f) => f,
        None => return Ok(None),
    };
    let n = y_obs.len();
    if n < 2 {
        return Ok(None);
    }
    let (train, test) = train_test_split(n, 1.0 - frac, split_seed)?;
    let take = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<String>, Vec<f64>) {
        (
            idx.iter().map(|&i| feats_obs[i].clone()).collect(),
            idx.iter().map(|&i| ids_obs[i].clone()).collect(),
            idx.iter().map(|&i| y_obs[i]).collect(),
        )
    };
    let (f_tr, id_tr, y_tr) = take(&train);
    let (f_te, id_te, y_te) = take(&test);
    let k_tr = config.kernel.square(&f_tr, &id_tr)?;
    let k_te = config.kernel.cross(&f_te, &id_te, &f_tr, &id_tr)?;
    let (pred_tr, pred_te) = match &config.surrogate {
        SurrogateKind::Svr(params) => {
            let model = fit_svr(&k_tr, &y_tr, params)?;
            (predict_svr(&model, &k_tr)?, predict_svr(&model, &k_te)?)
        }
        SurrogateKind::Gpr { sigma_reg } => {
            let model = fit_gpr_jittered(&k_tr, &y_tr, *sigma_reg)?;
            (model.predict_mean(&k_tr)?, model.predict_mean(&k_te)?)
        }
    };
    Ok(Some(CycleDiagnostics {
        cycle,
        n_observed: n,
        train_mae: mae(&y_tr, &pred_tr)?,
        test_mae: mae(&y_te, &pred_te)?,
    }))
}

/// Executes one independent run. `run_seed` must equal
/// `derive_seed(config.master_seed, run_index)` for campaign-level
/// reproducibility; [`run_campaign`] and the parallel drivers both derive it
/// that way.
pub fn run_single(
    config: &CampaignConfig,
    dataset: &Dataset,
    run_index: usize,
    run_seed: u64,
) -> Result<RunResult, CampaignError> {
    config.validate()?;
    let step = |cycle: usize| move |source: StepError| CampaignError::Step {
        run: run_index,
        cycle,
        source,
    };

    let (mut observed, mut virtual_pool) =
        init_pool(dataset, config.init_constraint.as_ref(), config.n_init, run_seed)?;
    let mut best = best_target(dataset, &observed, config.objective);
    let mut best_so_far = alloc::vec![best];
    let mut selections = Vec::new();
    let mut diagnostics = Vec::new();

    for cycle in 1..=config.n_cycles {
        if virtual_pool.is_empty() {
            break;
        }
        let cycle_seed = derive_seed(run_seed, cycle as u64);
        let raw_obs: Vec<Vec<f64>> = observed
            .iter()
            .map(|&i| dataset.records[i].features.clone())
            .collect();
        let raw_virt: Vec<Vec<f64>> = virtual_pool
            .iter()
            .map(|&i| dataset.records[i].features.clone())
            .collect();
        let ids_obs: Vec<String> = observed
            .iter()
            .map(|&i| dataset.records[i].id.clone())
            .collect();
        let ids_virt: Vec<String> = virtual_pool
            .iter()
            .map(|&i| dataset.records[i].id.clone())
            .collect();
        let y_obs: Vec<f64> = observed
            .iter()
            .map(|&i| dataset.records[i].target)
            .collect();

        let (feats_obs, feats_virt) = preprocess(&config.preprocessing, &raw_obs, &raw_virt)
            .map_err(|e| step(cycle)(StepError::Descriptor(e)))?;

        if let Some(d) = cycle_diagnostics(
            config,
            cycle,
            &feats_obs,
            &ids_obs,
            &y_obs,
            derive_seed(cycle_seed, 2),
        )
        .map_err(step(cycle))?
        {
            diagnostics.push(d);
        }

        let batch = config.n_selected.min(virtual_pool.len());
        let order: Vec<usize> = if matches!(config.acquisition, AcquisitionChoice::Random) {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cycle_seed, 1));
            let mut positions: Vec<usize> = (0..virtual_pool.len()).collect();
            positions.shuffle(&mut rng);
            positions.truncate(batch);
            positions
        } else {
            let estimate = predictive_estimate(
                config,
                &feats_obs,
                &ids_obs,
                &y_obs,
                &feats_virt,
                &ids_virt,
                derive_seed(cycle_seed, 0),
            )
            .map_err(step(cycle))?;
            let scores = score_candidates(config, &estimate, best).map_err(step(cycle))?;
            select_batch(&scores, batch).map_err(|e| step(cycle)(StepError::Acquire(e)))?
        };

        // oracle lookup: move the selected records with their true targets
        let selected_datasets: Vec<usize> = order.iter().map(|&p| virtual_pool[p]).collect();
        for &di in &selected_datasets {
            let record = &dataset.records[di];
            selections.push(SelectionEvent {
                cycle,
                id: record.id.clone(),
                target: record.target,
            });
            if config.objective.is_better(record.target, best) {
                best = record.target;
            }
            observed.push(di);
        }
        let remove: BTreeSet<usize> = order.iter().copied().collect();
        virtual_pool = virtual_pool
            .iter()
            .enumerate()
            .filter(|(p, _)| !remove.contains(p))
            .map(|(_, &di)| di)
            .collect();
        best_so_far.push(best);
    }

    // pool exhausted early: repeat the final value so trajectories align
    while best_so_far.len() < config.n_cycles + 1 {
        best_so_far.push(best);
    }

    Ok(RunResult {
        run_index,
        run_seed,
        selections,
        best_so_far,
        observed_ids: observed
            .iter()
            .map(|&i| dataset.records[i].id.clone())
            .collect(),
        diagnostics,
    })
}

/// n_runs independent runs with per-run derived seeds, collected in run
/// order.
pub fn run_campaign(
    config: &CampaignConfig,
    dataset: &Dataset,
) -> Result<CampaignResult, CampaignError> {
    config.validate()?;
    let mut runs = Vec::with_capacity(config.n_runs);
    for r in 0..config.n_runs {
        runs.push(run_single(config, dataset, r, run_seed(config.master_seed, r))?);
    }
    Ok(CampaignResult { runs })
}

/// Arithmetic mean of the best-so-far trajectories plus the min/max
/// envelope. Trajectories shorter than the longest are padded with their
/// final value.
pub fn aggregate_runs(result: &CampaignResult) -> Result<AggregateTrajectory, CampaignError> {
    if result.runs.is_empty() {
        return Err(CampaignError::NoRuns);
    }
    let len = result
        .runs
        .iter()
        .map(|r| r.best_so_far.len())
        .max()
        .unwrap_or(0);
    let n = result.runs.len() as f64;
    let mut mean = alloc::vec![0.0; len];
    let mut min = alloc::vec![f64::INFINITY; len];
    let mut max = alloc::vec![f64::NEG_INFINITY; len];
    for run in &result.runs {
        for c in 0..len {
            let v = *run
                .best_so_far
                .get(c)
                .or_else(|| run.best_so_far.last())
                .expect("nonempty trajectory");
            mean[c] += v;
            min[c] = min[c].min(v);
            max[c] = max[c].max(v);
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    Ok(AggregateTrajectory { mean, min, max })
}
