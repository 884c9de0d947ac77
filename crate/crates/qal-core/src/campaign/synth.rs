//! Seeded synthetic datasets for desk-scale loop validation. Each generator
//! is deterministic in its seed and reports the id of the known global
//! optimum.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::seed::derive_seed;
use super::{CampaignError, Dataset, MaterialRecord};
use crate::acquire::Direction;
use crate::descriptors::{
    single_perovskite_descriptor, IonPropertyTable, PerovskiteComposition, SiteIon,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    /// Convex bowl: target = ‖x − c‖² for a seeded center c. Minimize.
    SmoothBowl,
    /// Rastrigin-style landscape with several wells. Minimize. The generator
    /// verifies at least two local minima under nearest-neighbor
    /// neighborhoods and redraws if the sample missed the structure.
    RoughMultimodal,
    /// Random Ba₍₁₋ₓ₎AₓTi₍₁₋ᵧ₎BᵧO₃ compositions featurized with the 34-entry
    /// descriptor and a smooth piezoelectric-like target. Maximize. `dim` is
    /// ignored (the descriptor length is fixed).
    PerovskiteLike,
}

impl SyntheticKind {
    pub fn name(&self) -> &'static str {
        match self {
            SyntheticKind::SmoothBowl => "smooth_bowl",
            SyntheticKind::RoughMultimodal => "rough_multimodal",
            SyntheticKind::PerovskiteLike => "perovskite_like",
        }
    }

    pub fn parse(s: &str) -> Option<SyntheticKind> {
        match s {
            "smooth_bowl" => Some(SyntheticKind::SmoothBowl),
            "rough_multimodal" => Some(SyntheticKind::RoughMultimodal),
            "perovskite_like" => Some(SyntheticKind::PerovskiteLike),
            _ => None,
        }
    }
}

/// Generated records plus the identity and direction of the global optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    pub dataset: Dataset,
    pub optimum_id: String,
    pub direction: Direction,
}

pub fn synthetic_dataset(
    kind: SyntheticKind,
    n_records: usize,
    dim: usize,
    seed: u64,
) -> Result<SyntheticDataset, CampaignError> {
    if n_records < 2 {
        return Err(CampaignError::SynthesisFailed(String::from(
            "n_records must be >= 2",
        )));
    }
    if dim < 1 {
        return Err(CampaignError::SynthesisFailed(String::from(
            "dim must be >= 1",
        )));
    }
    match kind {
        SyntheticKind::SmoothBowl => smooth_bowl(n_records, dim, seed),
        SyntheticKind::RoughMultimodal => rough_multimodal(n_records, dim, seed),
        SyntheticKind::PerovskiteLike => perovskite_like(n_records, seed),
    }
}

fn finish(
    records: Vec<MaterialRecord>,
    direction: Direction,
) -> Result<SyntheticDataset, CampaignError> {
    let mut best = 0usize;
    for (i, r) in records.iter().enumerate() {
        if direction.is_better(r.target, records[best].target) {
            best = i;
        }
    }
    let optimum_id = records[best].id.clone();
    Ok(SyntheticDataset {
        dataset: Dataset::new(records)?,
        optimum_id,
        direction,
    })
}

// features span ±0.6 so rotation-angle encodings stay within a quarter
// period without extra calibration
fn smooth_bowl(n: usize, dim: usize, seed: u64) -> Result<SyntheticDataset, CampaignError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let records = (0..n)
        .map(|i| {
            let features: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.6..0.6)).collect();
            let target: f64 = features
                .iter()
                .zip(&center)
                .map(|(x, c)| (x - c) * (x - c))
                .sum();
            MaterialRecord {
                id: format!("rec{i:04}"),
                features,
                target,
            }
        })
        .collect();
    finish(records, Direction::Minimize)
}

fn rough_target(x: &[f64]) -> f64 {
    x.iter()
        .map(|v| v * v - (3.0 * core::f64::consts::PI * v).cos())
        .sum::<f64>()
        + x.len() as f64
}

fn rough_multimodal(n: usize, dim: usize, seed: u64) -> Result<SyntheticDataset, CampaignError> {
    // respin with a derived seed when the sample happened to miss the wells
    for attempt in 0..8u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, attempt));
        let records: Vec<MaterialRecord> = (0..n)
            .map(|i| {
                let features: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let target = rough_target(&features);
                MaterialRecord {
                    id: format!("rec{i:04}"),
                    features,
                    target,
                }
            })
            .collect();
        if n < 8 || local_minima_count(&records) >= 2 {
            return finish(records, Direction::Minimize);
        }
    }
    Err(CampaignError::SynthesisFailed(String::from(
        "could not realize two local minima; increase n_records",
    )))
}

/// Records whose target beats every one of their k = min(5, n−1) nearest
/// neighbors.
fn local_minima_count(records: &[MaterialRecord]) -> usize {
    let n = records.len();
    let k = 5.min(n - 1);
    let mut count = 0;
    for i in 0..n {
        let mut dists: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                let d: f64 = records[i]
                    .features
                    .iter()
                    .zip(&records[j].features)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d, j)
            })
            .collect();
        dists.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        if dists
            .iter()
            .take(k)
            .all(|(_, j)| records[i].target < records[*j].target)
        {
            count += 1;
        }
    }
    count
}

fn perovskite_like(n: usize, seed: u64) -> Result<SyntheticDataset, CampaignError> {
    let table = IonPropertyTable::builtin();
    let a_dopants = ["Ca2+", "Sr2+", "Cd2+"];
    let b_dopants = ["Zr4+", "Sn4+", "Hf4+"];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(n);
    for i in 0..n {
        let a_idx = rng.gen_range(0..a_dopants.len());
        let b_idx = rng.gen_range(0..b_dopants.len());
        let x = rng.gen_range(0.0..0.5);
        let y = rng.gen_range(0.0..0.5);
        let comp = PerovskiteComposition {
            site_a: alloc::vec![
                SiteIon::from_label("Ba2+", 1.0 - x).map_err(step_to_synth)?,
                SiteIon::from_label(a_dopants[a_idx], x).map_err(step_to_synth)?,
            ],
            site_b: alloc::vec![
                SiteIon::from_label("Ti4+", 1.0 - y).map_err(step_to_synth)?,
                SiteIon::from_label(b_dopants[b_idx], y).map_err(step_to_synth)?,
            ],
        };
        let features = single_perovskite_descriptor(&comp, &table).map_err(step_to_synth)?;
        // one smooth peak in the (x, y) doping plane plus mild ripples and
        // ion-dependent shifts, in a piezoelectric-coefficient-like range
        let peak = 620.0 * (-((x - 0.31) * (x - 0.31) + (y - 0.18) * (y - 0.18)) / 0.045).exp();
        let ripple = 25.0 * (9.0 * x).sin() * (7.0 * y).cos();
        let shift = 8.0 * a_idx as f64 - 6.0 * b_idx as f64;
        records.push(MaterialRecord {
            id: format!("p{i:04}"),
            features,
            target: peak + ripple + shift,
        });
    }
    finish(records, Direction::Maximize)
}

fn step_to_synth(e: crate::descriptors::DescriptorError) -> CampaignError {
    CampaignError::SynthesisFailed(format!("descriptor failure: {e}"))
}
