//! Worker-thread drivers. Campaign runs are independent (per-run derived
//! seeds), so a pool pulling run indices off an atomic counter reproduces
//! the serial result exactly; Gram-matrix rows are pure functions of cached
//! encodings, so row chunks parallelize the same way.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::error::CliError;
use qal_core::campaign::{
    run_campaign, run_seed, run_single, CampaignConfig, CampaignError, CampaignResult, Dataset,
    RunResult,
};
use qal_core::kernels::{
    embed_rows, encode_rows, fqk_square_rows, pqk_square_rows, KernelFamilyTag, KernelKind,
    KernelMatrix, KernelProvenance,
};
use qal_core::linalg::Mat;

/// Runs the campaign on up to `threads` workers. Results are ordered by run
/// index and identical to the serial path for every thread count.
pub fn run_campaign_threaded(
    config: &CampaignConfig,
    dataset: &Dataset,
    threads: usize,
    verbose: bool,
) -> Result<CampaignResult, CampaignError> {
    if threads <= 1 || config.n_runs == 1 {
        return run_campaign(config, dataset);
    }
    config.validate()?;
    let n = config.n_runs;
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<RunResult, CampaignError>>>> =
        Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..threads.min(n) {
            scope.spawn(|| loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= n {
                    break;
                }
                let outcome = run_single(config, dataset, idx, run_seed(config.master_seed, idx));
                if verbose {
                    eprintln!("run {idx} finished");
                }
                slots.lock().expect("no panics while holding the lock")[idx] = Some(outcome);
            });
        }
    });
    let collected = slots.into_inner().expect("workers joined");
    let mut runs = Vec::with_capacity(n);
    for slot in collected {
        runs.push(slot.expect("every run index was assigned")?);
    }
    Ok(CampaignResult { runs })
}

/// Square Gram matrix with quantum-kernel rows optionally split over worker
/// threads. Classical kernels are cheap and stay serial.
pub fn build_square_kernel_threaded(
    kind: &KernelKind,
    rows: &[Vec<f64>],
    ids: &[String],
    threads: usize,
) -> Result<KernelMatrix, CliError> {
    if threads <= 1 || rows.len() < 2 {
        return Ok(kind.square(rows, ids)?);
    }
    let n = rows.len();
    let chunk_starts: Vec<usize> = {
        let workers = threads.min(n);
        let base = n / workers;
        let extra = n % workers;
        let mut starts = vec![0usize];
        for w in 0..workers {
            let len = base + usize::from(w < extra);
            starts.push(starts[w] + len);
        }
        starts
    };
    let fill = |chunks: Vec<Vec<Vec<f64>>>| -> Mat {
        let mut values = Mat::zeros(n, n);
        let mut row_index = 0usize;
        for chunk in chunks {
            for row in chunk {
                values.row_mut(row_index).copy_from_slice(&row);
                row_index += 1;
            }
        }
        values
    };
    match kind {
        KernelKind::Fqk { spec } => {
            let states = encode_rows(spec, rows)?;
            type ChunkSlot = Option<Result<Vec<Vec<f64>>, CliError>>;
            let slots: Mutex<Vec<ChunkSlot>> =
                Mutex::new((0..chunk_starts.len() - 1).map(|_| None).collect());
            std::thread::scope(|scope| {
                for w in 0..chunk_starts.len() - 1 {
                    let states = &states;
                    let slots = &slots;
                    let range = chunk_starts[w]..chunk_starts[w + 1];
                    scope.spawn(move || {
                        let chunk = fqk_square_rows(states, range).map_err(CliError::from);
                        slots.lock().expect("lock")[w] = Some(chunk);
                    });
                }
            });
            let mut chunks = Vec::new();
            for slot in slots.into_inner().expect("workers joined") {
                chunks.push(slot.expect("chunk assigned")?);
            }
            Ok(KernelMatrix {
                values: fill(chunks),
                row_ids: ids.to_vec(),
                col_ids: ids.to_vec(),
                provenance: KernelProvenance::new(KernelFamilyTag::Fqk).with_feature_map(spec),
            })
        }
        KernelKind::Pqk { spec, gamma } => {
            let embeddings = embed_rows(spec, rows)?;
            let slots: Mutex<Vec<Option<Vec<Vec<f64>>>>> =
                Mutex::new((0..chunk_starts.len() - 1).map(|_| None).collect());
            std::thread::scope(|scope| {
                for w in 0..chunk_starts.len() - 1 {
                    let embeddings = &embeddings;
                    let slots = &slots;
                    let range = chunk_starts[w]..chunk_starts[w + 1];
                    let gamma = *gamma;
                    scope.spawn(move || {
                        let chunk = pqk_square_rows(embeddings, gamma, range);
                        slots.lock().expect("lock")[w] = Some(chunk);
                    });
                }
            });
            let chunks: Vec<Vec<Vec<f64>>> = slots
                .into_inner()
                .expect("workers joined")
                .into_iter()
                .map(|slot| slot.expect("chunk assigned"))
                .collect();
            Ok(KernelMatrix {
                values: fill(chunks),
                row_ids: ids.to_vec(),
                col_ids: ids.to_vec(),
                provenance: KernelProvenance::new(KernelFamilyTag::Pqk)
                    .with_param("pqk_gamma", *gamma)
                    .with_feature_map(spec),
            })
        }
        _ => Ok(kind.square(rows, ids)?),
    }
}
