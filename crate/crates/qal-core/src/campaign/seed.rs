//! Splittable seed derivation. Every stream a campaign consumes (per-run,
//! per-cycle, per-purpose) is derived from the master seed through the same
//! documented mix, so runs and cycles are independent of execution order and
//! safe to compute in parallel.

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed: two SplitMix64 rounds over the base
/// offset by the stream index times the golden-ratio increment.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    mix(mix(base.wrapping_add(
        stream
            .wrapping_add(1)
            .wrapping_mul(0x9E3779B97F4A7C15),
    )))
}

/// The run seed of run `run_index` under a master seed; the parallel and
/// serial campaign drivers both go through this function.
pub fn run_seed(master_seed: u64, run_index: usize) -> u64 {
    derive_seed(master_seed, run_index as u64)
}
