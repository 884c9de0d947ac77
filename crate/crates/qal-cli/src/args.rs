//! Command-line surface.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qal",
    version,
    about = "Kernel-surrogate active learning for materials search on a statevector emulator"
)]
pub struct Cli {
    /// Verbose progress on standard error (also QAL_VERBOSE=1)
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic benchmark dataset CSV
    Synth {
        /// smooth_bowl | rough_multimodal | perovskite_like
        #[arg(long)]
        kind: String,
        #[arg(long)]
        records: usize,
        /// Feature dimension (ignored by perovskite_like)
        #[arg(long, default_value_t = 7)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Featurize compositions or structures into a descriptor CSV
    Descriptors {
        #[arg(long, value_enum)]
        kind: DescriptorKind,
        /// Compositions CSV (single/double/spin) or id,target index (xyz)
        #[arg(long)]
        input: Option<PathBuf>,
        /// Directory of `<id>.xyz` files (xyz kind)
        #[arg(long)]
        xyz_dir: Option<PathBuf>,
        /// Ion property table override (defaults to the built-in table)
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0)]
        mbtr_min: f64,
        #[arg(long, default_value_t = 1.0)]
        mbtr_max: f64,
        #[arg(long, default_value_t = 32)]
        mbtr_bins: usize,
        #[arg(long, default_value_t = 0.05)]
        mbtr_sigma: f64,
        /// Skip appending the spin-multiplicity vector (xyz kind)
        #[arg(long)]
        no_spin: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute the configured kernel's Gram matrix over a dataset
    Kernel {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Fit the configured surrogate and report train/test MAE on a held-out split
    Fit {
        #[arg(long)]
        config: PathBuf,
        /// Override the split seed (defaults to campaign.master_seed)
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0.05)]
        test_fraction: f64,
    },
    /// Exhaustive hyperparameter grid search scored by cross-validated MAE
    Gridsearch {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the active-learning campaign and emit trajectory/aggregate/KDE files
    Campaign {
        #[arg(long)]
        config: PathBuf,
        /// Override campaign.master_seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override campaign.n_runs
        #[arg(long)]
        runs: Option<usize>,
        /// Override the output directory (also QAL_OUT_DIR)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker-thread cap for the independent runs
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Gaussian kernel density estimate of one CSV column
    Kde {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "target")]
        column: String,
        /// Bandwidth override (defaults to Silverman's rule)
        #[arg(long)]
        bandwidth: Option<f64>,
        #[arg(long, default_value_t = 256)]
        grid_points: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DescriptorKind {
    Single,
    Double,
    Spin,
    Xyz,
}
