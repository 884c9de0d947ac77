//! Command-line front end for the kernel-surrogate active-learning
//! workflow: configuration parsing, dataset ingestion, subcommand dispatch
//! and result emission. The heavy lifting lives in `qal-core`; this crate
//! owns files, processes and worker threads.

pub mod args;
pub mod commands;
pub mod config;
pub mod dataset;
pub mod emit;
pub mod error;
pub mod runner;

use clap::Parser;
use std::ffi::OsString;

/// Parses the argument vector, runs the selected subcommand and returns the
/// process exit code: 0 success, 1 usage error, 2 data error, 3 numerical
/// failure. Diagnostics go to standard error.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            eprintln!("error[usage]: invalid arguments");
            return 1;
        }
    };
    match commands::run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
