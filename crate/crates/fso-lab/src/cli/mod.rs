//! The experiment runner behind the `fso-lab` binary: TOML experiment
//! configs, a registry of built-in phases and symbols, deterministic
//! seeding, and persistent JSON/CSV artifacts.
//!
//! Exit codes: 0 success, 2 config validation, 3 numeric or accuracy
//! failure, 4 resource limits. Errors print one machine-readable JSON
//! object to stderr.

pub mod config;
pub mod output;
pub mod registry;
pub mod runner;

pub use config::{ExperimentConfig, Subcommand};
pub use output::{config_hash, fmt_float, CsvTable, Manifest, RunDirectory};
pub use registry::{build_phase, build_symbol, build_time_phase, build_time_symbol, listing};
pub use runner::{run, RunSummary};

use std::path::PathBuf;

use crate::error::{Error, Result};

/// CLI override flags applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub quiet: bool,
}

/// Load, override, and execute a config file.
pub fn run_config_file(path: &std::path::Path, overrides: &Overrides) -> Result<RunSummary> {
    let mut cfg = ExperimentConfig::from_path(path)?;
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &overrides.out {
        cfg.output_dir = out
            .to_str()
            .ok_or_else(|| Error::Config("output dir is not valid UTF-8".into()))?
            .to_string();
    }
    if let Some(threads) = overrides.threads {
        // best effort: the global pool can only be sized once per process
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let summary = run(&cfg)?;
    if !overrides.quiet {
        println!("{}", summary.headline);
        println!("artifacts: {}", summary.directory.display());
    }
    Ok(summary)
}
