//! Thin command-line front end: `run` executes one experiment config,
//! `list` prints the built-in registry.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fso_lab::cli::{listing, run_config_file, Overrides};

#[derive(Parser)]
#[command(name = "fso-lab", version, about = "Spectral operator laboratory for the n-torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a TOML config file.
    Run {
        /// Path to the experiment config.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (defaults to the number of cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Override the output directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Suppress the headline summary on stdout.
        #[arg(long)]
        quiet: bool,
    },
    /// List the built-in phases, symbols and families.
    List {
        /// Case-insensitive substring filter.
        filter: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            seed,
            threads,
            out,
            quiet,
        } => {
            let overrides = Overrides {
                seed,
                out,
                threads,
                quiet,
            };
            match run_config_file(&config, &overrides) {
                Ok(_) => ExitCode::SUCCESS,
                Err(e) => {
                    let kind = match e.exit_code() {
                        2 => "config",
                        4 => "resource",
                        _ => "numeric",
                    };
                    eprintln!(
                        "{}",
                        serde_json::json!({
                            "error": kind,
                            "message": e.to_string(),
                        })
                    );
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::List { filter } => {
            print!("{}", listing(filter.as_deref()));
            ExitCode::SUCCESS
        }
    }
}
