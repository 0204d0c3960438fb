//! Driving experiments through the config runner, exactly as the
//! `fso-lab` binary does: write a TOML config, run it, read back the
//! artifacts.
//!
//! ```bash
//! cargo run -p fso-lab --example experiment_runner
//! ```

use fso_lab::cli::{listing, run, ExperimentConfig};

fn main() -> fso_lab::Result<()> {
    println!("registry entries mentioning 'wave':\n{}", listing(Some("wave")));

    let dir = std::env::temp_dir().join("fso-lab-example-runs");
    let config_text = format!(
        r#"
subcommand = "validate-phase"
dimension = 2
grid = 16
cutoff = 7
seed = 11
output_dir = "{}"

[phase]
name = "half-wave"
[phase.params]
t = 1.0
"#,
        dir.display()
    );
    let cfg = ExperimentConfig::parse(&config_text)?;
    let summary = run(&cfg)?;
    println!("{}", summary.headline);
    println!("config hash: {}", summary.config_hash);

    let table = std::fs::read_to_string(summary.directory.join("table.csv"))?;
    println!("\nfirst lines of table.csv:");
    for line in table.lines().take(8) {
        println!("  {line}");
    }

    // identical configs reuse the same artifact directory
    let again = run(&cfg)?;
    assert_eq!(summary.config_hash, again.config_hash);
    println!("\nrerun landed in the same directory: {}", again.directory.display());
    Ok(())
}
