//! End-to-end runs of every subcommand through the config runner, plus
//! schema and reproducibility checks on the artifacts.

use std::path::Path;

use fso_lab::cli::{run, ExperimentConfig, Overrides};

fn run_toml(text: &str, out: &Path) -> fso_lab::cli::RunSummary {
    // root-level keys must precede any table section
    let full = format!("output_dir = \"{}\"\n{text}", out.display());
    let cfg = ExperimentConfig::parse(&full).expect("config parses");
    run(&cfg).expect("run succeeds")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

fn schema_of(records: &str) -> Vec<String> {
    records
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).expect("valid json line");
            v["schema"].as_str().expect("schema field").to_string()
        })
        .collect()
}

#[test]
fn apply_identity_reproduces_the_input() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = run_toml(
        r#"
subcommand = "apply"
dimension = 1
grid = 16
cutoff = 7
seed = 5
[phase]
name = "linear"
[symbol]
name = "one"
[input]
name = "mode"
[input.params]
q1 = 3.0
"#,
        tmp.path(),
    );
    let table = read(&summary.directory, "table.csv");
    assert!(table.starts_with("node,re,im\n"));
    assert_eq!(table.lines().count(), 17);
    // output equals the input mode within 1e-10
    use std::f64::consts::TAU;
    for line in table.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let k: usize = cols[0].parse().unwrap();
        let re: f64 = cols[1].parse().unwrap();
        let im: f64 = cols[2].parse().unwrap();
        let x = k as f64 / 16.0;
        assert!((re - (TAU * 3.0 * x).cos()).abs() < 1e-10);
        assert!((im - (TAU * 3.0 * x).sin()).abs() < 1e-10);
    }
    assert_eq!(schema_of(&read(&summary.directory, "records.jsonl")), ["apply/v1"]);
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&summary.directory, "manifest.json")).unwrap();
    assert_eq!(manifest["schema"], "manifest/v1");
    assert_eq!(manifest["config_hash"], summary.config_hash.as_str());
}

#[test]
fn validate_phase_half_wave_reports_unit_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = run_toml(
        r#"
subcommand = "validate-phase"
dimension = 2
grid = 16
cutoff = 7
seed = 9
[phase]
name = "half-wave"
[phase.params]
t = 1.0
"#,
        tmp.path(),
    );
    let kv = read(&summary.directory, "report.kv");
    let get = |key: &str| -> f64 {
        kv.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}=")))
            .unwrap_or_else(|| panic!("missing {key}"))
            .parse()
            .unwrap()
    };
    assert!(kv.contains("periodicity_ok=true"));
    assert!((get("det_lower_bound") - 1.0).abs() < 1e-9);
    assert!((get("separation_constant") - 1.0).abs() < 1e-9);
    assert_eq!(
        schema_of(&read(&summary.directory, "records.jsonl")),
        ["validate-phase/v1"]
    );
}

#[test]
fn analyze_symbol_emits_the_seminorm_table() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = run_toml(
        r#"
subcommand = "analyze-symbol"
dimension = 1
grid = 128
cutoff = 63
seed = 1
[symbol]
name = "bracket-power"
[symbol.params]
kappa = -1.0
[class]
order = -1.0
max_alpha = 2
max_beta = 0
"#,
        tmp.path(),
    );
    let table = read(&summary.directory, "table.csv");
    assert!(table.starts_with("alpha,beta,constant\n"));
    assert_eq!(table.lines().count(), 1 + 3); // alpha in {0, 1, 2}
    let records = read(&summary.directory, "records.jsonl");
    assert_eq!(schema_of(&records), ["analyze-symbol/v1"]);
    let v: serde_json::Value = serde_json::from_str(records.lines().next().unwrap()).unwrap();
    let est = v["estimated_order"].as_f64().unwrap();
    assert!((est + 1.0).abs() < 0.05, "estimated order {est}");
}

#[test]
fn estimate_norm_reports_probe_and_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = run_toml(
        r#"
subcommand = "estimate-norm"
dimension = 1
grid = 16
cutoff = 7
p = 2.0
seed = 3
[phase]
name = "half-wave"
[symbol]
name = "cosine-modulated"
[symbol.params]
c = 0.5
[probe]
budget = 64
"#,
        tmp.path(),
    );
    let table = read(&summary.directory, "table.csv");
    assert!(table.starts_with("abscissa,estimate,method,seed\n"));
    assert!(table.contains("probe-lower-bound"));
    assert!(table.contains("exact-svd-p2"));
    // the probe lower bound never exceeds the exact value
    let mut probe = None;
    let mut exact = None;
    for line in table.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let value: f64 = cols[1].parse().unwrap();
        match cols[2] {
            "probe-lower-bound" => probe = Some(value),
            "exact-svd-p2" => exact = Some(value),
            other => panic!("unexpected method {other}"),
        }
    }
    let (probe, exact) = (probe.unwrap(), exact.unwrap());
    assert!(probe <= exact * (1.0 + 1e-9), "probe {probe} vs exact {exact}");
    assert!(probe >= exact * 0.95, "probe {probe} far below exact {exact}");
}

#[test]
fn transference_run_writes_both_sides() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = run_toml(
        r#"
subcommand = "transference"
dimension = 1
grid = 32
cutoff = 15
p = 2.0
seed = 4
[phase]
name = "linear"
[symbol]
name = "bracket-power"
[symbol.params]
kappa = -1.0
[probe]
budget = 32
"#,
        tmp.path(),
    );
    let table = read(&summary.directory, "table.csv");
    assert!(table.contains("torus-probe-lower-bound"));
    assert!(table.contains("euclid-probe-lower-bound"));
    assert_eq!(
        schema_of(&read(&summary.directory, "records.jsonl")),
        ["transference/v1"]
    );
}

#[test]
fn gaussian_limit_run_produces_unit_terms() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = run_toml(
        r#"
subcommand = "gaussian-limit"
dimension = 1
grid = 16
cutoff = 7
seed = 2
[input]
name = "mode"
[input.params]
q1 = 0.0
[gaussian]
eps = [0.1, 0.01]
"#,
        tmp.path(),
    );
    let table = read(&summary.directory, "table.csv");
    for line in table.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let value: f64 = cols[1].parse().unwrap();
        assert!((value - 1.0).abs() < 1e-12);
        assert_eq!(cols[2], "gaussian-limit");
    }
}

#[test]
fn gaussian_pairing_run_matches_discrete_side() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = run_toml(
        r#"
subcommand = "gaussian-limit"
dimension = 1
grid = 16
cutoff = 7
seed = 2
[symbol]
name = "bracket-power"
[symbol.params]
kappa = -1.0
[gaussian]
eps = [0.01, 0.001]
alpha = 0.5
beta = 0.5
mode_m = 2
mode_k = 2
"#,
        tmp.path(),
    );
    let records = read(&summary.directory, "records.jsonl");
    assert_eq!(schema_of(&records), ["gaussian-pairing/v1"]);
    let v: serde_json::Value = serde_json::from_str(records.lines().next().unwrap()).unwrap();
    let discrete = v["discrete_pairing"][0].as_f64().unwrap();
    assert!((discrete - 1.0 / 5.0f64.sqrt()).abs() < 1e-10);
}

#[test]
fn dispersive_sweep_run_is_uniformly_bounded() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = run_toml(
        r#"
subcommand = "dispersive-sweep"
dimension = 1
grid = 16
cutoff = 7
seed = 6
[phase]
name = "free-wave"
[symbol]
name = "dispersive-cutoff"
[symbol.params]
c = 1.0
amplitude = 0.0
[dispersive]
t_grid = [1.0, 2.0, 4.0]
"#,
        tmp.path(),
    );
    let table = read(&summary.directory, "table.csv");
    for line in table.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let value: f64 = cols[1].parse().unwrap();
        assert!((value - 1.0).abs() < 1e-10);
        assert_eq!(cols[2], "exact-svd-p2");
    }
    // validation report rides along
    assert!(summary.directory.join("report.kv").exists());
}

#[test]
fn truncation_sweep_rerun_is_byte_identical_and_seed_override_changes_it() {
    let tmp = tempfile::tempdir().unwrap();
    let config = r#"
subcommand = "truncation-sweep"
dimension = 1
grid = 18
cutoff = 8
p = 4.0
seed = 77
[phase]
name = "half-wave"
[symbol]
name = "bracket-power"
[symbol.params]
kappa = 0.0
[probe]
budget = 32
[sweep]
cutoffs = [2, 4, 8]
"#;
    let a = run_toml(config, tmp.path());
    let b = run_toml(config, tmp.path());
    assert_eq!(a.config_hash, b.config_hash);
    let body_a = std::fs::read(a.directory.join("table.csv")).unwrap();
    let body_b = std::fs::read(b.directory.join("table.csv")).unwrap();
    assert_eq!(body_a, body_b);

    // a seed override flows into the hash and the CSV seed column
    let path = tmp.path().join("cfg.toml");
    std::fs::write(
        &path,
        format!("output_dir = \"{}\"\n{config}", tmp.path().display()),
    )
    .unwrap();
    let with_seed = fso_lab::cli::run_config_file(
        &path,
        &Overrides {
            seed: Some(123),
            quiet: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert_ne!(with_seed.config_hash, a.config_hash);
    let body = std::fs::read_to_string(with_seed.directory.join("table.csv")).unwrap();
    assert!(body.lines().skip(1).all(|l| l.ends_with(",123")));
}

#[test]
fn config_errors_carry_exit_code_two() {
    let err = ExperimentConfig::parse("subcommand = \"apply\"").unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let cfg = ExperimentConfig::parse(
        r#"
subcommand = "truncation-sweep"
dimension = 1
grid = 16
cutoff = 7
seed = 0
[phase]
name = "half-wave"
[symbol]
name = "bracket-power"
[sweep]
cutoffs = [2, 4]
"#,
    );
    assert!(cfg.is_err());
}
