//! Config-driven experiment dispatch.
//!
//! One run is one process: resolve the config, hash it, compute, and
//! write `manifest.json`, `records.jsonl` and `table.csv` under
//! `<output_dir>/<subcommand>/<config-hash>/`. Reruns with the same
//! config and seed produce byte-identical CSV bodies.

use serde_json::json;

use crate::error::{Error, Result};
use crate::fourier::lp_norm;
use crate::grid::{FrequencyCube, TorusGrid};
use crate::lab::{
    dispersive_sweep, discrete_pairing, gaussian_limit, gaussian_pairing,
    norm_lp_probe, norm_p2_exact, thresholds, transference_check, truncation_sweep,
    GaussianPairingConfig, PairingOperator,
};
use crate::operator::{assemble_matrix, FsoOperator};
use crate::phase::{validate_dispersive, validate_phase, DispersiveCheckConfig};
use crate::symbol::{seminorm_table, SymbolClassSpec};

use super::config::{ExperimentConfig, Subcommand};
use super::output::{config_hash, fmt_float, record, CsvTable, Manifest, RunDirectory};
use super::registry;

/// Paths and headline numbers of one completed run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub directory: std::path::PathBuf,
    pub config_hash: String,
    pub headline: String,
}

/// Execute one experiment. The config must already carry any CLI
/// overrides; hashing happens here so identical resolved configs land
/// in the same artifact directory.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let hash = config_hash(&cfg.canonical_toml());
    let dir = RunDirectory::new(&cfg.output_dir, cfg.subcommand.dir_name(), &hash);
    let grid = TorusGrid::new(cfg.dimension, cfg.grid)?;
    let cube = FrequencyCube::new(cfg.dimension, cfg.cutoff)?;

    let mut records: Vec<serde_json::Value> = Vec::new();
    let headline;
    let mut table;

    match cfg.subcommand {
        Subcommand::Apply => {
            let (phase, symbol) = build_operator_parts(cfg)?;
            let report = validate_phase(&phase, &grid, &cube, cfg.samples, cfg.seed)?;
            let op = FsoOperator::new(phase, symbol, grid, cube, &report)?;
            let input = cfg.input.as_ref().expect("validated");
            let f = registry::build_input(&input.name, grid, &input.params, cfg.seed)?;
            let out = op.apply(&f)?;
            table = CsvTable::new(&["node", "re", "im"]);
            for (k, v) in out.values().iter().enumerate() {
                table.push_row(&[k.to_string(), fmt_float(v.re), fmt_float(v.im)]);
            }
            let in_norm = lp_norm(&f, cfg.p)?;
            let out_norm = lp_norm(&out, cfg.p)?;
            records.push(record(
                "apply/v1",
                json!({
                    "input": input.name,
                    "input_norm": in_norm,
                    "output_norm": out_norm,
                    "p": cfg.p,
                    "periodicity_defect": report.periodicity_defect,
                }),
            ));
            headline = format!("apply: |A f|_p = {out_norm:.6e} (|f|_p = {in_norm:.6e})");
        }

        Subcommand::AnalyzeSymbol => {
            let symbol = build_lattice_symbol(cfg)?;
            // default ceilings track the boundedness hypotheses:
            // |alpha| <= n + 1 and |beta| <= [n/p] + 1
            let class = cfg.class.clone().unwrap_or(super::config::ClassConfig {
                order: symbol.declared_order(),
                rho: 1.0,
                delta: 0.0,
                max_alpha: cfg.dimension + 1,
                max_beta: (cfg.dimension as f64 / cfg.p).floor() as usize + 1,
            });
            let spec = SymbolClassSpec::new(
                class.order,
                class.rho,
                class.delta,
                class.max_alpha,
                class.max_beta,
            )?;
            let tab = seminorm_table(&symbol, &spec, &cube)?;
            table = CsvTable::new(&["alpha", "beta", "constant"]);
            for ((alpha, beta), c) in &tab.entries {
                table.push_row(&[
                    index_string(alpha),
                    index_string(beta),
                    fmt_float(*c),
                ]);
            }
            let order = if cube.cutoff() >= 32 {
                Some(crate::symbol::estimate_order(&symbol, &cube)?)
            } else {
                None
            };
            records.push(record(
                "analyze-symbol/v1",
                json!({
                    "symbol": symbol.name(),
                    "declared_order": symbol.declared_order(),
                    "estimated_order": order,
                    "class_order": spec.order,
                    "rho": spec.rho,
                    "delta": spec.delta,
                    "cutoff": tab.cutoff,
                    "max_constant": tab.max_constant(),
                }),
            ));
            headline = format!(
                "analyze-symbol: max seminorm {:.6e}, estimated order {:?}",
                tab.max_constant(),
                order
            );
        }

        Subcommand::ValidatePhase => {
            let phase = build_phase_only(cfg)?;
            let report = validate_phase(&phase, &grid, &cube, cfg.samples, cfg.seed)?;
            table = CsvTable::new(&["key", "value"]);
            for line in report.to_kv_lines().lines() {
                if let Some((k, v)) = line.split_once('=') {
                    table.push_row(&[k.to_string(), v.to_string()]);
                }
            }
            super::output::write_atomic(
                &dir.extra_path("report.kv"),
                report.to_kv_lines().as_bytes(),
            )?;
            records.push(record(
                "validate-phase/v1",
                serde_json::to_value(&report)
                    .map_err(|e| Error::Config(format!("report serialization: {e}")))?,
            ));
            headline = format!(
                "validate-phase: periodicity_ok={}, det >= {:.3e}, separation >= {:.3e}",
                report.periodicity_ok, report.det_lower_bound, report.separation_constant
            );
        }

        Subcommand::EstimateNorm => {
            let (phase, symbol) = build_operator_parts(cfg)?;
            let op = FsoOperator::new_waived(phase, symbol, grid, cube)?;
            let budget = cfg.probe.clone().unwrap_or_default().budget;
            let probe = norm_lp_probe(&op, cfg.p, budget, cfg.seed)?;
            table = CsvTable::new(&["abscissa", "estimate", "method", "seed"]);
            table.push_row(&[
                fmt_float(cfg.cutoff as f64),
                fmt_float(probe.value),
                "probe-lower-bound".into(),
                cfg.seed.to_string(),
            ]);
            let mut exact_value = None;
            if (cfg.p - 2.0).abs() < 1e-12 && grid.len() <= crate::operator::MAX_DENSE_NODES {
                let exact = norm_p2_exact(&assemble_matrix(&op)?)?;
                table.push_row(&[
                    fmt_float(cfg.cutoff as f64),
                    fmt_float(exact.value),
                    "exact-svd-p2".into(),
                    cfg.seed.to_string(),
                ]);
                exact_value = Some(exact.value);
            }
            records.push(record(
                "estimate-norm/v1",
                json!({
                    "p": cfg.p,
                    "probe_lower_bound": probe.value,
                    "exact_p2": exact_value,
                    "probes": probe.probes,
                    "seed": cfg.seed,
                    "generator": crate::lab::PROBE_GENERATOR_ID,
                }),
            ));
            headline = format!(
                "estimate-norm: probe lower bound {:.6e}{}",
                probe.value,
                exact_value
                    .map(|v| format!(", exact p=2 {v:.6e}"))
                    .unwrap_or_default()
            );
        }

        Subcommand::Transference => {
            let phase = build_phase_only(cfg)?;
            let symbol_cfg = cfg.symbol.as_ref().expect("validated");
            let continuum = registry::build_continuum_symbol(
                &symbol_cfg.name,
                cfg.dimension,
                &symbol_cfg.params,
            )?;
            let budget = cfg.probe.clone().unwrap_or_default().budget;
            let rec = transference_check(
                &phase, &continuum, cfg.p, &grid, &cube, budget, cfg.seed,
            )?;
            table = CsvTable::new(&["abscissa", "estimate", "method", "seed"]);
            table.push_row(&[
                fmt_float(cfg.cutoff as f64),
                fmt_float(rec.torus_norm_lb),
                "torus-probe-lower-bound".into(),
                cfg.seed.to_string(),
            ]);
            table.push_row(&[
                fmt_float(cfg.cutoff as f64),
                fmt_float(rec.euclid_norm_lb),
                "euclid-probe-lower-bound".into(),
                cfg.seed.to_string(),
            ]);
            records.push(record(
                "transference/v1",
                serde_json::to_value(&rec)
                    .map_err(|e| Error::Config(format!("record serialization: {e}")))?,
            ));
            headline = format!(
                "transference: torus {:.6e} vs euclid {:.6e} (ratio {:.4})",
                rec.torus_norm_lb, rec.euclid_norm_lb, rec.ratio
            );
        }

        Subcommand::TruncationSweep => {
            let phase = build_phase_only(cfg)?;
            let symbol_cfg = cfg.symbol.as_ref().expect("validated");
            if symbol_cfg.name != "bracket-power" {
                return Err(Error::Config(
                    "truncation-sweep uses the bracket-power symbol family".into(),
                ));
            }
            let kappa = *symbol_cfg.params.get("kappa").ok_or_else(|| {
                Error::Config("bracket-power needs params.kappa".into())
            })?;
            let budget = cfg.probe.clone().unwrap_or_default().budget;
            let cutoffs = &cfg.sweep.as_ref().expect("validated").cutoffs;
            let sweep = truncation_sweep(&phase, kappa, cfg.p, cutoffs, budget, cfg.seed)?;
            table = CsvTable::new(&["abscissa", "estimate", "method", "seed"]);
            for (a, e) in sweep.abscissas.iter().zip(&sweep.estimates) {
                table.push_row(&[
                    fmt_float(*a),
                    fmt_float(e.value),
                    "probe-lower-bound".into(),
                    cfg.seed.to_string(),
                ]);
            }
            let threshold = thresholds(cfg.dimension, cfg.p, 1.0)?;
            records.push(record(
                "truncation-sweep/v1",
                json!({
                    "kappa": kappa,
                    "kappa_p": threshold.kappa_p,
                    "p": cfg.p,
                    "exponent": sweep.exponent,
                    "residual": sweep.residual,
                    "reliable": sweep.reliable,
                    "probes": budget,
                    "generator": crate::lab::PROBE_GENERATOR_ID,
                }),
            ));
            headline = format!(
                "truncation-sweep: exponent {:?} (residual {:?}, kappa_p = {})",
                sweep.exponent, sweep.residual, threshold.kappa_p
            );
        }

        Subcommand::DispersiveSweep => {
            let phase_cfg = cfg.phase.as_ref().expect("validated");
            let symbol_cfg = cfg.symbol.as_ref().expect("validated");
            let disp = cfg.dispersive.as_ref().expect("validated");
            let tphase = registry::build_time_phase(&phase_cfg.name, cfg.dimension)?;
            let tfamily = registry::build_time_symbol(
                &symbol_cfg.name,
                cfg.dimension,
                &symbol_cfg.params,
            )?;
            let report = if disp.waive_validation {
                None
            } else {
                Some(validate_dispersive(
                    &tphase,
                    &tfamily,
                    &disp.t_grid,
                    &grid,
                    &cube,
                    &DispersiveCheckConfig {
                        sample_budget: cfg.samples,
                        ceiling: disp.ceiling,
                        seed: cfg.seed,
                    },
                )?)
            };
            let rec =
                dispersive_sweep(&tphase, &tfamily, &disp.t_grid, &grid, &cube, report.as_ref())?;
            table = CsvTable::new(&["abscissa", "estimate", "method", "seed"]);
            for (t, e) in rec.sweep.abscissas.iter().zip(&rec.sweep.estimates) {
                table.push_row(&[
                    fmt_float(*t),
                    fmt_float(e.value),
                    "exact-svd-p2".into(),
                    cfg.seed.to_string(),
                ]);
            }
            if let Some(rep) = &report {
                super::output::write_atomic(
                    &dir.extra_path("report.kv"),
                    rep.to_kv_lines().as_bytes(),
                )?;
            }
            records.push(record(
                "dispersive-sweep/v1",
                json!({
                    "sup_norm": rec.sup_norm,
                    "bound_constant": rec.bound_constant,
                    "gate": format!("{:?}", rec.gate),
                    "min_det": report.as_ref().map(|r| r.worst_min_det()),
                    "support_ok": report.as_ref().map(|r| r.support_ok()),
                }),
            ));
            headline = format!("dispersive-sweep: sup_t norm = {:.10}", rec.sup_norm);
        }

        Subcommand::GaussianLimit => {
            let g = cfg.gaussian.as_ref().expect("validated");
            table = CsvTable::new(&["abscissa", "estimate", "method", "seed"]);
            if let (Some(alpha), Some(beta), Some(m), Some(k)) =
                (g.alpha, g.beta, g.mode_m, g.mode_k)
            {
                let symbol_cfg = cfg.symbol.as_ref().expect("validated");
                let pairing_cfg =
                    GaussianPairingConfig::new(alpha, beta, g.eps.clone(), m, k)?;
                let (operator, discrete) = build_pairing_sides(cfg, symbol_cfg, grid, cube)?;
                let outcome = gaussian_pairing(&operator, &pairing_cfg, &discrete)?;
                for (eps, term) in g.eps.iter().zip(&outcome.terms) {
                    table.push_row(&[
                        fmt_float(*eps),
                        fmt_float(term.re),
                        "gaussian-pairing".into(),
                        cfg.seed.to_string(),
                    ]);
                }
                records.push(record(
                    "gaussian-pairing/v1",
                    serde_json::to_value(&outcome)
                        .map_err(|e| Error::Config(format!("record serialization: {e}")))?,
                ));
                headline = format!(
                    "gaussian-pairing: last term {:.8e}, discrete {:.8e}",
                    outcome.terms.last().map(|t| t.re).unwrap_or(f64::NAN),
                    outcome.discrete_pairing.re
                );
            } else {
                let input = cfg.input.as_ref().expect("validated");
                let f = registry::build_input(&input.name, grid, &input.params, cfg.seed)?;
                let terms = gaussian_limit(&f, &g.eps)?;
                for (eps, term) in g.eps.iter().zip(&terms) {
                    table.push_row(&[
                        fmt_float(*eps),
                        fmt_float(term.re),
                        "gaussian-limit".into(),
                        cfg.seed.to_string(),
                    ]);
                }
                records.push(record(
                    "gaussian-limit/v1",
                    json!({
                        "input": input.name,
                        "terms_re": terms.iter().map(|t| t.re).collect::<Vec<_>>(),
                        "terms_im": terms.iter().map(|t| t.im).collect::<Vec<_>>(),
                        "eps": g.eps,
                    }),
                ));
                headline = format!(
                    "gaussian-limit: last term {:.10e}",
                    terms.last().map(|t| t.re).unwrap_or(f64::NAN)
                );
            }
        }
    }

    dir.write_manifest(&Manifest::new(cfg.subcommand.dir_name(), &hash, cfg.seed))?;
    dir.write_records(&records)?;
    dir.write_table(&table)?;
    Ok(RunSummary {
        directory: dir.root.clone(),
        config_hash: hash,
        headline,
    })
}

fn index_string(idx: &[usize]) -> String {
    idx.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join("|")
}

fn build_phase_only(cfg: &ExperimentConfig) -> Result<crate::phase::PhaseFunction> {
    let phase_cfg = cfg
        .phase
        .as_ref()
        .ok_or_else(|| Error::Config("missing [phase] block".into()))?;
    registry::build_phase(&phase_cfg.name, cfg.dimension, &phase_cfg.params)
}

fn build_lattice_symbol(cfg: &ExperimentConfig) -> Result<crate::symbol::LatticeSymbol> {
    let symbol_cfg = cfg
        .symbol
        .as_ref()
        .ok_or_else(|| Error::Config("missing [symbol] block".into()))?;
    registry::build_symbol(&symbol_cfg.name, cfg.dimension, &symbol_cfg.params)
}

fn build_operator_parts(
    cfg: &ExperimentConfig,
) -> Result<(crate::phase::PhaseFunction, crate::symbol::LatticeSymbol)> {
    Ok((build_phase_only(cfg)?, build_lattice_symbol(cfg)?))
}

/// The euclidean operator and its matched periodic counterpart for a
/// pairing experiment.
fn build_pairing_sides(
    cfg: &ExperimentConfig,
    symbol_cfg: &super::config::EntryConfig,
    grid: TorusGrid,
    cube: FrequencyCube,
) -> Result<(PairingOperator, FsoOperator)> {
    let lattice =
        registry::build_symbol(&symbol_cfg.name, cfg.dimension, &symbol_cfg.params)?;
    let torus_op = FsoOperator::pseudo_differential(lattice, grid, cube)?;
    let operator = if symbol_cfg.name == "one" {
        PairingOperator::Identity
    } else {
        let continuum = registry::build_continuum_symbol(
            &symbol_cfg.name,
            cfg.dimension,
            &symbol_cfg.params,
        )?;
        if !continuum.x_independent() {
            return Err(Error::Config(
                "pairing operators must be frequency multipliers".into(),
            ));
        }
        PairingOperator::Multiplier {
            name: continuum.name().to_string(),
            sigma: std::sync::Arc::new(move |xi: f64| continuum.eval(&[0.0], &[xi])),
        }
    };
    // smoke check: the discrete side exists on this grid
    let _ = discrete_pairing(&torus_op, 0, 0)?;
    Ok((operator, torus_op))
}
