//! Dispersive families: hypothesis validation and uniform L^2 bounds
//! for time-parametrized operators with total phase
//! `x . xi + t phi(t, x, xi)`.
//!
//! ```bash
//! cargo run -p fso-lab --example dispersive_family
//! ```

use std::collections::BTreeMap;

use fso_lab::cli::{build_time_phase, build_time_symbol};
use fso_lab::lab::dispersive_sweep;
use fso_lab::phase::{validate_dispersive, DispersiveCheckConfig};
use fso_lab::{FrequencyCube, TorusGrid};

fn main() -> fso_lab::Result<()> {
    let grid = TorusGrid::new(1, 16)?;
    let cube = FrequencyCube::new(1, 7)?;
    let t_grid = [1.0, 2.0, 4.0, 8.0];

    let phase = build_time_phase("free-wave", 1)?;
    let mut params = BTreeMap::new();
    params.insert("c".to_string(), 1.0);
    params.insert("amplitude".to_string(), 1.0);
    let family = build_time_symbol("dispersive-cutoff", 1, &params)?;

    // hypothesis validation: determinant floor, decay tables, exact
    // support scan
    let report = validate_dispersive(
        &phase,
        &family,
        &t_grid,
        &grid,
        &cube,
        &DispersiveCheckConfig {
            sample_budget: 1000,
            ceiling: 2,
            seed: 3,
        },
    )?;
    println!(
        "validation: min det {:.3}, support ok {}, max C_ab {:.4}",
        report.worst_min_det(),
        report.support_ok(),
        report.max_symbol_decay()
    );
    for s in &report.slices {
        println!(
            "  t = {:>3}: min det {:.4}, sup |d_x a| t = {:.4}",
            s.t,
            s.min_det,
            s.symbol_decay.get("0|1").copied().unwrap_or(f64::NAN)
        );
    }

    // exact p = 2 norms per time: finite, settling as t grows
    let sweep = dispersive_sweep(&phase, &family, &t_grid, &grid, &cube, Some(&report))?;
    println!("\nexact L^2 norms:");
    for (t, e) in sweep.sweep.abscissas.iter().zip(&sweep.sweep.estimates) {
        println!("  t = {t:>3}: |A_t| = {:.10}", e.value);
    }
    println!(
        "sup_t = {:.10}, uniform-bound constant (sup / max C_ab) = {:.4}",
        sweep.sup_norm,
        sweep.bound_constant.unwrap_or(f64::NAN)
    );
    Ok(())
}
