//! Operator norms: exact singular values at p = 2 and certified probe
//! lower bounds for general p.
//!
//! ```bash
//! cargo run -p fso-lab --example norm_estimation
//! ```

use std::f64::consts::TAU;

use num_complex::Complex64;

use fso_lab::grid::bracket;
use fso_lab::lab::{norm_lp_probe, norm_p2_exact, power_iteration_sigma_max};
use fso_lab::operator::{assemble_matrix, FsoOperator};
use fso_lab::phase::PhaseFunction;
use fso_lab::symbol::LatticeSymbol;
use fso_lab::TorusGrid;

fn main() -> fso_lab::Result<()> {
    let grid = TorusGrid::new(1, 16)?;
    let cube = grid.default_cube();

    // an x-dependent operator under a half-wave phase
    let sym = LatticeSymbol::from_handle("bumpy", 1, 0.0, |x, xi| {
        Complex64::new(1.0 + 0.5 * (TAU * x[0]).cos(), 0.3 / bracket(xi))
    });
    let op = FsoOperator::new_waived(PhaseFunction::half_wave(1, 0.25), sym, grid, cube)?;

    // p = 2: exact via the dense singular value decomposition, with a
    // power-iteration cross-check
    let dense = assemble_matrix(&op)?;
    let exact = norm_p2_exact(&dense)?;
    let oracle = power_iteration_sigma_max(&dense, 200, 1);
    println!("p = 2 exact norm: {:.10} (power iteration {:.10})", exact.value, oracle);

    // probe lower bounds approach the exact value from below
    for budget in [32usize, 128, 512] {
        let est = norm_lp_probe(&op, 2.0, budget, 7)?;
        println!(
            "  probe budget {budget:>4}: lower bound {:.10} ({:.2}% of exact)",
            est.value,
            100.0 * est.value / exact.value
        );
    }

    // away from p = 2 only lower bounds are certified
    for p in [1.0, 4.0, f64::INFINITY] {
        let est = norm_lp_probe(&op, p, 128, 7)?;
        println!("p = {p:>3}: certified lower bound {:.6}", est.value);
    }
    Ok(())
}
