//! Applying periodic operators: pseudo-differential multipliers, Fourier
//! series operators with nonlinear phases, amplitude operators, and
//! dense assembly with adjoints.
//!
//! ```bash
//! cargo run -p fso-lab --example apply_operators
//! ```

use std::f64::consts::TAU;

use num_complex::Complex64;

use fso_lab::fourier::lp_norm;
use fso_lab::operator::{adjoint, apply_amplitude, apply_pseudo, assemble_matrix, FsoOperator};
use fso_lab::phase::PhaseFunction;
use fso_lab::symbol::{AmplitudeSymbol, LatticeSymbol};
use fso_lab::{PeriodicFunction, TorusGrid};

fn mode(grid: TorusGrid, q: i64) -> PeriodicFunction {
    PeriodicFunction::from_fn(grid, move |x| {
        Complex64::from_polar(1.0, TAU * q as f64 * x[0])
    })
}

fn main() -> fso_lab::Result<()> {
    let grid = TorusGrid::new(1, 16)?;
    let cube = grid.default_cube();

    // a frequency multiplier scales each mode by its symbol value
    let xi_sym = LatticeSymbol::from_freq_fn("xi", 1, 1.0, |xi| Complex64::new(xi[0] as f64, 0.0));
    let f = mode(grid, 3);
    let out = apply_pseudo(&xi_sym, &f, &cube)?;
    println!(
        "multiplier xi on exp(2 pi i 3x): output/input at node 1 = {:.3}",
        (out.values()[1] / f.values()[1]).re
    );

    // the half-wave phase advances each mode by exp(2 pi i t |xi|)
    let one = LatticeSymbol::from_freq_fn("one", 1, 0.0, |_| Complex64::new(1.0, 0.0));
    let op = FsoOperator::new_waived(PhaseFunction::half_wave(1, 0.5), one, grid, cube)?;
    let propagated = op.apply(&f)?;
    println!(
        "half-wave at t = 1/2 on exp(2 pi i 3x): phase factor = {:.3} (expect -1)",
        (propagated.values()[0] / f.values()[0]).re
    );

    // the same operator through the direct oscillatory sum
    let direct = op.apply_direct(&f)?;
    let agreement = propagated
        .values()
        .iter()
        .zip(direct.values())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    println!("fast route vs direct sum: {agreement:.2e}");

    // an amplitude operator with trivial amplitude collapses to the
    // pseudo-differential case
    let amp = AmplitudeSymbol::new("one", 1, 0.0, |_x, _y, _xi| Complex64::new(1.0, 0.0));
    let through_amplitude = apply_amplitude(&PhaseFunction::linear(1), &amp, &f, &cube)?;
    println!(
        "amplitude identity on a band-limited mode: |T f - f|_2 = {:.2e}",
        lp_norm(
            &PeriodicFunction::new(
                grid,
                through_amplitude
                    .values()
                    .iter()
                    .zip(f.values())
                    .map(|(a, b)| a - b)
                    .collect()
            )?,
            2.0
        )?
    );

    // dense assembly: the exact matrix of the operator on the grid,
    // self-checked against direct application on construction
    let dense = assemble_matrix(&op)?;
    println!("assembled {}x{} matrix ({})", dense.len(), dense.len(), dense.provenance());
    let star = adjoint(&dense);
    let w = grid.weight();
    let g = mode(grid, 2);
    let lhs: Complex64 = dense
        .matvec(f.values())
        .iter()
        .zip(g.values())
        .map(|(a, b)| a * b.conj())
        .sum::<Complex64>()
        * w;
    let rhs: Complex64 = f
        .values()
        .iter()
        .zip(star.matvec(g.values()))
        .map(|(a, b)| a * b.conj())
        .sum::<Complex64>()
        * w;
    println!("adjoint identity <Af, g> - <f, A*g> = {:.2e}", (lhs - rhs).norm());
    Ok(())
}
