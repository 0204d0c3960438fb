//! Transference: comparing a periodic operator against its euclidean
//! counterpart at matched probe budgets, plus a small euclidean FIO
//! demonstration.
//!
//! ```bash
//! cargo run --release -p fso-lab --example transference
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use fso_lab::grid::bracket_f;
use fso_lab::lab::transference_check;
use fso_lab::operator::{EuclideanFio, QuadratureConfig};
use fso_lab::phase::PhaseFunction;
use fso_lab::symbol::ContinuumSymbol;
use fso_lab::{FrequencyCube, TorusGrid};

fn main() -> fso_lab::Result<()> {
    // the euclidean FIO oracle: the Gaussian multiplier acts as a
    // Gaussian convolution
    let quad = QuadratureConfig::new(8.0, 1024, 8.0, 1024)?;
    let heat = EuclideanFio::multiplier(
        "gaussian-multiplier",
        |xi| Complex64::new((-PI * xi * xi).exp(), 0.0),
        quad,
    );
    let gaussian = |x: f64| Complex64::new((-PI * x * x).exp(), 0.0);
    let out = heat.apply_checked(&gaussian, &[0.0, 0.5, 1.0])?;
    println!("euclidean Gaussian multiplier on exp(-pi x^2):");
    for (x, v) in [0.0, 0.5, 1.0].iter().zip(&out) {
        let expect = (1.0 / 2.0f64.sqrt()) * (-PI * x * x / 2.0).exp();
        println!("  x = {x}: {v:.8} (closed form {expect:.8})");
    }

    // matched probe lower bounds on both sides of the transference
    let grid = TorusGrid::new(1, 32)?;
    let cube = FrequencyCube::new(1, 15)?;
    let symbols = [
        ContinuumSymbol::from_freq_fn("one", 1, 0.0, |_| Complex64::new(1.0, 0.0)),
        ContinuumSymbol::from_freq_fn("bracket-inverse", 1, -1.0, |xi| {
            Complex64::new(1.0 / bracket_f(xi), 0.0)
        }),
        ContinuumSymbol::from_freq_fn("smoothed-sign", 1, 0.0, |xi| {
            Complex64::new(xi[0] / bracket_f(xi), 0.0)
        }),
    ];
    println!("\nmatched probe lower bounds (budget 128):");
    for sym in &symbols {
        for p in [2.0, 4.0] {
            let rec =
                transference_check(&PhaseFunction::linear(1), sym, p, &grid, &cube, 128, 11)?;
            println!(
                "  {:<16} p = {p}: torus {:.6} <= euclid {:.6} (ratio {:.4})",
                sym.name(),
                rec.torus_norm_lb,
                rec.euclid_norm_lb,
                rec.ratio
            );
        }
    }
    Ok(())
}
