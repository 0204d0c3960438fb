//! Toroidal Fourier transform basics: grids, the transform pair,
//! Plancherel, Lebesgue norms and Schwartz-decay constants.
//!
//! ```bash
//! cargo run -p fso-lab --example fourier_roundtrip
//! ```

use std::f64::consts::TAU;

use num_complex::Complex64;

use fso_lab::fourier::{forward_transform, inverse_transform, lp_norm, schwartz_decay};
use fso_lab::grid::bracket;
use fso_lab::{FrequencyCube, PeriodicFunction, SpectralSequence, TorusGrid};

fn main() -> fso_lab::Result<()> {
    let grid = TorusGrid::new(1, 16)?;
    println!("grid: {} nodes, quadrature weight {}", grid.len(), grid.weight());

    // cos(2 pi x) splits into two half modes
    let f = PeriodicFunction::from_fn(grid, |x| Complex64::new((TAU * x[0]).cos(), 0.0));
    let s = forward_transform(&f)?;
    println!(
        "cos(2 pi x): fhat(+1) = {:.3}, fhat(-1) = {:.3}, fhat(2) = {:.3e}",
        s.coefficient(&[1]).re,
        s.coefficient(&[-1]).re,
        s.coefficient(&[2]).norm()
    );

    // band-limited roundtrip is exact
    let cube = grid.default_cube();
    let poly = SpectralSequence::from_fn(cube, |xi| {
        if xi[0].abs() <= 5 {
            Complex64::new(1.0 / bracket(xi), 0.5)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let g = inverse_transform(&poly, &grid)?;
    let back = forward_transform(&g)?;
    let err = poly
        .coefficients()
        .iter()
        .zip(back.coefficients())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    println!("degree-5 roundtrip max error: {err:.2e}");

    // Plancherel
    let spatial: f64 = grid.weight() * g.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
    println!(
        "plancherel: spatial {spatial:.12}, spectral {:.12}",
        poly.energy()
    );

    // norms are monotone in p below the unit sup bound
    for p in [1.0, 2.0, 4.0, f64::INFINITY] {
        println!("  |cos|_{p} = {:.6}", lp_norm(&f, p)?);
    }

    // decay witness: <xi>^{-5} is Schwartz-class at order 5, the
    // constant sequence is not
    let big = FrequencyCube::new(1, 64)?;
    let nice = SpectralSequence::from_fn(big, |xi| Complex64::new(bracket(xi).powi(-5), 0.0));
    let flat = SpectralSequence::from_fn(big, |_| Complex64::new(1.0, 0.0));
    println!(
        "decay constants at M = 5: smooth {:.3}, flat {:.3e} (grows with the cube)",
        schwartz_decay(&nice, 5.0),
        schwartz_decay(&flat, 5.0)
    );
    Ok(())
}
