//! Evaluation routes for periodic operators.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::{PeriodicFunction, SpectralSequence};
use crate::grid::FrequencyCube;
use crate::phase::PhaseFunction;
use crate::symbol::{AmplitudeSymbol, LatticeSymbol};

use super::FsoOperator;

/// Apply an operator to Fourier coefficients, choosing the fastest
/// exact route for the operator's structure.
pub fn apply_to_spectrum(op: &FsoOperator, s: &SpectralSequence) -> Result<PeriodicFunction> {
    if s.cube() != op.cube() {
        return Err(Error::Aliasing {
            cutoff: s.cube().cutoff(),
            points_per_axis: op.grid().points_per_axis(),
        });
    }
    match (op.phase().frequency_profile(), op.symbol().x_modes()) {
        (Some(psi), Some(modes)) => {
            let grid = op.grid();
            let cube = op.cube();
            let mut total = vec![Complex64::new(0.0, 0.0); grid.len()];
            for (eta, g) in modes {
                // coefficients of this mode's multiplier part
                let mut twisted = SpectralSequence::zeros(cube);
                for (flat, slot) in twisted.coefficients_mut().iter_mut().enumerate() {
                    let xi = cube.freq(flat);
                    let xf: Vec<f64> = xi.iter().map(|&c| c as f64).collect();
                    let p = psi(&xf);
                    if !p.is_finite() {
                        return Err(Error::Numeric {
                            location: format!("frequency profile at xi={xi:?}"),
                        });
                    }
                    *slot = Complex64::from_polar(1.0, TAU * p) * g(&xi) * s.coefficients()[flat];
                }
                let field = crate::fourier::inverse_transform(&twisted, &grid)?;
                let n = grid.points_per_axis() as f64;
                for (k, slot) in total.iter_mut().enumerate() {
                    let idx = grid.node_index(k);
                    let phase: f64 = idx
                        .iter()
                        .zip(eta.iter())
                        .map(|(&ki, &e)| ki as f64 * e as f64 / n)
                        .sum();
                    *slot += Complex64::from_polar(1.0, TAU * phase) * field.values()[k];
                }
            }
            PeriodicFunction::new(grid, total)
        }
        _ => apply_to_spectrum_direct(op, s),
    }
}

/// The direct oscillatory sum, parallel over output nodes.
pub fn apply_to_spectrum_direct(
    op: &FsoOperator,
    s: &SpectralSequence,
) -> Result<PeriodicFunction> {
    let grid = op.grid();
    let cube = op.cube();
    let coeffs = s.coefficients();
    let values: Result<Vec<Complex64>> = (0..grid.len())
        .into_par_iter()
        .map(|x_flat| {
            let x = grid.node(x_flat);
            let mut acc = Complex64::new(0.0, 0.0);
            for (flat, &c) in coeffs.iter().enumerate() {
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let xi = cube.freq(flat);
                let phi = op.phase().eval_lattice(&x, &xi);
                if !phi.is_finite() {
                    return Err(Error::Numeric {
                        location: format!("phase at x={x:?}, xi={xi:?}"),
                    });
                }
                let a = op.symbol().eval_on_node(&grid, x_flat, &xi);
                acc += Complex64::from_polar(1.0, TAU * phi) * a * c;
            }
            Ok(acc)
        })
        .collect();
    PeriodicFunction::new(grid, values?)
}

/// Evaluate `A f` at an arbitrary point of `R^n` by the defining sum;
/// used by the periodicity invariants.
pub fn evaluate_at(op: &FsoOperator, s: &SpectralSequence, x: &[f64]) -> Complex64 {
    let cube = op.cube();
    let mut acc = Complex64::new(0.0, 0.0);
    for (flat, &c) in s.coefficients().iter().enumerate() {
        let xi = cube.freq(flat);
        let phi = op.phase().eval_lattice(x, &xi);
        let a = op.symbol().eval(x, &xi);
        acc += Complex64::from_polar(1.0, TAU * phi) * a * c;
    }
    acc
}

/// `a(X, D) f`: the pseudo-differential operator with linear phase.
pub fn apply_pseudo(
    symbol: &LatticeSymbol,
    f: &PeriodicFunction,
    cube: &FrequencyCube,
) -> Result<PeriodicFunction> {
    let op = FsoOperator::pseudo_differential(symbol.clone(), f.grid(), *cube)?;
    op.apply(f)
}

/// Amplitude operator
///
/// ```text
/// T f(x) = sum_xi N^{-n} sum_y exp(2 pi i (phi(x, xi) - y . xi)) amp(x, y, xi) f(y),
/// ```
///
/// with the y-integral taken by grid quadrature. Direct triple sum,
/// desk scale only.
pub fn apply_amplitude(
    phase: &PhaseFunction,
    amp: &AmplitudeSymbol,
    f: &PeriodicFunction,
    cube: &FrequencyCube,
) -> Result<PeriodicFunction> {
    let grid = f.grid();
    grid.check_dimension(phase.dimension())?;
    grid.check_dimension(amp.dimension())?;
    cube.check_fits(&grid)?;
    let weight = grid.weight();
    let values: Result<Vec<Complex64>> = (0..grid.len())
        .into_par_iter()
        .map(|x_flat| {
            let x = grid.node(x_flat);
            let mut acc = Complex64::new(0.0, 0.0);
            for flat in 0..cube.len() {
                let xi = cube.freq(flat);
                let phi = phase.eval_lattice(&x, &xi);
                if !phi.is_finite() {
                    return Err(Error::Numeric {
                        location: format!("amplitude phase at x={x:?}, xi={xi:?}"),
                    });
                }
                let osc_x = Complex64::from_polar(1.0, TAU * phi);
                let mut inner = Complex64::new(0.0, 0.0);
                for y_flat in 0..grid.len() {
                    let y = grid.node(y_flat);
                    let ydotxi: f64 = y.iter().zip(xi.iter()).map(|(&a, &b)| a * b as f64).sum();
                    inner += Complex64::from_polar(1.0, -TAU * ydotxi)
                        * amp.eval(&x, &y, &xi)
                        * f.values()[y_flat];
                }
                acc += osc_x * inner * weight;
            }
            Ok(acc)
        })
        .collect();
    PeriodicFunction::new(grid, values?)
}
