//! Probe-based comparison of a periodic operator against its euclidean
//! counterpart at matched budgets, in dimension one.
//!
//! Both sides see the same random trigonometric polynomials; the
//! euclidean copy is windowed by a smooth compactly supported plateau
//! so it lies in every `L^p(R)`. No ascent runs on either side, so the
//! two lower bounds stay comparable probe by probe.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::{fft_all_axes, inverse_transform, lp_norm_of_samples};
use crate::grid::{FrequencyCube, TorusGrid};
use crate::operator::{apply_to_spectrum, EuclideanFio, FsoOperator, QuadratureConfig};
use crate::phase::PhaseFunction;
use crate::symbol::{restrict_symbol, CardinalKernel, ContinuumSymbol};

use super::norms::probe_spectrum;

/// Outcome of one transference comparison.
#[derive(Debug, Clone, Serialize)]
pub struct TransferenceRecord {
    pub p: f64,
    pub probes: usize,
    pub seed: u64,
    pub euclid_norm_lb: f64,
    pub torus_norm_lb: f64,
    /// `torus_norm_lb / euclid_norm_lb`.
    pub ratio: f64,
}

/// Line discretization for the euclidean side: `x in [-16, 16)` at
/// spacing `1/128`, so one torus period is exactly 128 samples and the
/// dual grid has spacing `1/32` over `[-64, 64)`.
const LINE_HALF_WIDTH: f64 = 16.0;
const LINE_POINTS: usize = 4096;
const PLATEAU: f64 = 4.0;
const RAMP: f64 = 4.0;

fn line_step() -> f64 {
    2.0 * LINE_HALF_WIDTH / LINE_POINTS as f64
}

fn plateau_window(x: f64) -> f64 {
    let kernel = CardinalKernel;
    let a = x.abs();
    if a <= PLATEAU {
        1.0
    } else {
        kernel.eval(((a - PLATEAU) / RAMP).min(1.0))
    }
}

/// Apply a euclidean Fourier multiplier on the fixed line grid:
/// trapezoidal Fourier integrals arranged as FFTs (the grid constants
/// make the phase corrections pure sign flips).
fn euclid_multiplier_apply(
    multiplier: &dyn Fn(f64) -> Complex64,
    samples: &[Complex64],
) -> Result<Vec<Complex64>> {
    let q = LINE_POINTS;
    debug_assert_eq!(samples.len(), q);
    let dx = line_step();
    let dxi = 1.0 / (q as f64 * dx);
    let mut work: Vec<Complex64> = samples
        .iter()
        .enumerate()
        .map(|(i, &v)| if i % 2 == 0 { v } else { -v })
        .collect();
    fft_all_axes(&mut work, 1, q, -1);
    for (j, slot) in work.iter_mut().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let xi = (j as f64 - q as f64 / 2.0) * dxi;
        let m = multiplier(xi);
        if !m.re.is_finite() || !m.im.is_finite() {
            return Err(Error::Numeric {
                location: format!("euclidean multiplier at xi = {xi}"),
            });
        }
        // forward phase correction, multiplier, inverse phase correction
        *slot = *slot * (dx * sign) * m * (dxi * sign);
    }
    fft_all_axes(&mut work, 1, q, 1);
    for (i, slot) in work.iter_mut().enumerate() {
        if i % 2 != 0 {
            *slot = -*slot;
        }
    }
    Ok(work)
}

fn line_lp(values: &[Complex64], p: f64) -> f64 {
    lp_norm_of_samples(values, line_step(), p)
}

/// Estimate `|T_{phi,a}|_{L^p(R)}` and `|A_{phi,a|Z}|_{L^p(T)}` by
/// matched probe lower bounds and report both with their ratio.
///
/// The boundedness transfer runs euclidean -> torus, so the expected
/// (and logged, never asserted) direction is `torus <= C * euclid`.
pub fn transference_check(
    phase: &PhaseFunction,
    symbol: &ContinuumSymbol,
    p: f64,
    grid: &TorusGrid,
    cube: &FrequencyCube,
    probes: usize,
    seed: u64,
) -> Result<TransferenceRecord> {
    if grid.dimension() != 1 || phase.dimension() != 1 || symbol.dimension() != 1 {
        return Err(Error::Domain(
            "transference comparison runs in dimension one".into(),
        ));
    }
    if probes < 32 {
        return Err(Error::Domain(format!(
            "probe budget must be at least 32, got {probes}"
        )));
    }
    cube.check_fits(grid)?;
    if 2 * cube.cutoff() >= 64 {
        return Err(Error::Resource(format!(
            "cutoff {} exceeds the line grid's dual range",
            cube.cutoff()
        )));
    }

    // torus operator: the restriction of the continuum symbol
    let lattice = restrict_symbol(symbol, cube);
    let torus_op = FsoOperator::new_waived(phase.clone(), lattice, *grid, *cube)?;

    // euclidean application route
    let multiplier_route: Option<Box<dyn Fn(f64) -> Complex64 + Send + Sync>> =
        match (phase.frequency_profile(), symbol.x_independent()) {
            (Some(psi), true) => {
                let psi = psi.clone();
                let sym = symbol.clone();
                Some(Box::new(move |xi: f64| {
                    Complex64::from_polar(1.0, TAU * psi(&[xi])) * sym.eval(&[0.0], &[xi])
                }))
            }
            _ => None,
        };
    let general_route: Option<EuclideanFio> = if multiplier_route.is_none() {
        let ph = phase.clone();
        let sym = symbol.clone();
        Some(EuclideanFio::new(
            format!("transfer:{}", symbol.name()),
            move |x, xi| ph.eval(&[x], &[xi]),
            move |x, xi| sym.eval(&[x], &[xi]),
            QuadratureConfig::new(LINE_HALF_WIDTH, 2048, 64.0, 8192)?,
        ))
    } else {
        None
    };

    let weight = grid.weight();
    let ratios: Result<Vec<(f64, f64)>> = (0..probes)
        .into_par_iter()
        .map(|i| {
            let s = probe_spectrum(*cube, seed, i);
            // torus ratio
            let f = inverse_transform(&s, grid)?;
            let af = apply_to_spectrum(&torus_op, &s)?;
            let den_t = lp_norm_of_samples(f.values(), weight, p);
            let torus_ratio = if den_t > 0.0 {
                lp_norm_of_samples(af.values(), weight, p) / den_t
            } else {
                0.0
            };

            // euclidean ratio of the windowed copy
            let period = 128usize;
            let mut one_period = vec![Complex64::new(0.0, 0.0); period];
            for (j, slot) in one_period.iter_mut().enumerate() {
                *slot = s.evaluate(&[j as f64 / period as f64]);
            }
            let samples: Vec<Complex64> = (0..LINE_POINTS)
                .map(|q| {
                    let x = -LINE_HALF_WIDTH + q as f64 * line_step();
                    one_period[q % period] * plateau_window(x)
                })
                .collect();
            let transformed = match (&multiplier_route, &general_route) {
                (Some(m), _) => euclid_multiplier_apply(m.as_ref(), &samples)?,
                (None, Some(fio)) => {
                    let outputs: Vec<f64> = (0..LINE_POINTS)
                        .map(|q| -LINE_HALF_WIDTH + q as f64 * line_step())
                        .collect();
                    let sval = samples.clone();
                    let input = move |y: f64| {
                        let idx = ((y + LINE_HALF_WIDTH) / line_step()).round() as isize;
                        if idx < 0 || idx as usize >= LINE_POINTS {
                            Complex64::new(0.0, 0.0)
                        } else {
                            sval[idx as usize]
                        }
                    };
                    fio.apply(&input, &outputs)?
                }
                _ => unreachable!("one route is always built"),
            };
            let den_e = line_lp(&samples, p);
            let euclid_ratio = if den_e > 0.0 {
                line_lp(&transformed, p) / den_e
            } else {
                0.0
            };
            Ok((torus_ratio, euclid_ratio))
        })
        .collect();
    let ratios = ratios?;
    let torus_norm_lb = ratios.iter().map(|r| r.0).fold(0.0, f64::max);
    let euclid_norm_lb = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(TransferenceRecord {
        p,
        probes,
        seed,
        euclid_norm_lb,
        torus_norm_lb,
        ratio: if euclid_norm_lb > 0.0 {
            torus_norm_lb / euclid_norm_lb
        } else {
            f64::INFINITY
        },
    })
}
