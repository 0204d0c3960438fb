//! Numerical validation of phase and dispersive-family hypotheses.
//!
//! Sampling is a single deterministic stream per seed, consumed one
//! packet per sample index, so doubling the budget extends the sample
//! set: reported lower bounds can only decrease and suprema only grow.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{bracket_f, freq_norm, FrequencyCube, TorusGrid};
use crate::symbol::{forward_difference, multi_indices, x_derivative};

use super::report::{
    DispersivePhaseReport, DispersiveReportSlice, PhaseReport, Window, PERIODICITY_TOLERANCE,
};
use super::{small_det, PhaseFunction, TimePhase, TimeSymbolFamily};

/// Default ceiling for the `|d_y^alpha phi| <= C |xi|` growth check.
pub const DEFAULT_ALPHA_CEILING: usize = 3;

/// Homogeneity is probed multiplicatively at these scale factors.
pub const HOMOGENEITY_LAMBDAS: [f64; 3] = [2.0, 3.0, 7.5];

/// Validate torus-compatibility, homogeneity, the mixed-Hessian
/// determinant bound, gradient comparability windows, the lattice
/// separation condition and first-order derivative seminorms, on
/// `sample_budget` deterministic pseudo-random samples.
pub fn validate_phase(
    phase: &PhaseFunction,
    grid: &TorusGrid,
    cube: &FrequencyCube,
    sample_budget: usize,
    seed: u64,
) -> Result<PhaseReport> {
    if sample_budget < 1000 {
        return Err(Error::Domain(format!(
            "sample budget must be at least 1000, got {sample_budget}"
        )));
    }
    grid.check_dimension(phase.dimension())?;
    cube.check_fits(grid)?;
    let n = phase.dimension();
    let xi_max = cube.cutoff() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut periodicity_defect = 0.0f64;
    let mut homogeneity_defect = 0.0f64;
    let mut det_lower = f64::INFINITY;
    let mut grad_xi_window = Window::empty();
    let mut grad_x_window = Window::empty();
    let mut separation = f64::INFINITY;
    let mut mixed_sup = vec![0.0f64; n * n];
    let alpha_ceiling = DEFAULT_ALPHA_CEILING;
    let growth_indices: Vec<Vec<usize>> = multi_indices(n, alpha_ceiling)
        .into_iter()
        .filter(|a| a.iter().sum::<usize>() >= 1)
        .collect();
    let mut grad_growth = vec![0.0f64; growth_indices.len()];

    for _ in 0..sample_budget {
        // one packet of randomness per sample, in fixed order
        let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        let xi_lat = nonzero_lattice_point(&mut rng, cube);
        let xi_pair = stratified_partner(&mut rng, cube, &xi_lat);
        let xi_cont = continuous_frequency(&mut rng, n, xi_max);
        let lambda = HOMOGENEITY_LAMBDAS[rng.gen_range(0..HOMOGENEITY_LAMBDAS.len())];

        // (i) torus-compatibility at lattice frequencies
        let xi_lat_f: Vec<f64> = xi_lat.iter().map(|&c| c as f64).collect();
        let base = phase.eval(&x, &xi_lat_f);
        for j in 0..n {
            let mut shifted = x.clone();
            shifted[j] += 1.0;
            let delta = phase.eval(&shifted, &xi_lat_f) - base;
            if !delta.is_finite() {
                return Err(Error::Numeric {
                    location: format!("periodicity check at x={x:?}, xi={xi_lat:?}"),
                });
            }
            let defect = (delta - delta.round()).abs();
            periodicity_defect = periodicity_defect.max(defect);
        }

        // (ii) degree-one homogeneity away from xi = 0
        let value = phase.eval(&x, &xi_cont);
        let scaled: Vec<f64> = xi_cont.iter().map(|&c| lambda * c).collect();
        let defect =
            (phase.eval(&x, &scaled) - lambda * value).abs() / (lambda * value).abs().max(1.0);
        homogeneity_defect = homogeneity_defect.max(defect);

        // (iii) mixed-Hessian determinant
        let m = phase.mixed_hessian(&x, &xi_cont)?;
        let det = small_det(&m, n).abs();
        det_lower = det_lower.min(det);
        for (k, entry) in m.iter().enumerate() {
            mixed_sup[k] = mixed_sup[k].max(entry.abs());
        }

        // (iv) comparability windows
        let gxi = phase.grad_xi(&x, &xi_cont)?;
        grad_xi_window.absorb(bracket_f(&gxi));
        let gx = phase.grad_x(&x, &xi_cont)?;
        grad_x_window.absorb(bracket_f(&gx) / bracket_f(&xi_cont));

        // (v) separation over lattice pairs
        if let Some(xi_other) = xi_pair {
            let xi_other_f: Vec<f64> = xi_other.iter().map(|&c| c as f64).collect();
            let ga = phase.grad_x(&x, &xi_lat_f)?;
            let gb = phase.grad_x(&x, &xi_other_f)?;
            let num: f64 = ga
                .iter()
                .zip(gb.iter())
                .map(|(&p, &q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            let den: f64 = xi_lat
                .iter()
                .zip(xi_other.iter())
                .map(|(&p, &q)| ((p - q) * (p - q)) as f64)
                .sum::<f64>()
                .sqrt();
            separation = separation.min(num / den);
        }

        // (vi) spatial-derivative growth |d_y^alpha phi| / |xi|
        let r = freq_norm_f(&xi_cont);
        for (slot, alpha) in grad_growth.iter_mut().zip(growth_indices.iter()) {
            let d = x_partial(phase, &x, &xi_cont, alpha)?;
            *slot = slot.max(d.abs() / r);
        }
    }

    let derivative_seminorms = mixed_sup
        .iter()
        .enumerate()
        .map(|(k, &v)| (format!("{},{}", k / n, k % n), v))
        .collect();
    let grad_growth_map = grad_growth
        .iter()
        .zip(growth_indices.iter())
        .map(|(&v, a)| {
            let key = a
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join("");
            (key, v)
        })
        .collect();

    Ok(PhaseReport {
        phase_name: phase.name().to_string(),
        dimension: n,
        sample_budget,
        seed,
        periodicity_defect,
        periodicity_ok: periodicity_defect < PERIODICITY_TOLERANCE,
        homogeneity_defect,
        det_lower_bound: det_lower,
        grad_xi_comparability: grad_xi_window,
        grad_x_comparability: grad_x_window,
        separation_constant: separation,
        derivative_seminorms,
        alpha_ceiling,
        grad_growth: grad_growth_map,
    })
}

fn freq_norm_f(xi: &[f64]) -> f64 {
    xi.iter().map(|&c| c * c).sum::<f64>().sqrt()
}

/// `d_x^alpha phi` via the analytic gradient for first order and nested
/// central differences beyond.
fn x_partial(phase: &PhaseFunction, x: &[f64], xi: &[f64], alpha: &[usize]) -> Result<f64> {
    let total: usize = alpha.iter().sum();
    if total == 0 {
        return Ok(phase.eval(x, xi));
    }
    if total == 1 {
        let j = alpha.iter().position(|&a| a == 1).unwrap();
        return Ok(phase.grad_x(x, xi)?[j]);
    }
    let j = alpha.iter().position(|&a| a > 0).unwrap();
    let mut lower = alpha.to_vec();
    lower[j] -= 1;
    let h = 1e-4;
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    plus[j] += h;
    minus[j] -= h;
    Ok((x_partial(phase, &plus, xi, &lower)? - x_partial(phase, &minus, xi, &lower)?) / (2.0 * h))
}

fn nonzero_lattice_point(rng: &mut ChaCha8Rng, cube: &FrequencyCube) -> Vec<i64> {
    loop {
        let xi: Vec<i64> = (0..cube.dimension())
            .map(|_| rng.gen_range(-cube.cutoff()..=cube.cutoff()))
            .collect();
        if xi.iter().any(|&c| c != 0) {
            return xi;
        }
    }
}

/// Partner lattice point at a dyadically-stratified distance, clipped
/// to the cube; `None` when the draw collides with `xi`.
fn stratified_partner(
    rng: &mut ChaCha8Rng,
    cube: &FrequencyCube,
    xi: &[i64],
) -> Option<Vec<i64>> {
    let scales: Vec<i64> = {
        let mut s = vec![1i64];
        while 2 * s.last().unwrap() <= 2 * cube.cutoff() {
            s.push(2 * s.last().unwrap());
        }
        s
    };
    let scale = scales[rng.gen_range(0..scales.len())];
    let partner: Vec<i64> = xi
        .iter()
        .map(|&c| {
            let offset = rng.gen_range(-scale..=scale);
            (c + offset).clamp(-cube.cutoff(), cube.cutoff())
        })
        .collect();
    if partner == xi {
        None
    } else {
        Some(partner)
    }
}

fn continuous_frequency(rng: &mut ChaCha8Rng, n: usize, xi_max: f64) -> Vec<f64> {
    loop {
        let xi: Vec<f64> = (0..n)
            .map(|_| xi_max * 2.0 * (rng.gen::<f64>() - 0.5))
            .collect();
        if freq_norm_f(&xi) >= 0.5 {
            return xi;
        }
    }
}

/// Configuration for [`validate_dispersive`].
#[derive(Debug, Clone, Copy)]
pub struct DispersiveCheckConfig {
    pub sample_budget: usize,
    /// Ceiling on `|alpha|`, `|beta|` in the decay tables; clipped to
    /// `2n + 2`.
    pub ceiling: usize,
    pub seed: u64,
}

impl Default for DispersiveCheckConfig {
    fn default() -> Self {
        Self {
            sample_budget: 1000,
            ceiling: 2,
            seed: 0,
        }
    }
}

/// Validate a dispersive family: per time, the determinant lower bound
/// `|det(I + t d_x d_xi phi)|`, the phase and symbol decay ratios
/// `sup |.| t^{|beta|}`, and the exact support scan `a(t, x, xi) = 0`
/// where `t |xi| < C`.
pub fn validate_dispersive(
    phase: &TimePhase,
    symbols: &TimeSymbolFamily,
    t_grid: &[f64],
    grid: &TorusGrid,
    cube: &FrequencyCube,
    cfg: &DispersiveCheckConfig,
) -> Result<DispersivePhaseReport> {
    grid.check_dimension(phase.dimension())?;
    cube.check_fits(grid)?;
    let n = phase.dimension();
    let ceiling = cfg.ceiling.min(2 * n + 2);
    for &t in t_grid {
        if t <= 0.0 || t < phase.t_floor() {
            return Err(Error::Domain(format!(
                "dispersive time {t} outside [t0, inf) with t0 = {}",
                phase.t_floor().max(f64::MIN_POSITIVE)
            )));
        }
    }

    // the phase condition ranges over 1 <= |alpha|, |beta|; the symbol
    // condition starts at zero
    let nonzero_indices: Vec<Vec<usize>> = multi_indices(n, ceiling)
        .into_iter()
        .filter(|a| a.iter().sum::<usize>() >= 1)
        .collect();
    let all_indices = multi_indices(n, ceiling);
    let xi_max = cube.cutoff() as f64;

    let mut slices = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ t.to_bits());

        // determinant of I + t * (bare mixed hessian)
        let mut min_det = f64::INFINITY;
        for _ in 0..cfg.sample_budget {
            let x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            let xi = continuous_frequency(&mut rng, n, xi_max);
            let mut m = phase.bare_mixed_hessian(t, &x, &xi)?;
            for slot in m.iter_mut() {
                *slot *= t;
            }
            for i in 0..n {
                m[i * n + i] += 1.0;
            }
            min_det = min_det.min(small_det(&m, n).abs());
        }

        // phase decay: sup |d_x^beta d_xi^alpha phi| t^{|beta|}
        let mut phase_decay = std::collections::BTreeMap::new();
        let mut rng2 = ChaCha8Rng::seed_from_u64(cfg.seed ^ t.to_bits() ^ 0x9e37_79b9);
        let probe_count = (cfg.sample_budget / 10).max(32);
        for alpha in &nonzero_indices {
            for beta in &nonzero_indices {
                let mut sup = 0.0f64;
                for _ in 0..probe_count {
                    let x: Vec<f64> = (0..n).map(|_| rng2.gen::<f64>()).collect();
                    let xi = continuous_frequency(&mut rng2, n, xi_max);
                    let d = phase.derivative(t, &x, &xi, alpha, beta)?;
                    sup = sup.max(d.abs());
                }
                let tb: usize = beta.iter().sum();
                phase_decay.insert(decay_key(alpha, beta), sup * t.powi(tb as i32));
            }
        }

        // symbol decay: sup |Delta^alpha d_x^beta a| t^{|beta|}, exact
        // over grid x cube
        let a_t = symbols.symbol_at(t)?;
        let mut symbol_decay = std::collections::BTreeMap::new();
        for alpha in &all_indices {
            for beta in &all_indices {
                let diffed = forward_difference(&x_derivative(&a_t, beta)?, alpha)?;
                let x_count = if diffed.x_independent().is_some() {
                    1
                } else {
                    grid.len()
                };
                let mut sup = 0.0f64;
                for flat in 0..cube.len() {
                    let xi = cube.freq(flat);
                    if let Some(domain) = diffed.domain() {
                        if !domain.contains(&xi) {
                            continue;
                        }
                    }
                    for x_flat in 0..x_count {
                        sup = sup.max(diffed.eval_on_node(grid, x_flat, &xi).norm());
                    }
                }
                let tb: usize = beta.iter().sum();
                symbol_decay.insert(decay_key(alpha, beta), sup * t.powi(tb as i32));
            }
        }

        // support: exact scan of a(t, x, xi) where t |xi| < C
        let mut support_defect = 0.0f64;
        if let Some(c) = symbols.support_constant() {
            for flat in 0..cube.len() {
                let xi = cube.freq(flat);
                if t * freq_norm(&xi) >= c {
                    continue;
                }
                for x_flat in 0..grid.len() {
                    support_defect = support_defect.max(a_t.eval_on_node(grid, x_flat, &xi).norm());
                }
            }
        }

        slices.push(DispersiveReportSlice {
            t,
            min_det,
            phase_decay,
            symbol_decay,
            support_defect,
            support_ok: support_defect == 0.0,
        });
    }

    Ok(DispersivePhaseReport {
        phase_name: phase.name().to_string(),
        symbol_name: symbols.name().to_string(),
        seed: cfg.seed,
        ceiling,
        slices,
    })
}

fn decay_key(alpha: &[usize], beta: &[usize]) -> String {
    let a: String = alpha.iter().map(|c| c.to_string()).collect();
    let b: String = beta.iter().map(|c| c.to_string()).collect();
    format!("{a}|{b}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::TAU;

    fn setup() -> (TorusGrid, FrequencyCube) {
        (
            TorusGrid::new(2, 16).unwrap(),
            FrequencyCube::new(2, 7).unwrap(),
        )
    }

    #[test]
    fn linear_phase_passes_all_checks() {
        let (grid, cube) = setup();
        let report =
            validate_phase(&PhaseFunction::linear(2), &grid, &cube, 1000, 17).unwrap();
        assert!(report.periodicity_ok);
        assert!(report.periodicity_defect < 1e-12);
        assert!(report.homogeneity_defect < 1e-12);
        assert!((report.det_lower_bound - 1.0).abs() < 1e-12);
        assert!((report.separation_constant - 1.0).abs() < 1e-12);
        // <grad_xi phi> = <x> lies inside [1, sqrt(1 + n)]
        assert!(report.grad_xi_comparability.min >= 1.0 - 1e-12);
        assert!(report.grad_xi_comparability.max <= (1.0f64 + 2.0).sqrt() + 1e-12);
        assert!((report.derivative_seminorms["0,0"] - 1.0).abs() < 1e-12);
        assert!(report.derivative_seminorms["0,1"] < 1e-12);
    }

    #[test]
    fn half_wave_phase_matches_expectations() {
        let (grid, cube) = setup();
        let report =
            validate_phase(&PhaseFunction::half_wave(2, 1.0), &grid, &cube, 1000, 3).unwrap();
        assert!(report.periodicity_ok);
        assert!(report.homogeneity_defect < 1e-10);
        assert!((report.det_lower_bound - 1.0).abs() < 1e-10);
        assert!((report.separation_constant - 1.0).abs() < 1e-10);
    }

    #[test]
    fn quadratic_defect_phase_fails_periodicity() {
        let (grid, cube) = setup();
        let report =
            validate_phase(&PhaseFunction::quadratic_defect(2), &grid, &cube, 1000, 5).unwrap();
        assert!(!report.periodicity_ok);
        assert!(report.periodicity_defect > 1e-3);
    }

    #[test]
    fn budget_gate() {
        let (grid, cube) = setup();
        assert!(validate_phase(&PhaseFunction::linear(2), &grid, &cube, 100, 0).is_err());
    }

    #[test]
    fn extrema_are_monotone_under_budget_doubling() {
        let (grid, cube) = setup();
        let phase = PhaseFunction::cosine_perturbation(2, 0.2);
        let small = validate_phase(&phase, &grid, &cube, 1000, 11).unwrap();
        let large = validate_phase(&phase, &grid, &cube, 2000, 11).unwrap();
        assert!(large.det_lower_bound <= small.det_lower_bound + 1e-15);
        assert!(large.separation_constant <= small.separation_constant + 1e-15);
        assert!(large.periodicity_defect >= small.periodicity_defect - 1e-15);
        assert!(large.grad_xi_comparability.max >= small.grad_xi_comparability.max - 1e-15);
        assert!(large.grad_xi_comparability.min <= small.grad_xi_comparability.min + 1e-15);
    }

    #[test]
    fn dispersive_family_with_flat_phase() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let cube = FrequencyCube::new(1, 7).unwrap();
        // phi(t, x, xi) = |xi|: x-independent, zero mixed hessian
        let phase = TimePhase::new("free-wave", 1, 1.0, |_t, _x, xi| {
            xi.iter().map(|c| c * c).sum::<f64>().sqrt()
        })
        .with_mixed_hessian(|_t, _x, _xi| vec![0.0])
        .with_frequency_profile(|_t, xi| xi.iter().map(|c| c * c).sum::<f64>().sqrt())
        .with_derivative(|_t, _x, xi, alpha, beta| {
            // only first xi-derivative is nonzero for |xi| in 1d
            if beta.iter().sum::<usize>() == 0 && alpha == [1] {
                xi[0].signum()
            } else if beta.iter().sum::<usize>() == 0 && alpha.iter().sum::<usize>() == 0 {
                xi[0].abs()
            } else {
                0.0
            }
        });
        let family = TimeSymbolFamily::new("cutoff", 1.0, |t| {
            crate::symbol::LatticeSymbol::from_freq_fn("chi", 1, 0.0, move |xi| {
                if t * freq_norm(xi) >= 1.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        })
        .with_support_constant(1.0);
        let report = validate_dispersive(
            &phase,
            &family,
            &[1.0, 2.0, 4.0],
            &grid,
            &cube,
            &DispersiveCheckConfig::default(),
        )
        .unwrap();
        for s in &report.slices {
            assert!((s.min_det - 1.0).abs() < 1e-12, "det at t={}", s.t);
            assert!(s.support_ok);
        }
    }

    #[test]
    fn dispersive_rejects_bad_times() {
        let grid = TorusGrid::new(1, 16).unwrap();
        let cube = FrequencyCube::new(1, 7).unwrap();
        let phase = TimePhase::new("id", 1, 1.0, |_t, _x, _xi| 0.0);
        let family = TimeSymbolFamily::new("one", 1.0, |_t| {
            crate::symbol::LatticeSymbol::from_freq_fn("one", 1, 0.0, |_| Complex64::new(1.0, 0.0))
        });
        let err = validate_dispersive(
            &phase,
            &family,
            &[0.0],
            &grid,
            &cube,
            &DispersiveCheckConfig::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn modulated_symbol_decay_matches_closed_form() {
        // a(t, x, xi) = exp(2 pi i x / t): sup |d_x a| * t = 2 pi
        let grid = TorusGrid::new(1, 16).unwrap();
        let cube = FrequencyCube::new(1, 7).unwrap();
        let phase = TimePhase::new("id", 1, 1.0, |_t, _x, _xi| 0.0)
            .with_mixed_hessian(|_t, _x, _xi| vec![0.0])
            .with_derivative(|_t, _x, _xi, _a, _b| 0.0);
        let family = TimeSymbolFamily::new("drifting-mode", 1.0, |t| {
            crate::symbol::LatticeSymbol::from_handle("mode", 1, 0.0, move |x, _xi| {
                Complex64::from_polar(1.0, TAU * x[0] / t)
            })
            .with_x_derivative(move |x, _xi, beta| {
                Complex64::new(0.0, TAU / t).powu(beta[0] as u32)
                    * Complex64::from_polar(1.0, TAU * x[0] / t)
            })
        });
        let report = validate_dispersive(
            &phase,
            &family,
            &[1.0, 2.0, 5.0],
            &grid,
            &cube,
            &DispersiveCheckConfig {
                ceiling: 1,
                ..Default::default()
            },
        )
        .unwrap();
        for s in &report.slices {
            let v = s.symbol_decay["0|1"];
            assert!((v - TAU).abs() < 1e-9, "t={}: {}", s.t, v);
        }
    }
}
