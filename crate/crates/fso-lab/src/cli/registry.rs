//! Built-in phases, symbols and dispersive families, each shipped with
//! the analytic derivative handles the validators need and a note on
//! which boundedness hypotheses it is designed to satisfy or violate.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{bracket, bracket_f, freq_norm};
use crate::phase::{PhaseFunction, TimePhase, TimeSymbolFamily};
use crate::symbol::{ContinuumSymbol, FreqHandle, LatticeSymbol};

/// What a registry entry is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Phase,
    Symbol,
    TimePhase,
    TimeSymbol,
    Input,
}

/// One line of the registry listing.
#[derive(Debug, Clone)]
pub struct RegistryEntry {
    pub kind: EntryKind,
    pub name: &'static str,
    pub parameters: &'static str,
    /// Hypothesis sets the entry satisfies or violates.
    pub notes: &'static str,
}

/// The shipped registry.
pub fn entries() -> Vec<RegistryEntry> {
    vec![
        RegistryEntry {
            kind: EntryKind::Phase,
            name: "linear",
            parameters: "",
            notes: "x.xi; torus-compatible, unit mixed determinant, unit separation; \
                    the pseudo-differential baseline satisfying every phase hypothesis",
        },
        RegistryEntry {
            kind: EntryKind::Phase,
            name: "half-wave",
            parameters: "t (default 1)",
            notes: "x.xi + t|xi|; homogeneous, det = 1, separation = 1; the canonical \
                    family for order-threshold growth probing",
        },
        RegistryEntry {
            kind: EntryKind::Phase,
            name: "translation",
            parameters: "v1 [, v2, v3]",
            notes: "(x + v).xi; satisfies all phase hypotheses, acts by translation",
        },
        RegistryEntry {
            kind: EntryKind::Phase,
            name: "perturbation",
            parameters: "c",
            notes: "x.xi + c cos(2 pi x1)|xi|; torus-compatible for every c, but the \
                    mixed-determinant lower bound fails once |c| >= 1/(2 pi)",
        },
        RegistryEntry {
            kind: EntryKind::Phase,
            name: "quadratic-defect",
            parameters: "",
            notes: "x.xi + x1^2 xi1; smooth but NOT torus-compatible: periodicity \
                    validation must fail",
        },
        RegistryEntry {
            kind: EntryKind::Symbol,
            name: "bracket-power",
            parameters: "kappa",
            notes: "<xi>^kappa; order-kappa class member with rho = 1; at kappa above \
                    the threshold kappa_p the half-wave norms grow, at kappa_p they flatten",
        },
        RegistryEntry {
            kind: EntryKind::Symbol,
            name: "smoothed-sign",
            parameters: "",
            notes: "xi1/<xi>; a smooth order-zero multiplier of classical type",
        },
        RegistryEntry {
            kind: EntryKind::Symbol,
            name: "modulation",
            parameters: "q [, kappa]",
            notes: "exp(2 pi i q.x)<xi>^kappa; x-dependent with every x-derivative \
                    analytic, exercising the frozen-symbol bound",
        },
        RegistryEntry {
            kind: EntryKind::Symbol,
            name: "cosine-modulated",
            parameters: "c [, kappa]",
            notes: "(1 + c cos(2 pi x1))<xi>^kappa; x-dependent, finite x-spectrum, \
                    exercising the frozen-symbol bound and batched application",
        },
        RegistryEntry {
            kind: EntryKind::Symbol,
            name: "one",
            parameters: "",
            notes: "the constant symbol; identity operator under the linear phase",
        },
        RegistryEntry {
            kind: EntryKind::TimePhase,
            name: "free-wave",
            parameters: "",
            notes: "phi(t,x,xi) = |xi|; zero mixed Hessian so det(I + t d_x d_xi phi) = 1, \
                    satisfying the dispersive phase hypotheses uniformly",
        },
        RegistryEntry {
            kind: EntryKind::TimeSymbol,
            name: "dispersive-cutoff",
            parameters: "c (support), amplitude in {0 => 1, a => 1 + a cos(2 pi x1)/t}",
            notes: "chi(t|xi| >= c) carrier; satisfies the support hypothesis exactly and \
                    the t^{-|beta|} decay of x-derivatives",
        },
        RegistryEntry {
            kind: EntryKind::Input,
            name: "mode",
            parameters: "q1 [, q2, q3]",
            notes: "single exponential exp(2 pi i q.x)",
        },
        RegistryEntry {
            kind: EntryKind::Input,
            name: "random-bandlimited",
            parameters: "degree",
            notes: "random trigonometric polynomial, coefficients from the run seed",
        },
    ]
}

/// Human-readable listing, optionally filtered by substring.
pub fn listing(filter: Option<&str>) -> String {
    let mut out = String::new();
    for e in entries() {
        let kind = match e.kind {
            EntryKind::Phase => "phase",
            EntryKind::Symbol => "symbol",
            EntryKind::TimePhase => "time-phase",
            EntryKind::TimeSymbol => "time-symbol",
            EntryKind::Input => "input",
        };
        let line = format!(
            "{kind:<12} {name:<18} params: {params:<40} {notes}\n",
            name = e.name,
            params = if e.parameters.is_empty() {
                "(none)"
            } else {
                e.parameters
            },
            notes = e.notes
        );
        if let Some(f) = filter {
            let f = f.to_lowercase();
            if !line.to_lowercase().contains(&f) {
                continue;
            }
        }
        out.push_str(&line);
    }
    out
}

fn param(params: &BTreeMap<String, f64>, key: &str, default: Option<f64>) -> Result<f64> {
    match (params.get(key), default) {
        (Some(&v), _) => Ok(v),
        (None, Some(d)) => Ok(d),
        (None, None) => Err(Error::Config(format!("missing parameter '{key}'"))),
    }
}

/// Build a registry phase.
pub fn build_phase(
    name: &str,
    dimension: usize,
    params: &BTreeMap<String, f64>,
) -> Result<PhaseFunction> {
    match name {
        "linear" => Ok(PhaseFunction::linear(dimension)),
        "half-wave" => Ok(PhaseFunction::half_wave(
            dimension,
            param(params, "t", Some(1.0))?,
        )),
        "translation" => {
            let mut v = Vec::with_capacity(dimension);
            for j in 0..dimension {
                v.push(param(params, &format!("v{}", j + 1), Some(0.0))?);
            }
            Ok(PhaseFunction::translation(dimension, v))
        }
        "perturbation" => Ok(PhaseFunction::cosine_perturbation(
            dimension,
            param(params, "c", Some(0.05))?,
        )),
        "quadratic-defect" => Ok(PhaseFunction::quadratic_defect(dimension)),
        other => Err(Error::Config(format!("unknown phase '{other}'"))),
    }
}

/// Build a registry lattice symbol with its analytic derivative handles
/// and spatial-mode structure.
pub fn build_symbol(
    name: &str,
    dimension: usize,
    params: &BTreeMap<String, f64>,
) -> Result<LatticeSymbol> {
    match name {
        "one" => Ok(LatticeSymbol::from_freq_fn("one", dimension, 0.0, |_| {
            Complex64::new(1.0, 0.0)
        })),
        "bracket-power" => {
            let kappa = param(params, "kappa", None)?;
            Ok(LatticeSymbol::from_freq_fn(
                format!("bracket-power({kappa})"),
                dimension,
                kappa,
                move |xi| Complex64::new(bracket(xi).powf(kappa), 0.0),
            )
            .with_param("kappa", kappa))
        }
        "smoothed-sign" => Ok(LatticeSymbol::from_freq_fn(
            "smoothed-sign",
            dimension,
            0.0,
            move |xi| Complex64::new(xi[0] as f64 / bracket(xi), 0.0),
        )),
        "modulation" => {
            let kappa = param(params, "kappa", Some(0.0))?;
            let mut q = Vec::with_capacity(dimension);
            for j in 0..dimension {
                q.push(param(params, &format!("q{}", j + 1), if j == 0 { None } else { Some(0.0) })? as i64);
            }
            let q_eval = q.clone();
            let q_deriv = q.clone();
            let q_mode = q.clone();
            let g: FreqHandle =
                Arc::new(move |xi: &[i64]| Complex64::new(bracket(xi).powf(kappa), 0.0));
            Ok(LatticeSymbol::from_handle(
                format!("modulation(q={q:?}, kappa={kappa})"),
                dimension,
                kappa,
                move |x, xi| {
                    let phase: f64 = x
                        .iter()
                        .zip(q_eval.iter())
                        .map(|(&a, &b)| a * b as f64)
                        .sum();
                    Complex64::from_polar(1.0, TAU * phase) * bracket(xi).powf(kappa)
                },
            )
            .with_x_derivative(move |x, xi, beta| {
                let mut factor = Complex64::new(1.0, 0.0);
                for (j, &b) in beta.iter().enumerate() {
                    factor *= Complex64::new(0.0, TAU * q_deriv[j] as f64).powu(b as u32);
                }
                let phase: f64 = x
                    .iter()
                    .zip(q_deriv.iter())
                    .map(|(&a, &b)| a * b as f64)
                    .sum();
                factor * Complex64::from_polar(1.0, TAU * phase) * bracket(xi).powf(kappa)
            })
            .with_x_modes(vec![(q_mode, g)])
            .with_param("kappa", kappa))
        }
        "cosine-modulated" => {
            let c = param(params, "c", Some(0.5))?;
            let kappa = param(params, "kappa", Some(0.0))?;
            let g0: FreqHandle =
                Arc::new(move |xi: &[i64]| Complex64::new(bracket(xi).powf(kappa), 0.0));
            let gpm: FreqHandle =
                Arc::new(move |xi: &[i64]| Complex64::new(0.5 * c * bracket(xi).powf(kappa), 0.0));
            let mut plus = vec![0i64; dimension];
            plus[0] = 1;
            let mut minus = vec![0i64; dimension];
            minus[0] = -1;
            Ok(LatticeSymbol::from_handle(
                format!("cosine-modulated(c={c}, kappa={kappa})"),
                dimension,
                kappa,
                move |x, xi| {
                    Complex64::new((1.0 + c * (TAU * x[0]).cos()) * bracket(xi).powf(kappa), 0.0)
                },
            )
            .with_x_derivative(move |x, xi, beta| {
                // only x1-derivatives are nonzero; cos cycles by quarter turns
                let k: usize = beta[0];
                if beta.iter().skip(1).any(|&b| b > 0) {
                    return Complex64::new(0.0, 0.0);
                }
                let radial = bracket(xi).powf(kappa);
                if k == 0 {
                    Complex64::new((1.0 + c * (TAU * x[0]).cos()) * radial, 0.0)
                } else {
                    let angle = TAU * x[0] + k as f64 * std::f64::consts::FRAC_PI_2;
                    Complex64::new(c * TAU.powi(k as i32) * angle.cos() * radial, 0.0)
                }
            })
            .with_x_modes(vec![
                (vec![0; dimension], g0),
                (plus, gpm.clone()),
                (minus, gpm),
            ])
            .with_param("c", c)
            .with_param("kappa", kappa))
        }
        other => Err(Error::Config(format!("unknown symbol '{other}'"))),
    }
}

/// Continuum counterpart of a registry symbol, for the euclidean side
/// of transference experiments.
pub fn build_continuum_symbol(
    name: &str,
    dimension: usize,
    params: &BTreeMap<String, f64>,
) -> Result<ContinuumSymbol> {
    match name {
        "one" => Ok(ContinuumSymbol::from_freq_fn("one", dimension, 0.0, |_| {
            Complex64::new(1.0, 0.0)
        })),
        "bracket-power" => {
            let kappa = param(params, "kappa", None)?;
            Ok(ContinuumSymbol::from_freq_fn(
                format!("bracket-power({kappa})"),
                dimension,
                kappa,
                move |xi| Complex64::new(bracket_f(xi).powf(kappa), 0.0),
            ))
        }
        "smoothed-sign" => Ok(ContinuumSymbol::from_freq_fn(
            "smoothed-sign",
            dimension,
            0.0,
            move |xi| Complex64::new(xi[0] / bracket_f(xi), 0.0),
        )),
        other => Err(Error::Config(format!(
            "symbol '{other}' has no continuum form in the registry"
        ))),
    }
}

/// Build a registry time-dependent phase family.
pub fn build_time_phase(name: &str, dimension: usize) -> Result<TimePhase> {
    match name {
        "free-wave" => Ok(TimePhase::new("free-wave", dimension, f64::MIN_POSITIVE, |_t, _x, xi| {
            xi.iter().map(|c| c * c).sum::<f64>().sqrt()
        })
        .with_mixed_hessian(move |_t, x, _xi| vec![0.0; x.len() * x.len()])
        .with_frequency_profile(|_t, xi| xi.iter().map(|c| c * c).sum::<f64>().sqrt())
        .with_derivative(move |_t, _x, xi, alpha, beta| {
            // d_xi |xi| in closed form for |alpha| = 1; x-derivatives vanish
            if beta.iter().any(|&b| b > 0) {
                return 0.0;
            }
            let r = xi.iter().map(|c| c * c).sum::<f64>().sqrt();
            let total: usize = alpha.iter().sum();
            match total {
                0 => r,
                1 => {
                    let j = alpha.iter().position(|&a| a == 1).unwrap();
                    if r > 0.0 {
                        xi[j] / r
                    } else {
                        0.0
                    }
                }
                2 => {
                    // d_i d_j |xi| = (delta_ij - xi_i xi_j / r^2) / r
                    if r == 0.0 {
                        return 0.0;
                    }
                    let mut idx = Vec::new();
                    for (j, &a) in alpha.iter().enumerate() {
                        for _ in 0..a {
                            idx.push(j);
                        }
                    }
                    let (i, j) = (idx[0], idx[1]);
                    let kron = if i == j { 1.0 } else { 0.0 };
                    (kron - xi[i] * xi[j] / (r * r)) / r
                }
                _ => f64::NAN, // beyond the shipped ceiling
            }
        })),
        other => Err(Error::Config(format!("unknown time phase '{other}'"))),
    }
}

/// Build a registry dispersive symbol family: `chi(t|xi| >= c)` times an
/// amplitude, either one or `1 + a cos(2 pi x1)/t`.
pub fn build_time_symbol(
    name: &str,
    dimension: usize,
    params: &BTreeMap<String, f64>,
) -> Result<TimeSymbolFamily> {
    match name {
        "dispersive-cutoff" => {
            let c = param(params, "c", Some(1.0))?;
            let amplitude = param(params, "amplitude", Some(0.0))?;
            let family = TimeSymbolFamily::new(
                format!("dispersive-cutoff(c={c}, amplitude={amplitude})"),
                f64::MIN_POSITIVE,
                move |t| {
                    let chi = move |xi: &[i64]| {
                        if t * freq_norm(xi) >= c {
                            1.0
                        } else {
                            0.0
                        }
                    };
                    if amplitude == 0.0 {
                        LatticeSymbol::from_freq_fn("chi", dimension, 0.0, move |xi| {
                            Complex64::new(chi(xi), 0.0)
                        })
                    } else {
                        LatticeSymbol::from_handle("cos-over-t-chi", dimension, 0.0, move |x, xi| {
                            Complex64::new(
                                (1.0 + amplitude * (TAU * x[0]).cos() / t) * chi(xi),
                                0.0,
                            )
                        })
                        .with_x_derivative(move |x, xi, beta| {
                            let k: usize = beta[0];
                            if beta.iter().skip(1).any(|&b| b > 0) {
                                return Complex64::new(0.0, 0.0);
                            }
                            if k == 0 {
                                return Complex64::new(
                                    (1.0 + amplitude * (TAU * x[0]).cos() / t) * chi(xi),
                                    0.0,
                                );
                            }
                            let angle = TAU * x[0] + k as f64 * std::f64::consts::FRAC_PI_2;
                            Complex64::new(
                                amplitude * TAU.powi(k as i32) * angle.cos() / t * chi(xi),
                                0.0,
                            )
                        })
                    }
                },
            )
            .with_support_constant(c);
            Ok(family)
        }
        other => Err(Error::Config(format!("unknown time symbol '{other}'"))),
    }
}

/// Build an input function on a grid.
pub fn build_input(
    name: &str,
    grid: crate::grid::TorusGrid,
    params: &BTreeMap<String, f64>,
    seed: u64,
) -> Result<crate::fourier::PeriodicFunction> {
    use rand::{Rng, SeedableRng};
    match name {
        "mode" => {
            let mut q = Vec::with_capacity(grid.dimension());
            for j in 0..grid.dimension() {
                q.push(param(params, &format!("q{}", j + 1), Some(if j == 0 { 1.0 } else { 0.0 }))? as i64);
            }
            Ok(crate::fourier::PeriodicFunction::from_fn(grid, move |x| {
                let phase: f64 = x.iter().zip(q.iter()).map(|(&a, &b)| a * b as f64).sum();
                Complex64::from_polar(1.0, TAU * phase)
            }))
        }
        "random-bandlimited" => {
            let degree = param(params, "degree", Some(3.0))? as i64;
            if degree < 0 || 2 * degree + 1 > grid.points_per_axis() as i64 {
                return Err(Error::Config(format!(
                    "random-bandlimited degree {degree} does not fit the grid"
                )));
            }
            let cube = crate::grid::FrequencyCube::new(grid.dimension(), degree)?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let coeffs: Vec<Complex64> = (0..cube.len())
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let s = crate::fourier::SpectralSequence::new(cube, coeffs)?;
            crate::fourier::inverse_transform(&s, &grid)
        }
        other => Err(Error::Config(format!("unknown input '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_contains_required_inventory() {
        let all = listing(None);
        let phases = entries()
            .iter()
            .filter(|e| e.kind == EntryKind::Phase)
            .count();
        let symbols = entries()
            .iter()
            .filter(|e| e.kind == EntryKind::Symbol)
            .count();
        assert!(phases >= 4, "only {phases} phases");
        assert!(symbols >= 5, "only {symbols} symbols");
        assert!(all.contains("half-wave"));
        assert!(all.contains("dispersive-cutoff"));
    }

    #[test]
    fn filter_narrows_the_listing() {
        let filtered = listing(Some("dispersive"));
        assert!(filtered.contains("dispersive-cutoff"));
        assert!(!filtered.contains("half-wave"));
        let empty = listing(Some("no-such-entry-anywhere"));
        assert!(empty.is_empty());
    }

    #[test]
    fn phases_build_and_validate() {
        let grid = crate::grid::TorusGrid::new(2, 16).unwrap();
        let cube = grid.default_cube();
        for name in ["linear", "half-wave", "translation", "perturbation"] {
            let mut params = BTreeMap::new();
            if name == "perturbation" {
                params.insert("c".into(), 0.02);
            }
            let phase = build_phase(name, 2, &params).unwrap();
            let report =
                crate::phase::validate_phase(&phase, &grid, &cube, 1000, 3).unwrap();
            assert!(report.periodicity_ok, "{name} failed periodicity");
        }
        let bad = build_phase("quadratic-defect", 2, &BTreeMap::new()).unwrap();
        let report = crate::phase::validate_phase(&bad, &grid, &cube, 1000, 3).unwrap();
        assert!(!report.periodicity_ok);
    }

    #[test]
    fn perturbation_phase_violates_determinant_for_large_c() {
        let grid = crate::grid::TorusGrid::new(2, 16).unwrap();
        let cube = grid.default_cube();
        let mut params = BTreeMap::new();
        params.insert("c".into(), 0.5); // 2 pi c > 1
        let phase = build_phase("perturbation", 2, &params).unwrap();
        let report = crate::phase::validate_phase(&phase, &grid, &cube, 2000, 3).unwrap();
        assert!(report.det_lower_bound < 0.2, "det {}", report.det_lower_bound);
    }

    #[test]
    fn symbols_build_with_derivative_handles() {
        let mut params = BTreeMap::new();
        params.insert("kappa".into(), -0.5);
        params.insert("q1".into(), 1.0);
        params.insert("c".into(), 0.5);
        for name in [
            "one",
            "bracket-power",
            "smoothed-sign",
            "modulation",
            "cosine-modulated",
        ] {
            let s = build_symbol(name, 1, &params).unwrap();
            // the validators need x-derivatives everywhere
            assert!(
                crate::symbol::x_derivative(&s, &[1]).is_ok(),
                "{name} lacks x-derivative"
            );
        }
        assert!(build_symbol("nope", 1, &params).is_err());
    }

    #[test]
    fn cosine_modulated_x_modes_match_the_evaluator() {
        let mut params = BTreeMap::new();
        params.insert("c".into(), 0.5);
        params.insert("kappa".into(), 0.0);
        let s = build_symbol("cosine-modulated", 1, &params).unwrap();
        // sum of modes at x reproduces the closed form
        let modes = s.x_modes().unwrap();
        for x in [0.0, 0.3, 0.77] {
            let direct = s.eval(&[x], &[2]);
            let mut from_modes = Complex64::new(0.0, 0.0);
            for (eta, g) in modes {
                from_modes +=
                    Complex64::from_polar(1.0, TAU * eta[0] as f64 * x) * g(&[2]);
            }
            assert!((direct - from_modes).norm() < 1e-12);
        }
    }

    #[test]
    fn inputs_build() {
        let grid = crate::grid::TorusGrid::new(1, 16).unwrap();
        let mut params = BTreeMap::new();
        params.insert("q1".into(), 3.0);
        let f = build_input("mode", grid, &params, 0).unwrap();
        assert_eq!(f.values().len(), 16);
        let r = build_input("random-bandlimited", grid, &BTreeMap::new(), 7).unwrap();
        let r2 = build_input("random-bandlimited", grid, &BTreeMap::new(), 7).unwrap();
        assert_eq!(r.values(), r2.values());
    }
}
