//! Cross-module property tests: structural invariants that should hold
//! for arbitrary inputs, not just the worked examples.

use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fso_lab::fourier::{forward_transform, inverse_transform, lp_norm};
use fso_lab::grid::bracket;
use fso_lab::operator::{evaluate_at, FsoOperator};
use fso_lab::phase::{validate_phase, PhaseFunction};
use fso_lab::symbol::{
    difference_by_formula, forward_difference, x_derivative, LatticeSymbol,
};
use fso_lab::{FrequencyCube, PeriodicFunction, SpectralSequence, TorusGrid};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Inversion round trip and Plancherel on random band-limited data.
    #[test]
    fn fourier_roundtrip_and_plancherel(seed in 0u64..1000, n in 1usize..3, log_n in 3u32..6) {
        let big_n = 2usize.pow(log_n);
        let grid = TorusGrid::new(n, big_n).unwrap();
        let cube = grid.default_cube();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = SpectralSequence::from_fn(cube, |_| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let f = inverse_transform(&s, &grid).unwrap();
        let back = forward_transform(&f).unwrap();
        let rt = s.coefficients().iter().zip(back.coefficients())
            .map(|(a, b)| (a - b).norm()).fold(0.0f64, f64::max);
        prop_assert!(rt < 1e-10);
        let spatial: f64 = grid.weight() * f.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
        prop_assert!(((spatial - s.energy()) / s.energy()).abs() < 1e-10);
    }

    /// The Lebesgue norms are monotone in p on the probability space
    /// when the sup norm is at most one.
    #[test]
    fn lp_norms_are_monotone(seed in 0u64..1000) {
        let grid = TorusGrid::new(1, 32).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = PeriodicFunction::new(
            grid,
            (0..grid.len())
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect(),
        )
        .unwrap();
        let sup = lp_norm(&raw, f64::INFINITY).unwrap().max(1e-12);
        let f = PeriodicFunction::new(
            grid,
            raw.values().iter().map(|v| v / sup).collect(),
        )
        .unwrap();
        let mut last = 0.0;
        for p in [1.0, 1.5, 2.0, 3.0, 6.0, 12.0] {
            let v = lp_norm(&f, p).unwrap();
            prop_assert!(v >= last - 1e-12, "p={p}: {v} < {last}");
            last = v;
        }
        prop_assert!(lp_norm(&f, f64::INFINITY).unwrap() >= last - 1e-12);
    }

    /// Binomial difference formula vs recursive differences on random
    /// x-band-limited tabulated symbols.
    #[test]
    fn difference_formula_equivalence(seed in 0u64..500, alpha in 0usize..4, beta in 0usize..3) {
        let grid = TorusGrid::new(1, 16).unwrap();
        let cube = FrequencyCube::new(1, 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs: Vec<(i64, Complex64)> = (-3..=3)
            .map(|m| (m, Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)))
            .collect();
        let sym = LatticeSymbol::from_handle("rand", 1, 0.0, move |x, xi| {
            coeffs.iter().map(|(m, c)| {
                Complex64::from_polar(1.0, TAU * *m as f64 * x[0])
                    * c * Complex64::new(1.0 / bracket(xi), 0.0)
            }).sum()
        })
        .tabulate(grid, cube)
        .unwrap();
        let formula = difference_by_formula(&sym, &[alpha], &[beta]).unwrap();
        let recursive = forward_difference(&x_derivative(&sym, &[beta]).unwrap(), &[alpha]).unwrap();
        for x_flat in 0..grid.len() {
            let x = grid.node(x_flat);
            for xi in -4..=(4 - alpha as i64) {
                let d = (formula.eval(&x, &[xi]) - recursive.eval(&x, &[xi])).norm();
                prop_assert!(d < 1e-12, "alpha={alpha}, beta={beta}, xi={xi}: {d}");
            }
        }
    }

    /// Forward differences annihilate frequency polynomials of lower
    /// degree exactly.
    #[test]
    fn differences_annihilate_low_degree_polynomials(degree in 0usize..3) {
        let sym = LatticeSymbol::from_freq_fn("poly", 1, degree as f64, move |xi| {
            Complex64::new((xi[0] as f64).powi(degree as i32), 0.0)
        });
        let killed = forward_difference(&sym, &[degree + 1]).unwrap();
        for xi in -6..=6i64 {
            prop_assert_eq!(killed.eval(&[0.0], &[xi]), Complex64::new(0.0, 0.0));
        }
    }
}

/// Any phase passing torus-compatibility yields operators whose outputs
/// are 1-periodic when evaluated off-grid by the defining sum.
#[test]
fn validated_phases_give_periodic_outputs() {
    let grid = TorusGrid::new(1, 16).unwrap();
    let cube = grid.default_cube();
    let phases = [
        PhaseFunction::linear(1),
        PhaseFunction::half_wave(1, 0.37),
        PhaseFunction::cosine_perturbation(1, 0.08),
    ];
    let symbol = LatticeSymbol::from_handle("mix", 1, 0.0, |x, xi| {
        Complex64::new(1.0 + 0.3 * (TAU * x[0]).sin(), 0.2 / bracket(xi))
    });
    let f = PeriodicFunction::from_fn(grid, |x| {
        Complex64::from_polar(1.0, TAU * 2.0 * x[0]) + Complex64::new(0.5, 0.0)
    })
    .with_spectrum()
    .unwrap();
    for phase in phases {
        let report = validate_phase(&phase, &grid, &cube, 1000, 5).unwrap();
        assert!(report.periodicity_ok, "{}", phase.name());
        let op = FsoOperator::new(phase, symbol.clone(), grid, cube, &report).unwrap();
        let s = f.spectrum().unwrap();
        for x in [0.05, 0.41, 0.93] {
            let here = evaluate_at(&op, s, &[x]);
            let shifted = evaluate_at(&op, s, &[x + 1.0]);
            assert!(
                (here - shifted).norm() < 1e-10,
                "{}: defect {} at x={x}",
                op.phase().name(),
                (here - shifted).norm()
            );
        }
    }
}

/// Doubling the sample budget with the same seed extends the sample
/// set, so reported lower bounds never increase and suprema never
/// decrease.
#[test]
fn phase_report_extrema_are_monotone_in_budget() {
    let grid = TorusGrid::new(2, 16).unwrap();
    let cube = FrequencyCube::new(2, 7).unwrap();
    let phase = PhaseFunction::cosine_perturbation(2, 0.3);
    for seed in [1u64, 17, 99] {
        let small = validate_phase(&phase, &grid, &cube, 1000, seed).unwrap();
        let large = validate_phase(&phase, &grid, &cube, 2000, seed).unwrap();
        assert!(large.det_lower_bound <= small.det_lower_bound + 1e-15);
        assert!(large.separation_constant <= small.separation_constant + 1e-15);
        assert!(large.homogeneity_defect >= small.homogeneity_defect - 1e-15);
        assert!(large.grad_x_comparability.max >= small.grad_x_comparability.max - 1e-15);
        assert!(large.grad_x_comparability.min <= small.grad_x_comparability.min + 1e-15);
    }
}

/// Extension then restriction preserves the empirically estimated
/// order (exactly, since lattice values reproduce).
#[test]
fn estimated_order_survives_extension_roundtrip() {
    use fso_lab::symbol::{estimate_order, extend_symbol, restrict_symbol};
    let cube = FrequencyCube::new(1, 64).unwrap();
    for m in [-1.0f64, -0.5, 0.0] {
        let sym = LatticeSymbol::from_freq_fn("pow", 1, m, move |xi| {
            Complex64::new(bracket(xi).powf(m), 0.0)
        });
        let direct = estimate_order(&sym, &cube).unwrap();
        let back = restrict_symbol(extend_symbol(&sym, &cube).unwrap().symbol(), &cube);
        let roundtrip = estimate_order(&back, &cube).unwrap();
        assert!(
            (direct - roundtrip).abs() < 0.05,
            "m={m}: {direct} vs {roundtrip}"
        );
    }
}

/// Seminorm entries are exact maxima over a fixed scan order:
/// re-evaluation reproduces them bit for bit.
#[test]
fn seminorms_reproduce_bit_for_bit() {
    use fso_lab::symbol::{seminorm, SymbolClassSpec};
    let sym = LatticeSymbol::from_freq_fn("decay", 1, -1.0, |xi| {
        Complex64::new(1.0 / bracket(xi), 0.0)
    });
    let spec = SymbolClassSpec::new(-1.0, 1.0, 0.0, 3, 0).unwrap();
    let cube = FrequencyCube::new(1, 128).unwrap();
    for alpha in 0..=3usize {
        let a = seminorm(&sym, &[alpha], &[0], &spec, &cube).unwrap();
        let b = seminorm(&sym, &[alpha], &[0], &spec, &cube).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

/// Per-probe streams derive from (master seed, probe index), so serial
/// and parallel runs produce bit-identical estimates.
#[test]
fn probe_estimates_do_not_depend_on_thread_count() {
    use fso_lab::lab::norm_lp_probe;
    let grid = TorusGrid::new(1, 16).unwrap();
    let cube = grid.default_cube();
    let sym = LatticeSymbol::from_handle("mix", 1, 0.0, |x, xi| {
        Complex64::new(1.0 + 0.4 * (TAU * x[0]).cos(), 0.2 / bracket(xi))
    });
    let op = FsoOperator::new_waived(PhaseFunction::half_wave(1, 0.6), sym, grid, cube).unwrap();
    let serial_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let parallel_pool = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    for p in [2.0, 4.0] {
        let a = serial_pool.install(|| norm_lp_probe(&op, p, 64, 17).unwrap());
        let b = parallel_pool.install(|| norm_lp_probe(&op, p, 64, 17).unwrap());
        assert_eq!(a.value.to_bits(), b.value.to_bits(), "p={p}");
    }
}

/// Serialization round trip for tabulated symbols is bit exact.
#[test]
fn columnar_symbol_roundtrip_is_exact() {
    let grid = TorusGrid::new(2, 8).unwrap();
    let cube = FrequencyCube::new(2, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let values: Vec<Complex64> = (0..grid.len() * cube.len())
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    let sym =
        LatticeSymbol::from_table("random-table", 0.0, grid, cube, values.clone()).unwrap();
    let text = fso_lab::symbol::write_symbol_table(&sym).unwrap();
    let back = fso_lab::symbol::read_symbol_table(&text).unwrap();
    for x_flat in 0..grid.len() {
        let x = grid.node(x_flat);
        for flat in 0..cube.len() {
            let xi = cube.freq(flat);
            assert_eq!(back.eval(&x, &xi), sym.eval(&x, &xi));
        }
    }
}
