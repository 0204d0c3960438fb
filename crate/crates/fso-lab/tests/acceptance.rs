//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`). Criteria run serially
//! behind a shared lock so the stated runtime budgets are meaningful.

use std::f64::consts::{PI, TAU};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fso_lab::fourier::{forward_transform, inverse_transform, PeriodicFunction, SpectralSequence};
use fso_lab::grid::{bracket, FrequencyCube, TorusGrid};
use fso_lab::lab::{
    frozen_family_bound, gaussian_limit, gaussian_pairing, thresholds,
    transference_check, truncation_sweep, dispersive_sweep, GaussianPairingConfig,
    PairingOperator,
};
use fso_lab::operator::FsoOperator;
use fso_lab::phase::PhaseFunction;
use fso_lab::symbol::{
    difference_by_formula, extend_symbol, forward_difference, restrict_symbol, seminorm,
    x_derivative, LatticeSymbol, SymbolClassSpec,
};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> std::sync::MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    started: Instant,
}

impl Criterion {
    fn start(name: &'static str, budget: Duration) -> Self {
        Self {
            name,
            budget,
            started: Instant::now(),
        }
    }

    fn finish(self, pass: bool, detail: &str) {
        let elapsed = self.started.elapsed();
        let verdict = if pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {:<28} {verdict}  ({elapsed:.1?} / budget {:?})  {detail}",
            self.name, self.budget
        );
        assert!(pass, "criterion {} failed: {detail}", self.name);
        assert!(
            elapsed <= self.budget,
            "criterion {} exceeded its runtime budget: {elapsed:.1?} > {:?}",
            self.name,
            self.budget
        );
    }
}

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn criterion_01_fourier_core() {
    let _g = serial();
    let crit = Criterion::start("1 fourier-core", Duration::from_secs(5));
    let mut worst_roundtrip = 0.0f64;
    let mut worst_plancherel = 0.0f64;
    let mut case = 0u64;
    for n in [1usize, 2] {
        for big_n in [16usize, 32] {
            let grid = TorusGrid::new(n, big_n).unwrap();
            let cube = grid.default_cube();
            for _ in 0..25 {
                case += 1;
                let mut rng = ChaCha8Rng::seed_from_u64(1000 + case);
                let s = SpectralSequence::from_fn(cube, |_| {
                    c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
                });
                let f = inverse_transform(&s, &grid).unwrap();
                let back = forward_transform(&f).unwrap();
                let rt = s
                    .coefficients()
                    .iter()
                    .zip(back.coefficients())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0f64, f64::max);
                worst_roundtrip = worst_roundtrip.max(rt);
                let spatial: f64 =
                    grid.weight() * f.values().iter().map(|v| v.norm_sqr()).sum::<f64>();
                let spectral = s.energy();
                worst_plancherel =
                    worst_plancherel.max(((spatial - spectral) / spectral).abs());
            }
        }
    }
    let pass = worst_roundtrip < 1e-10 && worst_plancherel < 1e-10 && case == 100;
    crit.finish(
        pass,
        &format!("roundtrip {worst_roundtrip:.2e}, plancherel {worst_plancherel:.2e}, {case} functions"),
    );
}

#[test]
fn criterion_02_difference_formula() {
    let _g = serial();
    let crit = Criterion::start("2 difference-formula", Duration::from_secs(10));
    let grid = TorusGrid::new(1, 16).unwrap();
    let cube = FrequencyCube::new(1, 7).unwrap();
    let mut worst = 0.0f64;
    for case in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(777 + case);
        // random x-band-limited symbol tabulated on the grid
        let coeffs: Vec<(i64, Complex64, Complex64)> = (-3..=3)
            .map(|m| {
                (
                    m,
                    c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
                    c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5),
                )
            })
            .collect();
        let sym = LatticeSymbol::from_handle("rand", 1, 0.0, move |x, xi| {
            coeffs
                .iter()
                .map(|(m, a, b)| {
                    Complex64::from_polar(1.0, TAU * *m as f64 * x[0])
                        * (a + b * c64((xi[0] as f64 / 8.0).sin(), 0.0))
                })
                .sum()
        })
        .tabulate(grid, cube)
        .unwrap();
        for alpha in 0..=3usize {
            for beta in 0..=2usize {
                let formula = difference_by_formula(&sym, &[alpha], &[beta]).unwrap();
                let recursive =
                    forward_difference(&x_derivative(&sym, &[beta]).unwrap(), &[alpha]).unwrap();
                for x_flat in 0..grid.len() {
                    let x = grid.node(x_flat);
                    for xi in -4..=(4 - alpha as i64) {
                        let d = (formula.eval(&x, &[xi]) - recursive.eval(&x, &[xi])).norm();
                        worst = worst.max(d);
                    }
                }
            }
        }
    }
    crit.finish(worst < 1e-12, &format!("max discrepancy {worst:.2e}"));
}

#[test]
fn criterion_03_seminorm_stability() {
    let _g = serial();
    let crit = Criterion::start("3 seminorm-stability", Duration::from_secs(10));
    let small = FrequencyCube::new(1, 128).unwrap();
    let large = FrequencyCube::new(1, 256).unwrap();
    let mut worst_change = 0.0f64;
    let mut detail = String::new();
    for m in [-1.0f64, -0.5, 0.0] {
        let sym = LatticeSymbol::from_freq_fn(format!("bracket^{m}"), 1, m, move |xi| {
            c64(bracket(xi).powf(m), 0.0)
        });
        let spec = SymbolClassSpec::new(m, 1.0, 0.0, 3, 0).unwrap();
        for alpha in 0..=3usize {
            let c1 = seminorm(&sym, &[alpha], &[0], &spec, &small).unwrap();
            let c2 = seminorm(&sym, &[alpha], &[0], &spec, &large).unwrap();
            let change = ((c2 - c1) / c1).abs();
            worst_change = worst_change.max(change);
            if alpha == 3 {
                detail.push_str(&format!("m={m}: C3 = {c1:.4e} ({change:.2e}); "));
            }
        }
    }
    crit.finish(worst_change < 0.05, &format!("worst relative change {worst_change:.2e}; {detail}"));
}

#[test]
fn criterion_04_extension_restriction() {
    let _g = serial();
    let crit = Criterion::start("4 extension-restriction", Duration::from_secs(5));
    let cube = FrequencyCube::new(1, 16).unwrap();
    let sym = LatticeSymbol::from_freq_fn("decay", 1, -1.0, |xi| {
        c64(1.0 / bracket(xi), 0.1 * (xi[0] as f64 / 17.0).sin())
    });
    let ext = extend_symbol(&sym, &cube).unwrap();
    let back = restrict_symbol(ext.symbol(), &cube);
    let mut worst_identity = 0.0f64;
    for xi in -16..=16i64 {
        let d = (back.eval(&[0.0], &[xi]) - sym.eval(&[0.0], &[xi])).norm();
        worst_identity = worst_identity.max(d);
    }

    let one = LatticeSymbol::from_freq_fn("one", 1, 0.0, |_| c64(1.0, 0.0));
    let eone = extend_symbol(&one, &cube).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst_const = 0.0f64;
    for _ in 0..1000 {
        let xi = 32.0 * (rng.gen::<f64>() - 0.5); // inside [-16, 16]
        worst_const = worst_const.max((eone.eval(&[0.0], &[xi]) - c64(1.0, 0.0)).norm());
    }
    let pass = worst_identity < 1e-10 && worst_const < 1e-10;
    crit.finish(
        pass,
        &format!("identity defect {worst_identity:.2e}, constant defect {worst_const:.2e}"),
    );
}

#[test]
fn criterion_05_gaussian_limit() {
    let _g = serial();
    let crit = Criterion::start("5 gaussian-limit", Duration::from_secs(5));
    let grid = TorusGrid::new(1, 16).unwrap();
    let one = PeriodicFunction::from_fn(grid, |_| c64(1.0, 0.0));
    let terms = gaussian_limit(&one, &[1e-1, 1e-2, 1e-3]).unwrap();
    let worst_const = terms
        .iter()
        .map(|t| (t - c64(1.0, 0.0)).norm())
        .fold(0.0f64, f64::max);

    let mut worst_mode = 0.0f64;
    for m in [1i64, 2, 3] {
        let f = PeriodicFunction::from_fn(grid, move |x| {
            Complex64::from_polar(1.0, TAU * m as f64 * x[0])
        });
        let term = gaussian_limit(&f, &[1e-2]).unwrap()[0];
        let expect = (-PI * (m * m) as f64 / 1e-2).exp();
        worst_mode = worst_mode.max((term - c64(expect, 0.0)).norm());
    }
    let pass = worst_const < 1e-12 && worst_mode < 1e-10;
    crit.finish(
        pass,
        &format!("constant defect {worst_const:.2e}, mode defect {worst_mode:.2e}"),
    );
}

// The classical constant beta^{-n/2} quoted for this pairing limit does
// not hold under the normalization fixed here: with w_delta(x) =
// exp(-pi delta |x|^2) and a Hoelder split alpha + beta = 1, Parseval
// gives the limit constant (alpha + beta)^{-n/2} = 1 exactly, which the
// quadrature confirms to many digits. The criterion below asserts the
// quoted beta^{-n/2} anyway; its failure on the m = k cases is the
// finding, not an implementation defect (the m != k cases vanish on
// both sides and pass).
#[test]
fn criterion_06_pairing_identity() {
    let _g = serial();
    let crit = Criterion::start("6 pairing-identity", Duration::from_secs(60));
    let grid = TorusGrid::new(1, 16).unwrap();
    let cube = grid.default_cube();

    let operators: Vec<(PairingOperator, LatticeSymbol)> = vec![
        (
            PairingOperator::Identity,
            LatticeSymbol::from_freq_fn("one", 1, 0.0, |_| c64(1.0, 0.0)),
        ),
        (
            PairingOperator::Multiplier {
                name: "bracket-inverse".into(),
                sigma: std::sync::Arc::new(|xi: f64| c64(1.0 / (1.0 + xi * xi).sqrt(), 0.0)),
            },
            LatticeSymbol::from_freq_fn("bracket-inverse", 1, -1.0, |xi| {
                c64(1.0 / bracket(xi), 0.0)
            }),
        ),
    ];

    let mut pass = true;
    let mut detail = String::new();
    for (op, lattice) in &operators {
        let discrete_op =
            FsoOperator::pseudo_differential(lattice.clone(), grid, cube).unwrap();
        for (m, k) in [(2i64, 2i64), (1, 3)] {
            let cfg =
                GaussianPairingConfig::new(0.5, 0.5, vec![1e-1, 1e-2, 1e-3], m, k).unwrap();
            let out = gaussian_pairing(op, &cfg, &discrete_op).unwrap();
            let term = *out.terms.last().unwrap();
            let claimed = out.discrete_pairing * out.claimed_constant;
            let defect = (term - claimed).norm();
            let ok = defect < 1e-4;
            pass &= ok;
            detail.push_str(&format!(
                "[{} m={m} k={k}: term {:.6e}, beta^-1/2 x discrete {:.6e}, defect {:.2e}] ",
                op.name(),
                term.re,
                claimed.re,
                defect
            ));
        }
    }
    crit.finish(pass, &detail);
}

#[test]
fn criterion_07_transference_direction() {
    let _g = serial();
    let crit = Criterion::start("7 transference-direction", Duration::from_secs(120));
    let grid = TorusGrid::new(1, 32).unwrap();
    let cube = FrequencyCube::new(1, 15).unwrap();
    let symbols = [
        fso_lab::symbol::ContinuumSymbol::from_freq_fn("one", 1, 0.0, |_| c64(1.0, 0.0)),
        fso_lab::symbol::ContinuumSymbol::from_freq_fn("bracket-inverse", 1, -1.0, |xi| {
            c64(1.0 / fso_lab::grid::bracket_f(xi), 0.0)
        }),
        fso_lab::symbol::ContinuumSymbol::from_freq_fn("smoothed-sign", 1, 0.0, |xi| {
            c64(xi[0] / fso_lab::grid::bracket_f(xi), 0.0)
        }),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for sym in &symbols {
        for p in [2.0f64, 4.0] {
            let rec = transference_check(
                &PhaseFunction::linear(1),
                sym,
                p,
                &grid,
                &cube,
                256,
                2024,
            )
            .unwrap();
            let ok = rec.torus_norm_lb <= rec.euclid_norm_lb * 1.05;
            pass &= ok;
            detail.push_str(&format!(
                "[{} p={p}: torus {:.4e} vs euclid {:.4e}] ",
                sym.name(),
                rec.torus_norm_lb,
                rec.euclid_norm_lb
            ));
        }
    }
    crit.finish(pass, &detail);
}

#[test]
fn criterion_08_frozen_symbol_bound() {
    let _g = serial();
    let crit = Criterion::start("8 frozen-symbol-bound", Duration::from_secs(30));
    let grid = TorusGrid::new(1, 16).unwrap();
    let cube = grid.default_cube();
    let mut params1 = std::collections::BTreeMap::new();
    params1.insert("q1".to_string(), 1.0);
    params1.insert("kappa".to_string(), 0.0);
    let mut params2 = std::collections::BTreeMap::new();
    params2.insert("q1".to_string(), 2.0);
    params2.insert("kappa".to_string(), -1.0);
    let mut params3 = std::collections::BTreeMap::new();
    params3.insert("c".to_string(), 0.5);
    params3.insert("kappa".to_string(), 0.0);
    let examples = [
        fso_lab::cli::build_symbol("modulation", 1, &params1).unwrap(),
        fso_lab::cli::build_symbol("modulation", 1, &params2).unwrap(),
        fso_lab::cli::build_symbol("cosine-modulated", 1, &params3).unwrap(),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for sym in &examples {
        let op = FsoOperator::pseudo_differential(sym.clone(), grid, cube).unwrap();
        let rec = frozen_family_bound(&op, 2.0, 64, 5).unwrap();
        let ok = rec.measured <= rec.bound * (1.0 + 1e-9);
        pass &= ok;
        detail.push_str(&format!(
            "[{}: measured {:.4e} <= bound {:.4e}, slack {:.2}] ",
            sym.name(),
            rec.measured,
            rec.bound,
            rec.slack
        ));
    }
    crit.finish(pass, &detail);
}

#[test]
fn criterion_09_threshold_behavior() {
    let _g = serial();
    let crit = Criterion::start("9 threshold-behavior", Duration::from_secs(600));
    let phase = PhaseFunction::half_wave(2, 1.0);
    let kappa_p = thresholds(2, 4.0, 1.0).unwrap().kappa_p;
    assert!((kappa_p + 0.25).abs() < 1e-15);

    let at_zero = truncation_sweep(&phase, 0.0, 4.0, &[4, 8, 16, 32], 256, 42).unwrap();
    let at_threshold = truncation_sweep(&phase, kappa_p, 4.0, &[4, 8, 16, 32], 256, 42).unwrap();
    let e0 = at_zero.exponent.unwrap();
    let r0 = at_zero.residual.unwrap();
    let et = at_threshold.exponent.unwrap();
    let rt = at_threshold.residual.unwrap();
    let pass = e0 >= 0.10 && et <= 0.10 && r0 < 0.2 && rt < 0.2;
    crit.finish(
        pass,
        &format!(
            "kappa=0: exponent {e0:.4} (residual {r0:.4}); kappa={kappa_p}: exponent {et:.4} (residual {rt:.4})"
        ),
    );
}

#[test]
fn criterion_10_dispersive_uniformity() {
    let _g = serial();
    let crit = Criterion::start("10 dispersive-uniformity", Duration::from_secs(60));
    let grid = TorusGrid::new(1, 16).unwrap();
    let cube = grid.default_cube();
    let t_grid = [1.0, 2.0, 4.0, 8.0];
    let phase = fso_lab::cli::build_time_phase("free-wave", 1).unwrap();

    let mut params = std::collections::BTreeMap::new();
    params.insert("c".to_string(), 1.0);
    params.insert("amplitude".to_string(), 0.0);
    let unimodular = fso_lab::cli::build_time_symbol("dispersive-cutoff", 1, &params).unwrap();
    let rec = dispersive_sweep(&phase, &unimodular, &t_grid, &grid, &cube, None).unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for (t, e) in rec.sweep.abscissas.iter().zip(&rec.sweep.estimates) {
        let ok = (e.value - 1.0).abs() < 1e-10;
        pass &= ok;
        detail.push_str(&format!("[t={t}: {:.12}] ", e.value));
    }

    params.insert("amplitude".to_string(), 1.0);
    let modulated = fso_lab::cli::build_time_symbol("dispersive-cutoff", 1, &params).unwrap();
    let rec2 = dispersive_sweep(&phase, &modulated, &t_grid, &grid, &cube, None).unwrap();
    let values: Vec<f64> = rec2.sweep.estimates.iter().map(|e| e.value).collect();
    pass &= rec2.sup_norm.is_finite();
    // non-increasing from t = 2 onward
    for w in values[1..].windows(2) {
        pass &= w[1] <= w[0] + 1e-12;
    }
    detail.push_str(&format!("x-dependent norms {values:?}, sup {:.6}", rec2.sup_norm));
    crit.finish(pass, &detail);
}

#[test]
fn criterion_11_determinism() {
    let _g = serial();
    let crit = Criterion::start("11 determinism", Duration::from_secs(600));
    let base = tempfile::tempdir().unwrap();
    let config_text = r#"
subcommand = "truncation-sweep"
dimension = 2
grid = 66
cutoff = 32
p = 4.0
seed = 42

[phase]
name = "half-wave"
[phase.params]
t = 1.0

[symbol]
name = "bracket-power"
[symbol.params]
kappa = 0.0

[probe]
budget = 256

[sweep]
cutoffs = [4, 8, 16, 32]
"#;
    let config_path = base.path().join("sweep.toml");
    std::fs::write(&config_path, config_text).unwrap();
    let mut bodies = Vec::new();
    for run in 0..2 {
        let overrides = fso_lab::cli::Overrides {
            out: Some(base.path().join(format!("out{run}"))),
            quiet: true,
            ..Default::default()
        };
        let summary = fso_lab::cli::run_config_file(&config_path, &overrides).unwrap();
        bodies.push(std::fs::read(summary.directory.join("table.csv")).unwrap());
    }
    let pass = bodies[0] == bodies[1];
    crit.finish(
        pass,
        &format!("csv bodies {} bytes, identical: {pass}", bodies[0].len()),
    );
}
