//! Norm growth of the half-wave operator family against the cutoff,
//! probing the order threshold `kappa_p` in dimension two.
//!
//! At `p = 4` the threshold is `kappa_p = -1/4`: symbols of order zero
//! produce norms growing like `Xi^{1/4}`, while lowering the order to
//! the threshold flattens the growth.
//!
//! ```bash
//! cargo run --release -p fso-lab --example truncation_sweep
//! ```

use fso_lab::lab::{thresholds, truncation_sweep};
use fso_lab::phase::PhaseFunction;

fn main() -> fso_lab::Result<()> {
    let phase = PhaseFunction::half_wave(2, 1.0);
    let cutoffs = [4i64, 8, 16, 32];
    let p = 4.0;
    let t = thresholds(2, p, 1.0)?;
    println!("n = 2, p = {p}: kappa_p = {}", t.kappa_p);

    for kappa in [0.0, t.kappa_p] {
        let started = std::time::Instant::now();
        let sweep = truncation_sweep(&phase, kappa, p, &cutoffs, 256, 42)?;
        println!("\nkappa = {kappa}:");
        for (xi, est) in sweep.abscissas.iter().zip(&sweep.estimates) {
            println!("  Xi = {xi:>4}: norm lower bound {:.6}", est.value);
        }
        println!(
            "  fitted exponent {:.4} (residual {:.4}, reliable: {}) in {:.1?}",
            sweep.exponent.unwrap_or(f64::NAN),
            sweep.residual.unwrap_or(f64::NAN),
            sweep.reliable,
            started.elapsed()
        );
    }
    Ok(())
}
