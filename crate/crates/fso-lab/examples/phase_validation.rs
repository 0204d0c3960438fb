//! Numerical validation of phase hypotheses: torus-compatibility,
//! homogeneity, the mixed-Hessian determinant bound, comparability
//! windows and the lattice separation condition.
//!
//! ```bash
//! cargo run -p fso-lab --example phase_validation
//! ```

use fso_lab::phase::{validate_phase, PhaseFunction};
use fso_lab::{FrequencyCube, TorusGrid};

fn main() -> fso_lab::Result<()> {
    let grid = TorusGrid::new(2, 16)?;
    let cube = FrequencyCube::new(2, 7)?;

    let phases = [
        PhaseFunction::linear(2),
        PhaseFunction::half_wave(2, 1.0),
        PhaseFunction::cosine_perturbation(2, 0.05),
        PhaseFunction::cosine_perturbation(2, 0.5), // breaks the det bound
        PhaseFunction::quadratic_defect(2),         // breaks periodicity
    ];
    for phase in &phases {
        let report = validate_phase(phase, &grid, &cube, 2000, 7)?;
        println!(
            "{:<18} periodic: {:<5} (defect {:.1e})  homog: {:.1e}  det >= {:.3}  sep >= {:.3}  <grad_xi phi> in [{:.2}, {:.2}]",
            report.phase_name,
            report.periodicity_ok,
            report.periodicity_defect,
            report.homogeneity_defect,
            report.det_lower_bound,
            report.separation_constant,
            report.grad_xi_comparability.min,
            report.grad_xi_comparability.max,
        );
    }

    // the full report serializes to flat key=value lines
    let half_wave = validate_phase(&PhaseFunction::half_wave(2, 1.0), &grid, &cube, 1000, 7)?;
    println!("\nhalf-wave report:\n{}", half_wave.to_kv_lines());
    Ok(())
}
