//! Application of periodic pseudo-differential operators, Fourier
//! series operators and amplitude operators, plus dense assembly and a
//! desk-scale euclidean FIO for transference experiments.
//!
//! The defining sum
//!
//! ```text
//! A f(x) = sum_{xi in cube} exp(2 pi i phi(x, xi)) a(x, xi) fhat(xi)
//! ```
//!
//! is evaluated by one of three exact routes: a single inverse FFT when
//! the phase splits as `x . xi + psi(xi)` and the symbol is
//! x-independent, one inverse FFT per spatial mode when the symbol is a
//! finite trigonometric polynomial in x, and the direct oscillatory sum
//! otherwise. The direct route is always available as an oracle.

mod apply;
mod dense;
mod euclidean;

pub use apply::{apply_amplitude, apply_pseudo, apply_to_spectrum, evaluate_at};
pub use dense::{adjoint, assemble_matrix, DenseOperator, MAX_DENSE_NODES};
pub use euclidean::{EuclideanFio, QuadratureConfig};

use crate::error::{Error, Result};
use crate::fourier::{forward_transform_on, PeriodicFunction};
use crate::grid::{FrequencyCube, TorusGrid};
use crate::phase::{PhaseFunction, PhaseReport};
use crate::symbol::LatticeSymbol;

/// How an operator's phase earned the right to be summed over the
/// lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TorusCompatibility {
    /// `validate_phase` passed; the observed periodicity defect rides along.
    Validated { defect: f64 },
    /// The caller explicitly skipped validation.
    Waived,
}

/// A periodic Fourier series operator `A_{phi, a}` on a fixed grid/cube
/// pair.
#[derive(Debug, Clone)]
pub struct FsoOperator {
    phase: PhaseFunction,
    symbol: LatticeSymbol,
    grid: TorusGrid,
    cube: FrequencyCube,
    compat: TorusCompatibility,
}

impl FsoOperator {
    /// Build an operator from a phase that passed validation.
    pub fn new(
        phase: PhaseFunction,
        symbol: LatticeSymbol,
        grid: TorusGrid,
        cube: FrequencyCube,
        report: &PhaseReport,
    ) -> Result<Self> {
        if !report.periodicity_ok {
            return Err(Error::Domain(format!(
                "phase '{}' failed torus-compatibility (defect {:.3e}); validate or waive explicitly",
                phase.name(),
                report.periodicity_defect
            )));
        }
        Self::with_compat(
            phase,
            symbol,
            grid,
            cube,
            TorusCompatibility::Validated {
                defect: report.periodicity_defect,
            },
        )
    }

    /// Build an operator without phase validation; the waiver is
    /// recorded on the operator.
    pub fn new_waived(
        phase: PhaseFunction,
        symbol: LatticeSymbol,
        grid: TorusGrid,
        cube: FrequencyCube,
    ) -> Result<Self> {
        Self::with_compat(phase, symbol, grid, cube, TorusCompatibility::Waived)
    }

    /// Pseudo-differential operator `a(X, D)`: the linear phase is
    /// torus-compatible by construction.
    pub fn pseudo_differential(
        symbol: LatticeSymbol,
        grid: TorusGrid,
        cube: FrequencyCube,
    ) -> Result<Self> {
        Self::with_compat(
            PhaseFunction::linear(grid.dimension()),
            symbol,
            grid,
            cube,
            TorusCompatibility::Validated { defect: 0.0 },
        )
    }

    fn with_compat(
        phase: PhaseFunction,
        symbol: LatticeSymbol,
        grid: TorusGrid,
        cube: FrequencyCube,
        compat: TorusCompatibility,
    ) -> Result<Self> {
        grid.check_dimension(phase.dimension())?;
        grid.check_dimension(symbol.dimension())?;
        cube.check_fits(&grid)?;
        Ok(Self {
            phase,
            symbol,
            grid,
            cube,
            compat,
        })
    }

    pub fn phase(&self) -> &PhaseFunction {
        &self.phase
    }

    pub fn symbol(&self) -> &LatticeSymbol {
        &self.symbol
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn cube(&self) -> FrequencyCube {
        self.cube
    }

    pub fn compatibility(&self) -> TorusCompatibility {
        self.compat
    }

    /// Apply to a periodic function (forward transform on the operator
    /// cube, then the fastest exact route).
    pub fn apply(&self, f: &PeriodicFunction) -> Result<PeriodicFunction> {
        self.grid.check_dimension(f.grid().dimension())?;
        if f.grid() != self.grid {
            return Err(Error::DimensionMismatch {
                axis: 0,
                left: f.grid().points_per_axis(),
                right: self.grid.points_per_axis(),
            });
        }
        let spectrum = forward_transform_on(f, &self.cube)?;
        apply::apply_to_spectrum(self, &spectrum)
    }

    /// Apply by the direct oscillatory sum regardless of structure;
    /// the oracle for the fast routes.
    pub fn apply_direct(&self, f: &PeriodicFunction) -> Result<PeriodicFunction> {
        let spectrum = forward_transform_on(f, &self.cube)?;
        apply::apply_to_spectrum_direct(self, &spectrum)
    }
}
