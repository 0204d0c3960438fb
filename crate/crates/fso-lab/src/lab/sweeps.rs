//! Truncation and dispersive sweeps: norm growth against cutoff or time,
//! with a least-squares exponent fit on dyadic abscissas.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{bracket, FrequencyCube, TorusGrid};
use crate::operator::{assemble_matrix, FsoOperator};
use crate::phase::{DispersivePhaseReport, PhaseFunction, TimePhase, TimeSymbolFamily};
use crate::symbol::LatticeSymbol;

use super::norms::{norm_lp_probe, norm_p2_exact, NormEstimate};

/// Residual above which an exponent fit is flagged unreliable.
pub const FIT_RESIDUAL_GATE: f64 = 0.2;

/// Norm estimates along increasing abscissas with a fitted growth
/// exponent `value ~ abscissa^exponent`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub abscissas: Vec<f64>,
    pub estimates: Vec<NormEstimate>,
    /// Log-log least-squares slope; `None` with fewer than 3 points.
    pub exponent: Option<f64>,
    /// Root-mean-square fit residual in log2 units.
    pub residual: Option<f64>,
    pub reliable: bool,
}

impl SweepResult {
    fn from_points(abscissas: Vec<f64>, estimates: Vec<NormEstimate>) -> Self {
        let pts: Vec<(f64, f64)> = abscissas
            .iter()
            .zip(estimates.iter())
            .filter(|(_, e)| e.value > 0.0)
            .map(|(&a, e)| (a.log2(), e.value.log2()))
            .collect();
        if pts.len() < 3 {
            return Self {
                abscissas,
                estimates,
                exponent: None,
                residual: None,
                reliable: false,
            };
        }
        let slope = crate::symbol::ols_slope(&pts);
        let mean_x: f64 = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let mean_y: f64 = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        let intercept = mean_y - slope * mean_x;
        let rss: f64 = pts
            .iter()
            .map(|&(x, y)| {
                let r = y - (slope * x + intercept);
                r * r
            })
            .sum();
        let residual = (rss / pts.len() as f64).sqrt();
        Self {
            abscissas,
            estimates,
            exponent: Some(slope),
            residual: Some(residual),
            reliable: residual <= FIT_RESIDUAL_GATE,
        }
    }

    pub fn sup_value(&self) -> f64 {
        self.estimates.iter().map(|e| e.value).fold(0.0, f64::max)
    }
}

/// Norm growth of the operator family `a_kappa(xi) = <xi>^kappa` cut to
/// increasing cubes, under a fixed phase. The grid at each cutoff is
/// the smallest compatible one, `N = 2 (Xi + 1)`.
pub fn truncation_sweep(
    phase: &PhaseFunction,
    kappa: f64,
    p: f64,
    cutoffs: &[i64],
    probes: usize,
    seed: u64,
) -> Result<SweepResult> {
    if cutoffs.len() < 3 {
        return Err(Error::Domain(format!(
            "truncation sweep needs at least 3 cutoffs, got {}",
            cutoffs.len()
        )));
    }
    for w in cutoffs.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain(
                "cutoff list must be strictly increasing".into(),
            ));
        }
    }
    let dim = phase.dimension();
    let mut estimates = Vec::with_capacity(cutoffs.len());
    for &cutoff in cutoffs {
        if cutoff < 1 {
            return Err(Error::Domain(format!("cutoff must be >= 1, got {cutoff}")));
        }
        let grid = TorusGrid::new(dim, 2 * (cutoff as usize + 1))?;
        let cube = FrequencyCube::new(dim, cutoff)?;
        let symbol = LatticeSymbol::from_freq_fn(
            format!("bracket^{kappa}"),
            dim,
            kappa,
            move |xi| num_complex::Complex64::new(bracket(xi).powf(kappa), 0.0),
        );
        let op = FsoOperator::new_waived(phase.clone(), symbol, grid, cube)?;
        estimates.push(norm_lp_probe(&op, p, probes, seed)?);
    }
    Ok(SweepResult::from_points(
        cutoffs.iter().map(|&c| c as f64).collect(),
        estimates,
    ))
}

/// Whether a dispersive sweep ran behind a validation report or an
/// explicit waiver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DispersiveGate {
    Validated,
    Waived,
}

/// Exact `p = 2` norms of a dispersive family over a time grid.
#[derive(Debug, Clone, Serialize)]
pub struct DispersiveSweepRecord {
    pub sweep: SweepResult,
    pub sup_norm: f64,
    /// `sup_t |A_t| / max C_{alpha beta}` when a validation report was
    /// supplied; the uniform-bound constant, logged not asserted.
    pub bound_constant: Option<f64>,
    pub gate: DispersiveGate,
}

/// Assemble `A_t` densely at each time and take exact `p = 2` norms.
/// Callers either pass the family's validation report or waive it.
pub fn dispersive_sweep(
    phase: &TimePhase,
    symbols: &TimeSymbolFamily,
    t_grid: &[f64],
    grid: &TorusGrid,
    cube: &FrequencyCube,
    validation: Option<&DispersivePhaseReport>,
) -> Result<DispersiveSweepRecord> {
    if t_grid.is_empty() {
        return Err(Error::Domain("empty time grid".into()));
    }
    for w in t_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain("time grid must be strictly increasing".into()));
        }
    }
    let mut estimates = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let op = FsoOperator::new_waived(
            phase.operator_phase_at(t)?,
            symbols.symbol_at(t)?,
            *grid,
            *cube,
        )?;
        let dense = assemble_matrix(&op)?;
        estimates.push(norm_p2_exact(&dense)?);
    }
    let sweep = SweepResult::from_points(t_grid.to_vec(), estimates);
    let sup_norm = sweep.sup_value();
    let bound_constant = validation.map(|rep| {
        let c_max = rep.max_symbol_decay();
        if c_max > 0.0 {
            sup_norm / c_max
        } else {
            f64::INFINITY
        }
    });
    Ok(DispersiveSweepRecord {
        sweep,
        sup_norm,
        bound_constant,
        gate: if validation.is_some() {
            DispersiveGate::Validated
        } else {
            DispersiveGate::Waived
        },
    })
}
