//! The frozen-symbol route to bounding x-dependent operators.
//!
//! For `A` with symbol `a(x, xi)`, freeze the spatial argument: `A_z`
//! has the x-independent symbol `a(z, .)` and the same phase. Sobolev
//! embedding across the frozen family yields the bound
//!
//! ```text
//! B = ( sum_{|beta| <= [n/p]+1} sup_z |A_z^{(beta)}|^p )^{1/p},
//! ```
//!
//! with `A_z^{(beta)}` built from the frozen derivative symbol
//! `d_z^beta a(z, .)`; the measured norm of `A` should not exceed `B`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::operator::{assemble_matrix, FsoOperator};
use crate::symbol::{multi_indices, x_derivative, LatticeSymbol};

use super::norms::{norm_lp_probe, norm_p2_exact};

/// Frozen-family bound and the measured norm it dominates.
#[derive(Debug, Clone, Serialize)]
pub struct FrozenBoundRecord {
    pub p: f64,
    pub derivative_order: usize,
    /// `sup_z |A_z^{(beta)}|` per multi-index `beta`.
    pub beta_terms: Vec<(Vec<usize>, f64)>,
    pub bound: f64,
    pub measured: f64,
    /// `bound / measured`.
    pub slack: f64,
}

/// Compute the frozen-family bound at the given `p`; norms are exact
/// (dense SVD) at `p = 2` and probe lower bounds otherwise.
pub fn frozen_family_bound(
    op: &FsoOperator,
    p: f64,
    probes: usize,
    seed: u64,
) -> Result<FrozenBoundRecord> {
    let grid = op.grid();
    let cube = op.cube();
    let n = grid.dimension();
    let derivative_order = (n as f64 / p).floor() as usize + 1;

    let norm_of = |frozen: &FsoOperator| -> Result<f64> {
        if (p - 2.0).abs() < 1e-12 {
            Ok(norm_p2_exact(&assemble_matrix(frozen)?)?.value)
        } else {
            Ok(norm_lp_probe(frozen, p, probes, seed)?.value)
        }
    };

    let mut beta_terms = Vec::new();
    for beta in multi_indices(n, derivative_order) {
        let derived = x_derivative(op.symbol(), &beta)?;
        let mut sup = 0.0f64;
        for z_flat in 0..grid.len() {
            let frozen_symbol = freeze_at(&derived, z_flat, &grid);
            let frozen = FsoOperator::new_waived(
                op.phase().clone(),
                frozen_symbol,
                grid,
                cube,
            )?;
            sup = sup.max(norm_of(&frozen)?);
        }
        beta_terms.push((beta, sup));
    }

    let bound = beta_terms
        .iter()
        .map(|(_, s)| s.powf(p))
        .sum::<f64>()
        .powf(1.0 / p);
    let measured = norm_of(op)?;
    Ok(FrozenBoundRecord {
        p,
        derivative_order,
        beta_terms,
        bound,
        measured,
        slack: if measured > 0.0 { bound / measured } else { f64::INFINITY },
    })
}

/// The x-independent symbol `xi -> a(z, xi)` with the spatial argument
/// frozen at grid node `z_flat`.
fn freeze_at(symbol: &LatticeSymbol, z_flat: usize, grid: &crate::grid::TorusGrid) -> LatticeSymbol {
    let inner = symbol.clone();
    let grid = *grid;
    LatticeSymbol::from_freq_fn(
        format!("{}@z{}", symbol.name(), z_flat),
        symbol.dimension(),
        symbol.declared_order(),
        move |xi: &[i64]| -> Complex64 { inner.eval_on_node(&grid, z_flat, xi) },
    )
}
