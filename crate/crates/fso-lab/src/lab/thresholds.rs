//! Order thresholds for L^p boundedness.

use serde::Serialize;

use crate::error::{Error, Result};

/// The thresholds attached to a `(n, p, rho)` triple: the FIO/FSO
/// symbol-order threshold `kappa_p = -(n-1) |1/p - 1/2|` and the
/// pseudo-differential threshold `m_p = -n (1 - rho) |1/p - 1/2|`
/// (stated in the literature through the decay exponent `-m_p`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderThresholds {
    pub dimension: usize,
    pub p: f64,
    pub p_conjugate: f64,
    pub kappa_p: f64,
    pub m_p: f64,
    pub rho: f64,
}

/// Compute the thresholds; the boundedness results behind them are
/// open-range, so `p` must satisfy `1 < p < infinity`.
pub fn thresholds(dimension: usize, p: f64, rho: f64) -> Result<OrderThresholds> {
    if !(p > 1.0) || p.is_infinite() || p.is_nan() {
        return Err(Error::Domain(format!(
            "thresholds are defined for 1 < p < infinity, got {p}"
        )));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!("rho must lie in [0, 1], got {rho}")));
    }
    let gap = (1.0 / p - 0.5).abs();
    Ok(OrderThresholds {
        dimension,
        p,
        p_conjugate: p / (p - 1.0),
        kappa_p: -((dimension as f64 - 1.0) * gap),
        m_p: -(dimension as f64 * (1.0 - rho) * gap),
        rho,
    })
}
