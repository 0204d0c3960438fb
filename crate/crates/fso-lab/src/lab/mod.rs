//! Quantitative boundedness experiments: operator norms, order
//! thresholds, Gaussian limits and pairings, transference, frozen-symbol
//! bounds, and truncation/dispersive sweeps.
//!
//! Semantics are fixed crate-wide: `p = 2` norms of dense operators are
//! exact (largest singular value); every other norm figure is a
//! certified lower bound — the maximum of actually witnessed Rayleigh
//! ratios. No upper bounds are claimed away from `p = 2`.

mod frozen;
mod gaussian;
mod norms;
mod sweeps;
mod thresholds;
mod transference;

pub use frozen::{frozen_family_bound, FrozenBoundRecord};
pub use gaussian::{
    gaussian_limit, gaussian_limit_weighted, gaussian_pairing, discrete_pairing,
    GaussianPairingConfig, PairingOperator, PairingOutcome,
};
pub use norms::{
    norm_lp_probe, norm_p2_exact, power_iteration_sigma_max, NormEstimate, PROBE_GENERATOR_ID,
};
pub use sweeps::{dispersive_sweep, truncation_sweep, DispersiveGate, DispersiveSweepRecord, SweepResult};
pub use thresholds::{thresholds, OrderThresholds};
pub use transference::{transference_check, TransferenceRecord};

use serde::Serialize;

/// How a norm figure was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NormMethod {
    #[serde(rename = "exact-svd-p2")]
    ExactSvdP2,
    #[serde(rename = "probe-lower-bound")]
    ProbeLowerBound,
}

/// Whether the figure is exact or a certified lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NormDirection {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "lower-bound")]
    LowerBound,
}
