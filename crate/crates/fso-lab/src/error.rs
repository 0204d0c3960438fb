//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]; variants carry enough
//! structure (axis, location, defect size) for callers to report the
//! failure without re-deriving context.

use thiserror::Error;

/// Errors produced by grid construction, transforms, symbol calculus,
/// operator application and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    /// Two objects were built over different dimensions or grids.
    #[error("dimension mismatch on axis {axis}: {left} vs {right}")]
    DimensionMismatch {
        axis: usize,
        left: usize,
        right: usize,
    },

    /// A frequency cube does not embed into the grid without aliasing.
    #[error("frequency cube with cutoff {cutoff} does not fit grid with {points_per_axis} points per axis (need 2*cutoff+1 <= N)")]
    Aliasing {
        cutoff: i64,
        points_per_axis: usize,
    },

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A tabulated symbol was asked for values outside its valid box.
    #[error("boundary error on axis {axis}: requested offset leaves the tabulated range")]
    Boundary { axis: usize },

    /// A numerical accuracy gate failed (aliasing tail, refinement drift,
    /// quadrature tail mass).
    #[error("accuracy error in {context}: defect {defect:.3e} exceeds {threshold:.1e}")]
    Accuracy {
        context: String,
        defect: f64,
        threshold: f64,
    },

    /// Non-finite value encountered during evaluation.
    #[error("numeric error at {location}: non-finite value")]
    Numeric { location: String },

    /// Problem size exceeds a desk-scale resource limit.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A symbol vanished on every dyadic shell; no order can be fitted.
    #[error("undefined order: symbol vanishes on all sampled shells")]
    UndefinedOrder,

    /// Configuration file failed validation.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: config errors exit 2, numeric and
    /// accuracy errors exit 3, resource limits exit 4.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            Error::Resource(_) => 4,
            _ => 3,
        }
    }
}
