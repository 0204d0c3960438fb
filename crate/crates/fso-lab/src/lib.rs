//! # fso-lab
//!
//! A spectral laboratory for periodic pseudo-differential operators and
//! Fourier series operators (FSOs) on the n-torus. The crate constructs
//! and applies operators of the form
//!
//! ```text
//! A f(x) = sum_{xi in Z^n} exp(2 pi i phi(x, xi)) a(x, xi) fhat(xi)
//! ```
//!
//! and measures everything quantitative around them: difference calculus
//! and symbol-class seminorms on the lattice, lattice/continuum symbol
//! extension and restriction, phase-hypothesis validation, L^p operator
//! norm estimation against the order thresholds `kappa_p` and `m_p`,
//! Gaussian-pairing limits linking euclidean and periodic operators, and
//! uniform dispersive L^2 bounds for time-parametrized families.
//!
//! ## Module map
//!
//! - [`grid`], [`fourier`], [`quadrature`] — torus grids, the toroidal
//!   Fourier transform, Lebesgue norms, line quadrature.
//! - [`symbol`] — lattice and continuum symbols, forward/backward
//!   difference operators, seminorm tables, order estimation and the
//!   cardinal extension kernel.
//! - [`phase`] — phase functions with analytic derivative handles and
//!   numerical validation of the boundedness hypotheses.
//! - [`operator`] — FFT-accelerated and direct application of periodic
//!   operators, dense assembly with adjoints, euclidean FIO quadrature.
//! - [`lab`] — operator-norm estimation, order thresholds, Gaussian
//!   limits and pairings, transference checks, truncation and dispersive
//!   sweeps.
//! - [`cli`] — config-driven experiment runner behind the `fso-lab`
//!   binary, with a registry of built-in phases and symbols.
//!
//! Start with the runnable examples in `examples/`; each one exercises
//! a single capability end to end.

pub mod cli;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod lab;
pub mod operator;
pub mod phase;
pub mod quadrature;
pub mod symbol;

pub use error::{Error, Result};
pub use fourier::{
    forward_transform, forward_transform_on, inverse_transform, lp_norm, schwartz_decay,
    PeriodicFunction, SpectralSequence,
};
pub use grid::{bracket, bracket_f, FrequencyCube, IntBox, TorusGrid};
pub use quadrature::{line_quadrature, line_quadrature_real, LineGrid};
