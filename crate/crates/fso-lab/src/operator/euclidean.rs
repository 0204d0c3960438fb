//! One-dimensional euclidean Fourier integral operators by nested
//! quadrature; the transference oracle.
//!
//! ```text
//! T f(x) = int exp(2 pi i phi(x, xi)) a(x, xi) (F f)(xi) dxi,
//! F f(xi) = int exp(-2 pi i y xi) f(y) dy,
//! ```
//!
//! both integrals trapezoidal over finite windows. Refinement by
//! doubling both node counts is the accuracy check.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::LineGrid;

/// Quadrature windows for the two nested integrals.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureConfig {
    pub y_window: LineGrid,
    pub xi_window: LineGrid,
}

impl QuadratureConfig {
    pub fn new(y_half_width: f64, y_nodes: usize, xi_half_width: f64, xi_nodes: usize) -> Result<Self> {
        Ok(Self {
            y_window: LineGrid::new(y_half_width, y_nodes)?,
            xi_window: LineGrid::new(xi_half_width, xi_nodes)?,
        })
    }

    pub fn refined(&self) -> Self {
        Self {
            y_window: self.y_window.refined(),
            xi_window: self.xi_window.refined(),
        }
    }
}

/// Desk-scale euclidean FIO in dimension one.
#[derive(Clone)]
pub struct EuclideanFio {
    phase: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    symbol: Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>,
    quad: QuadratureConfig,
    name: String,
}

impl EuclideanFio {
    pub fn new(
        name: impl Into<String>,
        phase: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        symbol: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        quad: QuadratureConfig,
    ) -> Self {
        Self {
            phase: Arc::new(phase),
            symbol: Arc::new(symbol),
            quad,
            name: name.into(),
        }
    }

    /// Identity-phase multiplier `sigma(xi)`.
    pub fn multiplier(
        name: impl Into<String>,
        sigma: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        quad: QuadratureConfig,
    ) -> Self {
        Self::new(name, |x, xi| x * xi, move |_x, xi| sigma(xi), quad)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn quad(&self) -> QuadratureConfig {
        self.quad
    }

    pub fn phase_at(&self, x: f64, xi: f64) -> f64 {
        (self.phase)(x, xi)
    }

    pub fn symbol_at(&self, x: f64, xi: f64) -> Complex64 {
        (self.symbol)(x, xi)
    }

    /// Euclidean Fourier transform of `f` sampled on the xi window.
    pub fn fourier_transform(
        &self,
        f: &(impl Fn(f64) -> Complex64 + Sync),
        quad: &QuadratureConfig,
    ) -> Result<Vec<Complex64>> {
        let y = quad.y_window;
        let h = y.step();
        let samples: Vec<Complex64> = (0..=y.nodes)
            .map(|j| {
                let w = if j == 0 || j == y.nodes { 0.5 } else { 1.0 };
                f(y.point(j)) * w * h
            })
            .collect();
        if samples
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::Numeric {
                location: "euclidean transform samples".into(),
            });
        }
        let out: Vec<Complex64> = (0..=quad.xi_window.nodes)
            .into_par_iter()
            .map(|q| {
                let xi = quad.xi_window.point(q);
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &s) in samples.iter().enumerate() {
                    let yj = y.point(j);
                    acc += s * Complex64::from_polar(1.0, -TAU * yj * xi);
                }
                acc
            })
            .collect();
        Ok(out)
    }

    /// Apply at the given output points with the stored quadrature.
    pub fn apply(
        &self,
        f: &(impl Fn(f64) -> Complex64 + Sync),
        outputs: &[f64],
    ) -> Result<Vec<Complex64>> {
        self.apply_with(f, outputs, &self.quad)
    }

    fn apply_with(
        &self,
        f: &(impl Fn(f64) -> Complex64 + Sync),
        outputs: &[f64],
        quad: &QuadratureConfig,
    ) -> Result<Vec<Complex64>> {
        let fhat = self.fourier_transform(f, quad)?;
        let xg = quad.xi_window;
        let h = xg.step();
        let out: Result<Vec<Complex64>> = outputs
            .par_iter()
            .map(|&x| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (q, &fh) in fhat.iter().enumerate() {
                    let xi = xg.point(q);
                    let w = if q == 0 || q == xg.nodes { 0.5 } else { 1.0 };
                    let phi = (self.phase)(x, xi);
                    if !phi.is_finite() {
                        return Err(Error::Numeric {
                            location: format!("euclidean phase at x={x}, xi={xi}"),
                        });
                    }
                    acc += Complex64::from_polar(1.0, TAU * phi)
                        * (self.symbol)(x, xi)
                        * fh
                        * (w * h);
                }
                Ok(acc)
            })
            .collect();
        out
    }

    /// Apply and verify stability under refinement (both node counts
    /// doubled); drift above `1e-4` in the max norm is an accuracy
    /// error.
    pub fn apply_checked(
        &self,
        f: &(impl Fn(f64) -> Complex64 + Sync),
        outputs: &[f64],
    ) -> Result<Vec<Complex64>> {
        let coarse = self.apply_with(f, outputs, &self.quad)?;
        let fine = self.apply_with(f, outputs, &self.quad.refined())?;
        let scale = fine
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let drift = coarse
            .iter()
            .zip(fine.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max)
            / scale;
        if drift > 1e-4 {
            return Err(Error::Accuracy {
                context: format!("euclidean FIO '{}' refinement", self.name),
                defect: drift,
                threshold: 1e-4,
            });
        }
        Ok(fine)
    }
}

impl std::fmt::Debug for EuclideanFio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EuclideanFio")
            .field("name", &self.name)
            .field("quad", &self.quad)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn gaussian(x: f64) -> Complex64 {
        Complex64::new((-PI * x * x).exp(), 0.0)
    }

    fn default_quad() -> QuadratureConfig {
        QuadratureConfig::new(8.0, 1024, 8.0, 1024).unwrap()
    }

    fn outputs() -> Vec<f64> {
        (-8..=8).map(|k| k as f64 / 4.0).collect()
    }

    #[test]
    fn inversion_recovers_the_gaussian() {
        let t = EuclideanFio::new("inv", |x, xi| x * xi, |_, _| Complex64::new(1.0, 0.0), default_quad());
        let xs = outputs();
        let out = t.apply_checked(&gaussian, &xs).unwrap();
        for (x, v) in xs.iter().zip(out.iter()) {
            assert!((v - gaussian(*x)).norm() < 1e-8, "at x={x}");
        }
    }

    #[test]
    fn gaussian_multiplier_is_a_gaussian_convolution() {
        let t = EuclideanFio::multiplier(
            "heat",
            |xi| Complex64::new((-PI * xi * xi).exp(), 0.0),
            default_quad(),
        );
        let xs = outputs();
        let out = t.apply_checked(&gaussian, &xs).unwrap();
        for (x, v) in xs.iter().zip(out.iter()) {
            let expect = (1.0 / 2.0f64.sqrt()) * (-PI * x * x / 2.0).exp();
            assert!((v.re - expect).abs() < 1e-6, "at x={x}: {} vs {expect}", v.re);
            assert!(v.im.abs() < 1e-8);
        }
    }

    #[test]
    fn translation_phase_translates() {
        let v = 0.5;
        let t = EuclideanFio::new(
            "shift",
            move |x, xi| (x + v) * xi,
            |_, _| Complex64::new(1.0, 0.0),
            default_quad(),
        );
        let xs = outputs();
        let out = t.apply_checked(&gaussian, &xs).unwrap();
        for (x, o) in xs.iter().zip(out.iter()) {
            assert!((o - gaussian(x + v)).norm() < 1e-8);
        }
    }

    #[test]
    fn unstable_quadrature_is_flagged() {
        // a window far too small for the input
        let quad = QuadratureConfig::new(0.5, 64, 0.5, 64).unwrap();
        let t = EuclideanFio::new("bad", |x, xi| x * xi, |_, _| Complex64::new(1.0, 0.0), quad);
        let xs = outputs();
        let err = t.apply_checked(&gaussian, &xs);
        assert!(matches!(err, Err(Error::Accuracy { .. })));
    }
}
