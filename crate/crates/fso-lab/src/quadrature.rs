//! Desk-scale quadrature on the real line.
//!
//! Transference experiments pair periodic operators against their
//! euclidean counterparts in dimension one; every integral on `R` in
//! this crate goes through the trapezoidal rules below. For integrands
//! with Gaussian decay the trapezoidal rule is spectrally accurate, and
//! refinement by doubling is the accuracy check.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform grid `x_j = -half_width + j*h`, `j = 0..=nodes`, with
/// `h = 2*half_width/nodes`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineGrid {
    pub half_width: f64,
    /// Number of subintervals; the grid has `nodes + 1` points.
    pub nodes: usize,
}

impl LineGrid {
    pub fn new(half_width: f64, nodes: usize) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::Domain(format!(
                "quadrature half-width must be positive, got {half_width}"
            )));
        }
        if nodes < 64 {
            return Err(Error::Domain(format!(
                "quadrature needs at least 64 subintervals, got {nodes}"
            )));
        }
        Ok(Self { half_width, nodes })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.nodes as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.step()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.nodes).map(|j| self.point(j))
    }

    /// Grid with the subinterval count doubled.
    pub fn refined(&self) -> Self {
        Self {
            half_width: self.half_width,
            nodes: self.nodes * 2,
        }
    }
}

/// Trapezoidal approximation of `int_{-L}^{L} g(x) dx`.
///
/// `nodes` counts subintervals (so `nodes + 1` samples are taken) and
/// must be at least 64. Non-finite samples abort with a numeric error.
pub fn line_quadrature(
    g: impl Fn(f64) -> Complex64,
    half_width: f64,
    nodes: usize,
) -> Result<Complex64> {
    let grid = LineGrid::new(half_width, nodes)?;
    line_quadrature_on(&grid, g)
}

/// Trapezoidal rule over an explicit [`LineGrid`].
pub fn line_quadrature_on(grid: &LineGrid, g: impl Fn(f64) -> Complex64) -> Result<Complex64> {
    let h = grid.step();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..=grid.nodes {
        let x = grid.point(j);
        let v = g(x);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Numeric {
                location: format!("line quadrature sample at x = {x}"),
            });
        }
        let w = if j == 0 || j == grid.nodes { 0.5 } else { 1.0 };
        acc += v * w;
    }
    Ok(acc * h)
}

/// Trapezoidal rule for real integrands.
pub fn line_quadrature_real(
    g: impl Fn(f64) -> f64,
    half_width: f64,
    nodes: usize,
) -> Result<f64> {
    line_quadrature(|x| Complex64::new(g(x), 0.0), half_width, nodes).map(|v| v.re)
}
