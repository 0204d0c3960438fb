//! Toroidal Fourier analysis: periodic functions on a grid, the forward
//! and inverse transforms, Lebesgue norms and Schwartz-decay constants.
//!
//! Conventions are fixed once for the whole crate: the transform pair is
//!
//! ```text
//! fhat(xi) = N^{-n} sum_k exp(-2 pi i x_k . xi) f(x_k),
//! f(x)     = sum_xi  exp(+2 pi i x . xi)  fhat(xi),
//! ```
//!
//! with unit torus measure, so both directions are exact on trigonometric
//! polynomials band-limited inside the frequency cube.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{bracket, FrequencyCube, TorusGrid};

/// Complex samples of a 1-periodic function on a [`TorusGrid`], with an
/// optional cached spectrum on a [`FrequencyCube`].
#[derive(Debug, Clone)]
pub struct PeriodicFunction {
    grid: TorusGrid,
    values: Vec<Complex64>,
    spectrum: Option<SpectralSequence>,
}

/// Fourier coefficients over a truncated frequency cube.
#[derive(Debug, Clone)]
pub struct SpectralSequence {
    cube: FrequencyCube,
    coefficients: Vec<Complex64>,
}

impl PeriodicFunction {
    pub fn new(grid: TorusGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "value count {} does not match grid with {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            spectrum: None,
        })
    }

    /// Sample a closure at every grid node.
    pub fn from_fn(grid: TorusGrid, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|k| f(&grid.node(k))).collect();
        Self {
            grid,
            values,
            spectrum: None,
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn spectrum(&self) -> Option<&SpectralSequence> {
        self.spectrum.as_ref()
    }

    /// Compute and cache the spectrum on the grid's default cube.
    pub fn with_spectrum(mut self) -> Result<Self> {
        let s = forward_transform(&self)?;
        self.spectrum = Some(s);
        Ok(self)
    }

    /// Check the cached spectrum reproduces the samples to `1e-10`
    /// relative in the max norm.
    pub fn validate_spectrum(&self) -> Result<()> {
        let Some(s) = &self.spectrum else {
            return Ok(());
        };
        let back = inverse_transform(s, &self.grid)?;
        let scale = self
            .values
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let defect = self
            .values
            .iter()
            .zip(back.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max)
            / scale;
        if defect > 1e-10 {
            return Err(Error::Accuracy {
                context: "cached spectrum consistency".into(),
                defect,
                threshold: 1e-10,
            });
        }
        Ok(())
    }
}

impl SpectralSequence {
    pub fn new(cube: FrequencyCube, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != cube.len() {
            return Err(Error::Domain(format!(
                "coefficient count {} does not match cube with {} points",
                coefficients.len(),
                cube.len()
            )));
        }
        Ok(Self { cube, coefficients })
    }

    pub fn from_fn(cube: FrequencyCube, mut f: impl FnMut(&[i64]) -> Complex64) -> Self {
        let coefficients = (0..cube.len()).map(|k| f(&cube.freq(k))).collect();
        Self { cube, coefficients }
    }

    /// All-zero sequence on the cube.
    pub fn zeros(cube: FrequencyCube) -> Self {
        Self {
            cube,
            coefficients: vec![Complex64::new(0.0, 0.0); cube.len()],
        }
    }

    pub fn cube(&self) -> FrequencyCube {
        self.cube
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex64] {
        &mut self.coefficients
    }

    /// Coefficient at a lattice point, zero outside the cube.
    pub fn coefficient(&self, xi: &[i64]) -> Complex64 {
        self.cube
            .flat_index(xi)
            .map(|k| self.coefficients[k])
            .unwrap_or_default()
    }

    /// `sum_xi |fhat(xi)|^2`, the spectral side of the Plancherel identity.
    pub fn energy(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Evaluate the trigonometric polynomial at an arbitrary point of `R^n`.
    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (flat, &c) in self.coefficients.iter().enumerate() {
            let xi = self.cube.freq(flat);
            let phase: f64 = x.iter().zip(xi.iter()).map(|(&a, &b)| a * b as f64).sum();
            acc += c * Complex64::from_polar(1.0, TAU * phase);
        }
        acc
    }
}

/// In-place unnormalized DFT along every axis of a row-major `N^n` array.
/// `sign = -1` is the forward kernel `exp(-2 pi i k j / N)`.
pub(crate) fn fft_all_axes(values: &mut [Complex64], dimension: usize, n: usize, sign: i32) {
    let mut planner = FftPlanner::new();
    let fft = if sign < 0 {
        planner.plan_fft_forward(n)
    } else {
        planner.plan_fft_inverse(n)
    };
    let total = values.len();
    debug_assert_eq!(total, n.pow(dimension as u32));
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dimension {
        // stride between consecutive entries along `axis`
        let stride = n.pow((dimension - 1 - axis) as u32);
        let lines = total / n;
        for l in 0..lines {
            // first element of line `l` along this axis
            let block = l / stride;
            let offset = l % stride;
            let base = block * stride * n + offset;
            for (i, slot) in line.iter_mut().enumerate() {
                *slot = values[base + i * stride];
            }
            fft.process(&mut line);
            for (i, slot) in line.iter().enumerate() {
                values[base + i * stride] = *slot;
            }
        }
    }
}

/// DFT bin for a signed frequency component.
fn bin_of(c: i64, n: usize) -> usize {
    c.rem_euclid(n as i64) as usize
}

/// Forward toroidal transform onto the grid's default cube:
/// `fhat(xi) = N^{-n} sum_k exp(-2 pi i x_k . xi) f(x_k)`.
pub fn forward_transform(f: &PeriodicFunction) -> Result<SpectralSequence> {
    forward_transform_on(f, &f.grid().default_cube())
}

/// Forward transform restricted to an explicit cube (which must fit the grid).
pub fn forward_transform_on(f: &PeriodicFunction, cube: &FrequencyCube) -> Result<SpectralSequence> {
    let grid = f.grid();
    cube.check_fits(&grid)?;
    let n = grid.points_per_axis();
    let mut work = f.values().to_vec();
    fft_all_axes(&mut work, grid.dimension(), n, -1);
    let scale = grid.weight();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); cube.len()];
    for (flat, slot) in coeffs.iter_mut().enumerate() {
        let xi = cube.freq(flat);
        let mut idx = 0usize;
        for &c in &xi {
            idx = idx * n + bin_of(c, n);
        }
        *slot = work[idx] * scale;
    }
    SpectralSequence::new(*cube, coeffs)
}

/// Inverse transform: `f(x_k) = sum_xi exp(2 pi i x_k . xi) fhat(xi)`.
pub fn inverse_transform(s: &SpectralSequence, grid: &TorusGrid) -> Result<PeriodicFunction> {
    s.cube().check_fits(grid)?;
    let n = grid.points_per_axis();
    let mut work = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (flat, &c) in s.coefficients().iter().enumerate() {
        let xi = s.cube().freq(flat);
        let mut idx = 0usize;
        for &comp in &xi {
            idx = idx * n + bin_of(comp, n);
        }
        work[idx] += c;
    }
    fft_all_axes(&mut work, grid.dimension(), n, 1);
    PeriodicFunction::new(*grid, work)
}

/// `L^p` norm with unit torus measure: `(N^{-n} sum |f|^p)^{1/p}`,
/// max over nodes for `p = infinity`.
pub fn lp_norm(f: &PeriodicFunction, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("lp_norm requires p >= 1, got {p}")));
    }
    Ok(lp_norm_of_samples(f.values(), f.grid().weight(), p))
}

/// Norm of raw samples under a uniform quadrature weight.
pub(crate) fn lp_norm_of_samples(values: &[Complex64], weight: f64, p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    } else {
        let sum: f64 = values.iter().map(|v| v.norm().powf(p)).sum();
        (weight * sum).powf(1.0 / p)
    }
}

/// Smallest constant `C` with `|fhat(xi)| <= C <xi>^{-M}` on the cube,
/// i.e. `max |fhat(xi)| <xi>^M`. Growth under cube refinement signals
/// that the sequence is not Schwartz-class.
pub fn schwartz_decay(s: &SpectralSequence, decay_order: f64) -> f64 {
    let mut best = 0.0f64;
    for (flat, c) in s.coefficients().iter().enumerate() {
        let xi = s.cube().freq(flat);
        let witness = c.norm() * bracket(&xi).powf(decay_order);
        if witness > best {
            best = witness;
        }
    }
    best
}
