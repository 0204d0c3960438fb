//! Phase functions for periodic Fourier integral operators and their
//! numerical validation.
//!
//! A [`PhaseFunction`] is a real-valued `phi(x, xi)` on `T^n x R^n`,
//! usually positively homogeneous of degree one in `xi` and
//! torus-compatible: `x -> exp(2 pi i phi(x, xi))` must be 1-periodic
//! for lattice `xi`, which is what [`validate::validate_phase`] checks
//! along with the determinant, comparability and separation hypotheses.
//!
//! Time-parametrized families for the dispersive estimates live in
//! [`TimePhase`] and [`TimeSymbolFamily`]; the operator at time `t`
//! carries the total phase `x . xi + t phi(t, x, xi)`.

mod report;
mod validate;

pub use report::{DispersiveReportSlice, DispersivePhaseReport, PhaseReport, Window};
pub use validate::{validate_dispersive, validate_phase, DispersiveCheckConfig};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fourier::fft_all_axes;
use crate::grid::{bracket_f, TorusGrid};

use num_complex::Complex64;
use std::f64::consts::TAU;

pub type PhaseEval = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
pub type GradientEval = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
/// Row-major `n x n` matrix of mixed second derivatives, entry
/// `(i, j) = d_{x_i} d_{xi_j} phi`.
pub type MatrixEval = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;
pub type FreqProfile = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Relative step for central differences in `xi`; the absolute step is
/// `XI_STEP_RELATIVE * <xi>`, matching the degree-one homogeneity of
/// the phases under study.
pub const XI_STEP_RELATIVE: f64 = 1e-4;

/// Real-valued phase `phi(x, xi)` with optional analytic derivative
/// handles and structural metadata.
#[derive(Clone)]
pub struct PhaseFunction {
    eval: PhaseEval,
    grad_x: Option<GradientEval>,
    grad_xi: Option<GradientEval>,
    mixed_hessian: Option<MatrixEval>,
    homogeneous_degree_1: bool,
    dimension: usize,
    name: String,
    /// Present when `phi(x, xi) = x . xi + psi(xi)` exactly; the
    /// operator engine then applies the FSO as a Fourier multiplier.
    frequency_profile: Option<FreqProfile>,
}

impl std::fmt::Debug for PhaseFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PhaseFunction")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("homogeneous_degree_1", &self.homogeneous_degree_1)
            .field("has_frequency_profile", &self.frequency_profile.is_some())
            .finish()
    }
}

impl PhaseFunction {
    pub fn new(
        name: impl Into<String>,
        dimension: usize,
        eval: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            grad_x: None,
            grad_xi: None,
            mixed_hessian: None,
            homogeneous_degree_1: false,
            dimension,
            name: name.into(),
            frequency_profile: None,
        }
    }

    pub fn with_grad_x(
        mut self,
        g: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.grad_x = Some(Arc::new(g));
        self
    }

    pub fn with_grad_xi(
        mut self,
        g: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.grad_xi = Some(Arc::new(g));
        self
    }

    pub fn with_mixed_hessian(
        mut self,
        g: impl Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.mixed_hessian = Some(Arc::new(g));
        self
    }

    pub fn homogeneous(mut self) -> Self {
        self.homogeneous_degree_1 = true;
        self
    }

    /// Declare `phi(x, xi) = x . xi + psi(xi)` with the given `psi`.
    pub fn with_frequency_profile(
        mut self,
        psi: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.frequency_profile = Some(Arc::new(psi));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_homogeneous_degree_1(&self) -> bool {
        self.homogeneous_degree_1
    }

    pub fn frequency_profile(&self) -> Option<&FreqProfile> {
        self.frequency_profile.as_ref()
    }

    pub fn has_analytic_gradients(&self) -> bool {
        self.grad_x.is_some() && self.grad_xi.is_some()
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> f64 {
        (self.eval)(x, xi)
    }

    pub fn eval_lattice(&self, x: &[f64], xi: &[i64]) -> f64 {
        let xf: Vec<f64> = xi.iter().map(|&c| c as f64).collect();
        (self.eval)(x, &xf)
    }

    /// `grad_x phi`, analytic when available, otherwise recovered from
    /// the spectral x-derivative of `exp(2 pi i phi)` on a fallback grid
    /// (valid for torus-compatible phases at lattice `xi`).
    pub fn grad_x(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        if let Some(g) = &self.grad_x {
            return Ok(finite_checked(g(x, xi), "grad_x", x, xi)?);
        }
        self.spectral_grad_x(x, xi)
    }

    /// `grad_xi phi`, analytic when available, otherwise central
    /// differences with step `1e-4 <xi>`.
    pub fn grad_xi(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        if let Some(g) = &self.grad_xi {
            return Ok(finite_checked(g(x, xi), "grad_xi", x, xi)?);
        }
        let h = XI_STEP_RELATIVE * bracket_f(xi);
        let mut out = Vec::with_capacity(self.dimension);
        for j in 0..self.dimension {
            let mut plus = xi.to_vec();
            let mut minus = xi.to_vec();
            plus[j] += h;
            minus[j] -= h;
            out.push(((self.eval)(x, &plus) - (self.eval)(x, &minus)) / (2.0 * h));
        }
        finite_checked(out, "grad_xi (central differences)", x, xi)
    }

    /// Mixed second-derivative matrix `d_x d_xi phi`, row-major.
    pub fn mixed_hessian(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        if let Some(g) = &self.mixed_hessian {
            return Ok(finite_checked(g(x, xi), "mixed_hessian", x, xi)?);
        }
        // central differences in xi applied to grad_x
        let h = XI_STEP_RELATIVE * bracket_f(xi);
        let n = self.dimension;
        let mut out = vec![0.0; n * n];
        for j in 0..n {
            let mut plus = xi.to_vec();
            let mut minus = xi.to_vec();
            plus[j] += h;
            minus[j] -= h;
            let gp = self.grad_x(x, &plus)?;
            let gm = self.grad_x(x, &minus)?;
            for i in 0..n {
                out[i * n + j] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        finite_checked(out, "mixed_hessian (central differences)", x, xi)
    }

    /// Spatial gradient via the spectral derivative of the unimodular
    /// field `exp(2 pi i phi(., xi))`, evaluated at the nearest node of
    /// a 32-point fallback grid.
    fn spectral_grad_x(&self, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        let n = 32usize;
        let grid = TorusGrid::new(self.dimension, n)?;
        let nearest: Vec<usize> = x
            .iter()
            .map(|&c| ((c.rem_euclid(1.0) * n as f64).round() as usize) % n)
            .collect();
        let x_flat = grid.flat_index(&nearest);
        let node = grid.node(x_flat);
        let field: Vec<Complex64> = (0..grid.len())
            .map(|k| Complex64::from_polar(1.0, TAU * (self.eval)(&grid.node(k), xi)))
            .collect();
        let here = Complex64::from_polar(1.0, TAU * (self.eval)(&node, xi));
        let mut out = Vec::with_capacity(self.dimension);
        for axis in 0..self.dimension {
            let mut work = field.clone();
            fft_all_axes(&mut work, self.dimension, n, -1);
            for (flat, v) in work.iter_mut().enumerate() {
                // isolate this axis' bin
                let mut rem = flat;
                let mut bin = 0usize;
                for a in (0..self.dimension).rev() {
                    let b = rem % n;
                    rem /= n;
                    if a == axis {
                        bin = b;
                    }
                }
                let eta = if bin <= n / 2 - 1 {
                    bin as i64
                } else if bin == n / 2 {
                    0
                } else {
                    bin as i64 - n as i64
                };
                *v *= Complex64::new(0.0, TAU * eta as f64);
            }
            fft_all_axes(&mut work, self.dimension, n, 1);
            let deriv = work[x_flat] / grid.len() as f64;
            // d_x exp(2 pi i phi) = 2 pi i (d_x phi) exp(2 pi i phi)
            out.push((deriv / (Complex64::new(0.0, TAU) * here)).re);
        }
        finite_checked(out, "grad_x (spectral)", x, xi)
    }

    // ---- standard constructions -------------------------------------

    /// `phi(x, xi) = x . xi`, the pseudo-differential phase.
    pub fn linear(dimension: usize) -> Self {
        Self::new("linear", dimension, |x: &[f64], xi: &[f64]| dot(x, xi))
            .with_grad_x(|_x, xi| xi.to_vec())
            .with_grad_xi(|x, _xi| x.to_vec())
            .with_mixed_hessian(move |x, _xi| identity_matrix(x.len()))
            .with_frequency_profile(|_| 0.0)
            .homogeneous()
    }

    /// `phi(x, xi) = (x + v) . xi`, translation by `v`.
    pub fn translation(dimension: usize, v: Vec<f64>) -> Self {
        assert_eq!(v.len(), dimension);
        let v1 = v.clone();
        let v2 = v.clone();
        let v3 = v.clone();
        Self::new("translation", dimension, move |x: &[f64], xi: &[f64]| {
            x.iter()
                .zip(v1.iter())
                .zip(xi.iter())
                .map(|((&a, &b), &c)| (a + b) * c)
                .sum()
        })
        .with_grad_x(|_x, xi| xi.to_vec())
        .with_grad_xi(move |x, _xi| x.iter().zip(v2.iter()).map(|(&a, &b)| a + b).collect())
        .with_mixed_hessian(move |x, _xi| identity_matrix(x.len()))
        .with_frequency_profile(move |xi| dot(&v3, xi))
        .homogeneous()
    }

    /// `phi(x, xi) = x . xi + t |xi|`, the half-wave phase.
    pub fn half_wave(dimension: usize, t: f64) -> Self {
        Self::new("half-wave", dimension, move |x: &[f64], xi: &[f64]| {
            dot(x, xi) + t * norm(xi)
        })
        .with_grad_x(|_x, xi| xi.to_vec())
        .with_grad_xi(move |x, xi| {
            let r = norm(xi);
            if r == 0.0 {
                return x.to_vec();
            }
            x.iter()
                .zip(xi.iter())
                .map(|(&a, &c)| a + t * c / r)
                .collect()
        })
        .with_mixed_hessian(move |x, _xi| identity_matrix(x.len()))
        .with_frequency_profile(move |xi| t * norm(xi))
        .homogeneous()
    }

    /// `phi(x, xi) = x . xi + c cos(2 pi x_1) |xi|`, a torus-compatible
    /// perturbation; large `c` breaks the determinant hypothesis.
    pub fn cosine_perturbation(dimension: usize, c: f64) -> Self {
        Self::new("perturbation", dimension, move |x: &[f64], xi: &[f64]| {
            dot(x, xi) + c * (TAU * x[0]).cos() * norm(xi)
        })
        .with_grad_x(move |x, xi| {
            let mut g = xi.to_vec();
            g[0] += -c * TAU * (TAU * x[0]).sin() * norm(xi);
            g
        })
        .with_grad_xi(move |x, xi| {
            let r = norm(xi);
            if r == 0.0 {
                return x.to_vec();
            }
            let amp = c * (TAU * x[0]).cos();
            x.iter()
                .zip(xi.iter())
                .map(|(&a, &v)| a + amp * v / r)
                .collect()
        })
        .with_mixed_hessian(move |x, xi| {
            let n = x.len();
            let r = norm(xi);
            let mut m = identity_matrix(n);
            if r > 0.0 {
                // psi depends on x_1 alone, so only row i = 0 is perturbed
                let dpsi = -c * TAU * (TAU * x[0]).sin();
                for j in 0..n {
                    m[j] += dpsi * xi[j] / r;
                }
            }
            m
        })
        .homogeneous()
    }

    /// `phi(x, xi) = x . xi + x_1^2 xi_1`: smooth but not
    /// torus-compatible; validation must fail periodicity.
    pub fn quadratic_defect(dimension: usize) -> Self {
        Self::new("quadratic-defect", dimension, |x: &[f64], xi: &[f64]| {
            dot(x, xi) + x[0] * x[0] * xi[0]
        })
        .with_grad_x(|x, xi| {
            let mut g = xi.to_vec();
            g[0] += 2.0 * x[0] * xi[0];
            g
        })
        .with_grad_xi(|x, _xi| {
            let mut g = x.to_vec();
            g[0] += x[0] * x[0];
            g
        })
        .with_mixed_hessian(|x, _xi| {
            let n = x.len();
            let mut m = identity_matrix(n);
            m[0] += 2.0 * x[0];
            m
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(&p, &q)| p * q).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn identity_matrix(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn finite_checked(v: Vec<f64>, what: &str, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
    if v.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numeric {
            location: format!("{what} at x={x:?}, xi={xi:?}"),
        });
    }
    Ok(v)
}

/// Determinant for the n <= 3 matrices used by the validators.
pub(crate) fn small_det(m: &[f64], n: usize) -> f64 {
    match n {
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        3 => {
            m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => unreachable!("dimension capped at 3"),
    }
}

pub type TimePhaseEval = Arc<dyn Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync>;
pub type TimeMatrixEval = Arc<dyn Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync>;
pub type TimeFreqProfile = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;
pub type TimeDerivativeEval =
    Arc<dyn Fn(f64, &[f64], &[f64], &[usize], &[usize]) -> f64 + Send + Sync>;

/// Time-parametrized phase `phi(t, x, xi)` for dispersive families.
/// The operator at time `t` carries the total phase
/// `x . xi + t phi(t, x, xi)`.
#[derive(Clone)]
pub struct TimePhase {
    eval: TimePhaseEval,
    /// Mixed Hessian of the bare `phi(t, ., .)`.
    mixed_hessian: Option<TimeMatrixEval>,
    /// Bare phase as a frequency profile, when x-independent.
    frequency_profile: Option<TimeFreqProfile>,
    /// Analytic `d_x^beta d_xi^alpha phi(t, x, xi)` for the decay table.
    derivative: Option<TimeDerivativeEval>,
    t_floor: f64,
    dimension: usize,
    name: String,
}

impl TimePhase {
    pub fn new(
        name: impl Into<String>,
        dimension: usize,
        t_floor: f64,
        eval: impl Fn(f64, &[f64], &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            mixed_hessian: None,
            frequency_profile: None,
            derivative: None,
            t_floor,
            dimension,
            name: name.into(),
        }
    }

    pub fn with_mixed_hessian(
        mut self,
        g: impl Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.mixed_hessian = Some(Arc::new(g));
        self
    }

    pub fn with_frequency_profile(
        mut self,
        g: impl Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.frequency_profile = Some(Arc::new(g));
        self
    }

    pub fn with_derivative(
        mut self,
        g: impl Fn(f64, &[f64], &[f64], &[usize], &[usize]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.derivative = Some(Arc::new(g));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn t_floor(&self) -> f64 {
        self.t_floor
    }

    pub fn eval(&self, t: f64, x: &[f64], xi: &[f64]) -> f64 {
        (self.eval)(t, x, xi)
    }

    /// Mixed Hessian of the bare phase; finite differences in both
    /// variables when no handle is present.
    pub fn bare_mixed_hessian(&self, t: f64, x: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
        if let Some(h) = &self.mixed_hessian {
            return finite_checked(h(t, x, xi), "time-phase mixed hessian", x, xi);
        }
        let n = self.dimension;
        let hxi = XI_STEP_RELATIVE * bracket_f(xi);
        let hx = 1e-5;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for (sx, w1) in [(hx, 1.0), (-hx, -1.0)] {
                    for (sxi, w2) in [(hxi, 1.0), (-hxi, -1.0)] {
                        let mut xs = x.to_vec();
                        xs[i] += sx;
                        let mut xis = xi.to_vec();
                        xis[j] += sxi;
                        acc += w1 * w2 * (self.eval)(t, &xs, &xis);
                    }
                }
                out[i * n + j] = acc / (4.0 * hx * hxi);
            }
        }
        finite_checked(out, "time-phase mixed hessian (fd)", x, xi)
    }

    /// `d_x^beta d_xi^alpha phi(t, x, xi)`: analytic handle or nested
    /// central differences.
    pub fn derivative(
        &self,
        t: f64,
        x: &[f64],
        xi: &[f64],
        alpha: &[usize],
        beta: &[usize],
    ) -> Result<f64> {
        if let Some(d) = &self.derivative {
            let v = d(t, x, xi, alpha, beta);
            if !v.is_finite() {
                return Err(Error::Numeric {
                    location: format!("time-phase derivative at x={x:?}, xi={xi:?}"),
                });
            }
            return Ok(v);
        }
        // peel one xi-derivative, then one x-derivative, recursively
        if let Some(j) = alpha.iter().position(|&a| a > 0) {
            let mut lower = alpha.to_vec();
            lower[j] -= 1;
            let h = XI_STEP_RELATIVE * bracket_f(xi);
            let mut plus = xi.to_vec();
            let mut minus = xi.to_vec();
            plus[j] += h;
            minus[j] -= h;
            let vp = self.derivative(t, x, &plus, &lower, beta)?;
            let vm = self.derivative(t, x, &minus, &lower, beta)?;
            return Ok((vp - vm) / (2.0 * h));
        }
        if let Some(j) = beta.iter().position(|&b| b > 0) {
            let mut lower = beta.to_vec();
            lower[j] -= 1;
            let h = 1e-5;
            let mut plus = x.to_vec();
            let mut minus = x.to_vec();
            plus[j] += h;
            minus[j] -= h;
            let vp = self.derivative(t, &plus, xi, alpha, &lower)?;
            let vm = self.derivative(t, &minus, xi, alpha, &lower)?;
            return Ok((vp - vm) / (2.0 * h));
        }
        Ok((self.eval)(t, x, xi))
    }

    /// The operator phase `x . xi + t phi(t, x, xi)` at a fixed time.
    pub fn operator_phase_at(&self, t: f64) -> Result<PhaseFunction> {
        if t < self.t_floor {
            return Err(Error::Domain(format!(
                "time {t} below the family floor t0 = {}",
                self.t_floor
            )));
        }
        let eval = self.eval.clone();
        let mut phase = PhaseFunction::new(
            format!("{}@t={t}", self.name),
            self.dimension,
            move |x: &[f64], xi: &[f64]| dot(x, xi) + t * eval(t, x, xi),
        );
        if let Some(h) = &self.mixed_hessian {
            let h = h.clone();
            let n = self.dimension;
            phase = phase.with_mixed_hessian(move |x, xi| {
                let mut m = h(t, x, xi);
                for slot in m.iter_mut() {
                    *slot *= t;
                }
                for i in 0..n {
                    m[i * n + i] += 1.0;
                }
                m
            });
        }
        if let Some(p) = &self.frequency_profile {
            let p = p.clone();
            phase = phase.with_frequency_profile(move |xi| t * p(t, xi));
        }
        Ok(phase)
    }
}

impl std::fmt::Debug for TimePhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TimePhase")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("t_floor", &self.t_floor)
            .finish()
    }
}

/// Time-parametrized symbol family `a(t, x, xi)`, materialized as a
/// [`crate::symbol::LatticeSymbol`] at each requested time.
#[derive(Clone)]
pub struct TimeSymbolFamily {
    make: Arc<dyn Fn(f64) -> crate::symbol::LatticeSymbol + Send + Sync>,
    /// Support constant `C`: the symbol vanishes where `t |xi| < C`.
    support_constant: Option<f64>,
    t_floor: f64,
    name: String,
}

impl TimeSymbolFamily {
    pub fn new(
        name: impl Into<String>,
        t_floor: f64,
        make: impl Fn(f64) -> crate::symbol::LatticeSymbol + Send + Sync + 'static,
    ) -> Self {
        Self {
            make: Arc::new(make),
            support_constant: None,
            t_floor,
            name: name.into(),
        }
    }

    pub fn with_support_constant(mut self, c: f64) -> Self {
        self.support_constant = Some(c);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn t_floor(&self) -> f64 {
        self.t_floor
    }

    pub fn support_constant(&self) -> Option<f64> {
        self.support_constant
    }

    pub fn symbol_at(&self, t: f64) -> Result<crate::symbol::LatticeSymbol> {
        if t < self.t_floor {
            return Err(Error::Domain(format!(
                "time {t} below the family floor t0 = {}",
                self.t_floor
            )));
        }
        Ok((self.make)(t))
    }
}

impl std::fmt::Debug for TimeSymbolFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TimeSymbolFamily")
            .field("name", &self.name)
            .field("t_floor", &self.t_floor)
            .field("support_constant", &self.support_constant)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_phase_handles() {
        let p = PhaseFunction::linear(2);
        let x = [0.25, 0.5];
        let xi = [3.0, -1.0];
        assert!((p.eval(&x, &xi) - (0.75 - 0.5)).abs() < 1e-15);
        assert_eq!(p.grad_x(&x, &xi).unwrap(), vec![3.0, -1.0]);
        assert_eq!(p.grad_xi(&x, &xi).unwrap(), vec![0.25, 0.5]);
        let m = p.mixed_hessian(&x, &xi).unwrap();
        assert_eq!(m, vec![1.0, 0.0, 0.0, 1.0]);
        assert!((small_det(&m, 2) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn central_differences_match_analytic() {
        let p = PhaseFunction::half_wave(2, 0.7);
        let bare = PhaseFunction::new("half-wave-raw", 2, move |x: &[f64], xi: &[f64]| {
            dot(x, xi) + 0.7 * norm(xi)
        });
        let x = [0.3, 0.8];
        for xi in [[5.0, 2.0], [1.0, -4.0], [40.0, 33.0]] {
            let analytic = p.grad_xi(&x, &xi).unwrap();
            let fd = bare.grad_xi(&x, &xi).unwrap();
            for (a, b) in analytic.iter().zip(fd.iter()) {
                assert!((a - b).abs() / a.abs().max(1.0) < 1e-6, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn spectral_grad_x_recovers_lattice_gradient() {
        // torus-compatible at lattice xi: gradient should be xi itself
        let p = PhaseFunction::new("linear-raw", 1, |x: &[f64], xi: &[f64]| dot(x, xi));
        let g = p.grad_x(&[0.25], &[3.0]).unwrap();
        assert!((g[0] - 3.0).abs() < 1e-9, "got {}", g[0]);
    }

    #[test]
    fn operator_phase_of_time_family() {
        let tp = TimePhase::new("wave", 1, 0.5, |_t, _x, xi| norm(xi))
            .with_mixed_hessian(|_t, x, _xi| vec![0.0; x.len() * x.len()])
            .with_frequency_profile(|_t, xi| norm(xi));
        let at2 = tp.operator_phase_at(2.0).unwrap();
        assert!((at2.eval(&[0.25], &[3.0]) - (0.75 + 6.0)).abs() < 1e-14);
        let m = at2.mixed_hessian(&[0.25], &[3.0]).unwrap();
        assert!((m[0] - 1.0).abs() < 1e-14);
        assert!(tp.operator_phase_at(0.1).is_err());
    }

    #[test]
    fn time_phase_fd_derivative_matches_closed_form() {
        let tp = TimePhase::new("quad", 1, 0.5, |t, x, xi| x[0] * xi[0] / t);
        // d_x d_xi phi = 1/t
        let v = tp.derivative(2.0, &[0.3], &[5.0], &[1], &[1]).unwrap();
        assert!((v - 0.5).abs() < 1e-5, "got {v}");
    }
}
