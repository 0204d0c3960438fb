//! Extension of lattice symbols to real frequencies and restriction back.
//!
//! The extension is tensor-product convolution of the lattice data with
//! a fixed smooth cardinal kernel `theta`:
//!
//! ```text
//! (E a)(x, xi) = sum_k a(x, k) prod_j theta(xi_j - k_j),
//! ```
//!
//! where `theta` is supported on `[-1, 1]`, infinitely smooth, satisfies
//! `theta(0) = 1`, `theta(k) = 0` at nonzero integers, and sums to one
//! over integer shifts. Cardinality makes restriction after extension
//! the identity on lattice points, and the partition of unity makes
//! constants extend to constants exactly.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::FrequencyCube;

use super::{ContinuumSymbol, LatticeSymbol};

/// The smooth cardinal blending kernel.
///
/// Built from the flat transition `T(u) = r(1-u) / (r(u) + r(1-u))`
/// with `r(u) = exp(-1/u)` for `u > 0`: `theta(t) = T(|t|)` on
/// `[-1, 1]`, zero outside. `T` is flat at both endpoints, so `theta`
/// is C-infinity on the whole line.
#[derive(Debug, Clone, Copy, Default)]
pub struct CardinalKernel;

fn bump(u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        (-1.0 / u).exp()
    }
}

impl CardinalKernel {
    pub fn eval(&self, t: f64) -> f64 {
        let s = t.abs();
        if s >= 1.0 {
            return 0.0;
        }
        let a = bump(1.0 - s);
        let b = bump(s);
        // denominator is positive on (0, 1); at s = 0 the ratio is 1
        a / (a + b)
    }

    /// Half-width of the support.
    pub fn support(&self) -> f64 {
        1.0
    }

    /// Worst-case deviation of the kernel interpolant from a linear
    /// function between lattice points, `sup_u |T(1-u) - u|`. Constants
    /// are reproduced exactly; linear data is reproduced exactly at
    /// half-integers by symmetry and within this bound elsewhere.
    pub fn linear_defect_bound(&self) -> f64 {
        let mut worst = 0.0f64;
        let samples = 4096;
        for i in 0..=samples {
            let u = i as f64 / samples as f64;
            let d = (self.eval(1.0 - u) - u).abs();
            if d > worst {
                worst = d;
            }
        }
        worst
    }
}

/// Result of [`extend_symbol`]: the continuum interpolant together with
/// the kernel that produced it.
#[derive(Debug, Clone)]
pub struct ExtendedSymbol {
    symbol: ContinuumSymbol,
    kernel: CardinalKernel,
}

impl ExtendedSymbol {
    pub fn symbol(&self) -> &ContinuumSymbol {
        &self.symbol
    }

    pub fn into_symbol(self) -> ContinuumSymbol {
        self.symbol
    }

    pub fn kernel(&self) -> CardinalKernel {
        self.kernel
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        self.symbol.eval(x, xi)
    }
}

/// Construct the continuum interpolant of `a` over the given cube.
///
/// The returned symbol evaluates everywhere on `R^n` (lattice data
/// outside the cube reads as zero); the interpolation identities are
/// exact on the recorded box `[-Xi, Xi]^n`.
pub fn extend_symbol(a: &LatticeSymbol, cube: &FrequencyCube) -> Result<ExtendedSymbol> {
    if cube.dimension() != a.dimension() {
        return Err(Error::DimensionMismatch {
            axis: cube.dimension().min(a.dimension()),
            left: cube.dimension(),
            right: a.dimension(),
        });
    }
    if cube.cutoff() < 4 {
        return Err(Error::Domain(format!(
            "extension cube too small for the kernel support: cutoff {} < 4",
            cube.cutoff()
        )));
    }
    if let Some(domain) = a.domain() {
        let inside = (0..domain.dimension())
            .all(|j| domain.lo[j] <= -cube.cutoff() && domain.hi[j] >= cube.cutoff());
        if !inside {
            return Err(Error::Domain(
                "tabulated symbol does not cover the requested extension cube".into(),
            ));
        }
    }

    let kernel = CardinalKernel;
    let data = a.clone();
    let cube = *cube;
    let dim = a.dimension();
    let name = format!("{}_extended", a.name());
    let evaluator = move |x: &[f64], xi: &[f64]| -> Complex64 {
        // neighbors k_j in {floor(xi_j), floor(xi_j) + 1} carry all the
        // kernel mass; clip to the cube (data is zero beyond it)
        let mut acc = Complex64::new(0.0, 0.0);
        let corners = 1usize << dim;
        for corner in 0..corners {
            let mut k = Vec::with_capacity(dim);
            let mut weight = 1.0f64;
            for (j, &c) in xi.iter().enumerate() {
                let base = c.floor() as i64 + ((corner >> j) & 1) as i64;
                weight *= kernel.eval(c - base as f64);
                k.push(base);
            }
            if weight == 0.0 || !cube.contains(&k) {
                continue;
            }
            acc += data.eval(x, &k) * weight;
        }
        acc
    };
    let lo = vec![-(cube.cutoff() as f64); dim];
    let hi = vec![cube.cutoff() as f64; dim];
    let symbol = ContinuumSymbol::new(name, dim, a.declared_order(), evaluator)
        .with_exact_box(lo, hi);
    Ok(ExtendedSymbol { symbol, kernel })
}

/// Pointwise restriction of a continuum symbol to integer frequencies.
pub fn restrict_symbol(a: &ContinuumSymbol, _cube: &FrequencyCube) -> LatticeSymbol {
    let inner = a.clone();
    LatticeSymbol::from_handle(
        format!("{}_restricted", a.name()),
        a.dimension(),
        a.declared_order(),
        move |x: &[f64], xi: &[i64]| {
            let xf: Vec<f64> = xi.iter().map(|&c| c as f64).collect();
            inner.eval(x, &xf)
        },
    )
}
