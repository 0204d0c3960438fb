//! Symbol-class seminorms and empirical order estimation.
//!
//! The true supremum over `Z^n` is not computable, so every seminorm is
//! the exact maximum over a recorded truncation; stability of the value
//! under cube doubling is the membership proxy used throughout the lab.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::grid::{bracket, freq_norm, FrequencyCube, TorusGrid};

use super::{forward_difference, multi_indices, x_derivative, LatticeSymbol};

/// Parameters of a class `S^m_{rho, delta}` together with the
/// difference/derivative ceilings `N1`, `N2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolClassSpec {
    pub order: f64,
    pub rho: f64,
    pub delta: f64,
    pub max_alpha: usize,
    pub max_beta: usize,
}

impl SymbolClassSpec {
    pub fn new(order: f64, rho: f64, delta: f64, max_alpha: usize, max_beta: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) || !(0.0..=1.0).contains(&delta) {
            return Err(Error::Domain(format!(
                "rho and delta must lie in [0, 1], got rho={rho}, delta={delta}"
            )));
        }
        Ok(Self {
            order,
            rho,
            delta,
            max_alpha,
            max_beta,
        })
    }

    /// Exponent of the weight `<xi>^{-(m - rho|alpha| + delta|beta|)}`.
    pub fn weight_exponent(&self, alpha: &[usize], beta: &[usize]) -> f64 {
        let a: usize = alpha.iter().sum();
        let b: usize = beta.iter().sum();
        -(self.order - self.rho * a as f64 + self.delta * b as f64)
    }
}

/// Computed seminorm constants `C_{alpha beta}` with the class
/// parameters and the cutoff they were evaluated at.
#[derive(Debug, Clone)]
pub struct SeminormTable {
    pub spec: SymbolClassSpec,
    pub cutoff: i64,
    pub entries: BTreeMap<(Vec<usize>, Vec<usize>), f64>,
}

impl SeminormTable {
    pub fn get(&self, alpha: &[usize], beta: &[usize]) -> Option<f64> {
        self.entries.get(&(alpha.to_vec(), beta.to_vec())).copied()
    }

    /// Largest constant in the table.
    pub fn max_constant(&self) -> f64 {
        self.entries.values().cloned().fold(0.0, f64::max)
    }
}

/// Fallback x-resolution for seminorm maxima over handle symbols that
/// carry no grid of their own.
pub const DEFAULT_X_RESOLUTION: usize = 16;

fn x_grid_for(a: &LatticeSymbol) -> Result<TorusGrid> {
    if let Some(g) = a.grid_hint() {
        return Ok(g);
    }
    TorusGrid::new(a.dimension(), DEFAULT_X_RESOLUTION)
}

/// `C_{alpha beta} = max_{grid x cube} |Delta^alpha d^beta a| <xi>^{-(m - rho|a| + delta|b|)}`.
///
/// Tabulated symbols are maximized over the intersection of the cube
/// with their valid (possibly shrunk) box; an empty intersection is a
/// domain error.
pub fn seminorm(
    a: &LatticeSymbol,
    alpha: &[usize],
    beta: &[usize],
    spec: &SymbolClassSpec,
    cube: &FrequencyCube,
) -> Result<f64> {
    if alpha.iter().sum::<usize>() > spec.max_alpha {
        return Err(Error::Domain(format!(
            "|alpha| exceeds the class ceiling N1 = {}",
            spec.max_alpha
        )));
    }
    if beta.iter().sum::<usize>() > spec.max_beta {
        return Err(Error::Domain(format!(
            "|beta| exceeds the class ceiling N2 = {}",
            spec.max_beta
        )));
    }
    let diffed = forward_difference(&x_derivative(a, beta)?, alpha)?;
    let exponent = spec.weight_exponent(alpha, beta);

    // x nodes: a single node suffices for x-independent symbols
    let grid = x_grid_for(&diffed)?;
    let x_count = if diffed.x_independent().is_some() {
        1
    } else {
        grid.len()
    };

    let mut best = f64::NEG_INFINITY;
    let mut seen = false;
    for flat in 0..cube.len() {
        let xi = cube.freq(flat);
        if let Some(domain) = diffed.domain() {
            if !domain.contains(&xi) {
                continue;
            }
        }
        seen = true;
        let weight = bracket(&xi).powf(exponent);
        for x_flat in 0..x_count {
            let v = diffed.eval_on_node(&grid, x_flat, &xi).norm() * weight;
            if !v.is_finite() {
                return Err(Error::Numeric {
                    location: format!("seminorm of '{}' at xi={xi:?}", a.name()),
                });
            }
            if v > best {
                best = v;
            }
        }
    }
    if !seen {
        return Err(Error::Domain(
            "difference shrinkage left no lattice points inside the cube".into(),
        ));
    }
    Ok(best)
}

/// Full table of constants for `|alpha| <= N1`, `|beta| <= N2`.
pub fn seminorm_table(
    a: &LatticeSymbol,
    spec: &SymbolClassSpec,
    cube: &FrequencyCube,
) -> Result<SeminormTable> {
    let mut entries = BTreeMap::new();
    for alpha in multi_indices(a.dimension(), spec.max_alpha) {
        for beta in multi_indices(a.dimension(), spec.max_beta) {
            let c = seminorm(a, &alpha, &beta, spec, cube)?;
            entries.insert((alpha.clone(), beta.clone()), c);
        }
    }
    Ok(SeminormTable {
        spec: *spec,
        cutoff: cube.cutoff(),
        entries,
    })
}

/// Least-squares slope of `log sup_x |a(x, xi)|` against `log <xi>`
/// over dyadic shells `2^j <= |xi| < 2^{j+1}`, the empirical order.
pub fn estimate_order(a: &LatticeSymbol, cube: &FrequencyCube) -> Result<f64> {
    if cube.cutoff() < 32 {
        return Err(Error::Domain(format!(
            "order estimation needs cutoff >= 32, got {}",
            cube.cutoff()
        )));
    }
    let grid = x_grid_for(a)?;
    let x_count = if a.x_independent().is_some() {
        1
    } else {
        grid.len()
    };

    // shells fully contained in the cube: 2^{j+1} <= cutoff + 1
    let mut shells: Vec<(f64, f64)> = Vec::new(); // (radius of argmax as <xi>, sup)
    let mut j = 0u32;
    while 2i64.pow(j + 1) <= cube.cutoff() + 1 {
        let lo = 2f64.powi(j as i32);
        let hi = 2f64.powi(j as i32 + 1);
        let mut sup = 0.0f64;
        let mut arg_bracket = lo;
        for flat in 0..cube.len() {
            let xi = cube.freq(flat);
            let r = freq_norm(&xi);
            if r < lo || r >= hi {
                continue;
            }
            let mut v = 0.0f64;
            for x_flat in 0..x_count {
                v = v.max(a.eval_on_node(&grid, x_flat, &xi).norm());
            }
            if v > sup {
                sup = v;
                arg_bracket = bracket(&xi);
            }
        }
        if sup > 0.0 {
            shells.push((arg_bracket, sup));
        }
        j += 1;
    }
    if shells.is_empty() {
        return Err(Error::UndefinedOrder);
    }
    if shells.len() < 3 {
        return Err(Error::Domain(format!(
            "only {} nonzero dyadic shells; need at least 3 for a slope",
            shells.len()
        )));
    }
    let pts: Vec<(f64, f64)> = shells
        .iter()
        .map(|&(r, s)| (r.ln(), s.ln()))
        .collect();
    Ok(ols_slope(&pts))
}

/// Ordinary least squares slope of y against x.
pub(crate) fn ols_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mean_x: f64 = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y: f64 = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let mut num = 0.0;
    let mut den = 0.0;
    for &(x, y) in pts {
        num += (x - mean_x) * (y - mean_y);
        den += (x - mean_x) * (x - mean_x);
    }
    num / den
}
