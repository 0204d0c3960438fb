//! Uniform grids on the torus and truncated frequency lattices.
//!
//! A [`TorusGrid`] is the uniform grid `x_k = k/N` on `T^n = (R/Z)^n`
//! with `N` points per axis; its quadrature weight is `N^{-n}` at every
//! node, which integrates trigonometric polynomials of degree `< N/2`
//! exactly. A [`FrequencyCube`] is the truncation `{ xi in Z^n :
//! |xi_j| <= cutoff }` of the dual lattice. With the default cutoff
//! `N/2 - 1` the cube injects into the DFT index set without touching
//! the Nyquist bin.

use crate::error::{Error, Result};

/// Maximum spatial dimension supported by the desk-scale paths.
pub const MAX_DIMENSION: usize = 3;

/// Uniform grid `x_k = k/N`, `k in {0,..,N-1}^n`, on the n-torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    dimension: usize,
    points_per_axis: usize,
}

impl TorusGrid {
    /// Build a grid with `dimension in {1,2,3}` and even `points_per_axis >= 4`.
    pub fn new(dimension: usize, points_per_axis: usize) -> Result<Self> {
        if dimension == 0 || dimension > MAX_DIMENSION {
            return Err(Error::Domain(format!(
                "grid dimension must be in 1..={MAX_DIMENSION}, got {dimension}"
            )));
        }
        if points_per_axis < 4 || points_per_axis % 2 != 0 {
            return Err(Error::Domain(format!(
                "points per axis must be an even integer >= 4, got {points_per_axis}"
            )));
        }
        Ok(Self {
            dimension,
            points_per_axis,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Total node count `N^n`.
    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Quadrature weight `N^{-n}` shared by every node.
    pub fn weight(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// Integer coordinates of the node with the given flat (row-major) index.
    pub fn node_index(&self, flat: usize) -> Vec<usize> {
        debug_assert!(flat < self.len());
        let mut out = vec![0usize; self.dimension];
        let mut rem = flat;
        for j in (0..self.dimension).rev() {
            out[j] = rem % self.points_per_axis;
            rem /= self.points_per_axis;
        }
        out
    }

    /// Torus coordinates `k/N` of the node with the given flat index.
    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.node_index(flat)
            .into_iter()
            .map(|k| k as f64 / self.points_per_axis as f64)
            .collect()
    }

    /// Flat index of the node with the given integer coordinates.
    pub fn flat_index(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.dimension);
        let mut flat = 0usize;
        for &k in index {
            debug_assert!(k < self.points_per_axis);
            flat = flat * self.points_per_axis + k;
        }
        flat
    }

    /// Largest cutoff whose cube still fits this grid: `N/2 - 1`.
    pub fn default_cutoff(&self) -> i64 {
        self.points_per_axis as i64 / 2 - 1
    }

    /// The default frequency cube paired with this grid.
    pub fn default_cube(&self) -> FrequencyCube {
        FrequencyCube::new(self.dimension, self.default_cutoff())
            .expect("default cutoff is always valid")
    }

    /// Check that another object of dimension `other` matches, naming the axis.
    pub fn check_dimension(&self, other: usize) -> Result<()> {
        if self.dimension != other {
            return Err(Error::DimensionMismatch {
                axis: self.dimension.min(other),
                left: self.dimension,
                right: other,
            });
        }
        Ok(())
    }
}

/// Truncated frequency lattice `{ xi in Z^n : |xi_j| <= cutoff }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrequencyCube {
    dimension: usize,
    cutoff: i64,
}

impl FrequencyCube {
    pub fn new(dimension: usize, cutoff: i64) -> Result<Self> {
        if dimension == 0 || dimension > MAX_DIMENSION {
            return Err(Error::Domain(format!(
                "cube dimension must be in 1..={MAX_DIMENSION}, got {dimension}"
            )));
        }
        if cutoff < 0 {
            return Err(Error::Domain(format!(
                "cube cutoff must be nonnegative, got {cutoff}"
            )));
        }
        Ok(Self { dimension, cutoff })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn cutoff(&self) -> i64 {
        self.cutoff
    }

    /// Points per axis, `2*cutoff + 1`.
    pub fn side(&self) -> usize {
        (2 * self.cutoff + 1) as usize
    }

    /// Cardinality `(2*cutoff + 1)^n`.
    pub fn len(&self) -> usize {
        self.side().pow(self.dimension as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frequency vector of the lattice point with the given flat index.
    pub fn freq(&self, flat: usize) -> Vec<i64> {
        debug_assert!(flat < self.len());
        let side = self.side();
        let mut out = vec![0i64; self.dimension];
        let mut rem = flat;
        for j in (0..self.dimension).rev() {
            out[j] = (rem % side) as i64 - self.cutoff;
            rem /= side;
        }
        out
    }

    /// Flat index of a lattice point, or `None` if it lies outside the cube.
    pub fn flat_index(&self, xi: &[i64]) -> Option<usize> {
        debug_assert_eq!(xi.len(), self.dimension);
        let side = self.side();
        let mut flat = 0usize;
        for &c in xi {
            if c.abs() > self.cutoff {
                return None;
            }
            flat = flat * side + (c + self.cutoff) as usize;
        }
        Some(flat)
    }

    pub fn contains(&self, xi: &[i64]) -> bool {
        xi.iter().all(|c| c.abs() <= self.cutoff)
    }

    /// Error unless `2*cutoff + 1 <= N` so cube bins are distinct mod N.
    pub fn check_fits(&self, grid: &TorusGrid) -> Result<()> {
        grid.check_dimension(self.dimension)?;
        if 2 * self.cutoff + 1 > grid.points_per_axis() as i64 {
            return Err(Error::Aliasing {
                cutoff: self.cutoff,
                points_per_axis: grid.points_per_axis(),
            });
        }
        Ok(())
    }

    /// Iterate all lattice points in flat order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(move |flat| self.freq(flat))
    }
}

/// Axis-aligned integer box, the valid domain of a tabulated symbol
/// after difference operators have shrunk it at the boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl IntBox {
    pub fn from_cube(cube: &FrequencyCube) -> Self {
        Self {
            lo: vec![-cube.cutoff(); cube.dimension()],
            hi: vec![cube.cutoff(); cube.dimension()],
        }
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    pub fn side(&self, axis: usize) -> usize {
        (self.hi[axis] - self.lo[axis] + 1).max(0) as usize
    }

    pub fn len(&self) -> usize {
        (0..self.dimension()).map(|j| self.side(j)).product()
    }

    pub fn is_empty(&self) -> bool {
        (0..self.dimension()).any(|j| self.hi[j] < self.lo[j])
    }

    pub fn contains(&self, xi: &[i64]) -> bool {
        xi.iter()
            .enumerate()
            .all(|(j, &c)| self.lo[j] <= c && c <= self.hi[j])
    }

    /// Shrink the upper faces by a multi-index (forward differences).
    pub fn shrink_hi(&self, alpha: &[usize]) -> Self {
        let mut out = self.clone();
        for (j, &a) in alpha.iter().enumerate() {
            out.hi[j] -= a as i64;
        }
        out
    }

    /// Shrink the lower faces by a multi-index (backward differences).
    pub fn shrink_lo(&self, alpha: &[usize]) -> Self {
        let mut out = self.clone();
        for (j, &a) in alpha.iter().enumerate() {
            out.lo[j] += a as i64;
        }
        out
    }

    pub fn freq(&self, flat: usize) -> Vec<i64> {
        let mut out = vec![0i64; self.dimension()];
        let mut rem = flat;
        for j in (0..self.dimension()).rev() {
            let side = self.side(j);
            out[j] = (rem % side) as i64 + self.lo[j];
            rem /= side;
        }
        out
    }

    pub fn flat_index(&self, xi: &[i64]) -> Option<usize> {
        let mut flat = 0usize;
        for (j, &c) in xi.iter().enumerate() {
            if c < self.lo[j] || c > self.hi[j] {
                return None;
            }
            flat = flat * self.side(j) + (c - self.lo[j]) as usize;
        }
        Some(flat)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(move |flat| self.freq(flat))
    }
}

/// `<xi> = (1 + |xi|^2)^{1/2}` for lattice points.
pub fn bracket(xi: &[i64]) -> f64 {
    let sq: f64 = xi.iter().map(|&c| (c * c) as f64).sum();
    (1.0 + sq).sqrt()
}

/// `<xi>` for real frequency vectors.
pub fn bracket_f(xi: &[f64]) -> f64 {
    let sq: f64 = xi.iter().map(|&c| c * c).sum();
    (1.0 + sq).sqrt()
}

/// Euclidean norm of a lattice point.
pub fn freq_norm(xi: &[i64]) -> f64 {
    xi.iter()
        .map(|&c| (c * c) as f64)
        .sum::<f64>()
        .sqrt()
}
