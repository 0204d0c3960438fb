//! Toroidal symbols and the difference calculus on the frequency lattice.
//!
//! A [`LatticeSymbol`] is a function `a(x, xi)` on `T^n x Z^n`, held
//! either as a closed-form evaluator or as a table over a grid and a
//! frequency box. Its regularity in `xi` is measured by forward and
//! backward difference operators, and class membership in `S^m_{rho,
//! delta}` is witnessed by the seminorm table
//!
//! ```text
//! C_{alpha beta} = sup |Delta_xi^alpha d_x^beta a(x, xi)| <xi>^{-(m - rho|alpha| + delta|beta|)}.
//! ```
//!
//! [`ContinuumSymbol`] is the companion object on `T^n x R^n`;
//! [`extension::extend_symbol`] and [`restrict_symbol`] move between the
//! two representations.

mod analysis;
mod difference;
mod extension;
mod io;

pub use analysis::{estimate_order, seminorm, seminorm_table, SeminormTable, SymbolClassSpec};
pub(crate) use analysis::ols_slope;
pub use difference::{
    backward_difference, difference_by_formula, forward_difference, x_derivative,
};
pub use extension::{extend_symbol, restrict_symbol, CardinalKernel, ExtendedSymbol};
pub use io::{
    read_columnar, read_symbol_table, write_columnar, write_symbol_table, ColumnarRecord,
    OPERATOR_TAG, SYMBOL_TAG,
};

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{FrequencyCube, IntBox, TorusGrid};

/// Closed-form evaluator `(x, xi) -> C` for a lattice symbol.
pub type SymbolHandle = Arc<dyn Fn(&[f64], &[i64]) -> Complex64 + Send + Sync>;

/// Analytic x-derivative family: `(x, xi, beta) -> d_x^beta a(x, xi)`.
pub type XDerivativeHandle = Arc<dyn Fn(&[f64], &[i64], &[usize]) -> Complex64 + Send + Sync>;

/// Frequency-only factor of one spatial mode.
pub type FreqHandle = Arc<dyn Fn(&[i64]) -> Complex64 + Send + Sync>;

/// Evaluator on `T^n x R^n`.
pub type ContinuumHandle = Arc<dyn Fn(&[f64], &[f64]) -> Complex64 + Send + Sync>;

/// Evaluator `(x, y, xi)` for amplitudes.
pub type AmplitudeHandle = Arc<dyn Fn(&[f64], &[f64], &[i64]) -> Complex64 + Send + Sync>;

/// Tabulated symbol values over `grid x domain`, laid out row-major as
/// `values[x_flat * domain.len() + xi_flat]`.
#[derive(Clone)]
pub struct SymbolTable {
    pub grid: TorusGrid,
    pub domain: IntBox,
    pub values: Vec<Complex64>,
}

#[derive(Clone)]
pub enum SymbolData {
    Handle(SymbolHandle),
    Table(SymbolTable),
}

/// A symbol `a(x, xi)` on `T^n x Z^n`.
#[derive(Clone)]
pub struct LatticeSymbol {
    data: SymbolData,
    dimension: usize,
    declared_order: f64,
    name: String,
    params: BTreeMap<String, f64>,
    /// Analytic x-derivatives, when the constructor supplied them.
    x_derivative: Option<XDerivativeHandle>,
    /// Finite trigonometric expansion in x: `a(x, xi) = sum_eta
    /// exp(2 pi i x . eta) g_eta(xi)`. Enables the exact
    /// frequency-batched application path.
    x_modes: Option<Vec<(Vec<i64>, FreqHandle)>>,
    /// Handle retained when a table was produced by [`Self::tabulate`],
    /// so the two forms can be cross-checked.
    source_handle: Option<SymbolHandle>,
}

impl std::fmt::Debug for LatticeSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LatticeSymbol")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("declared_order", &self.declared_order)
            .field(
                "form",
                &match &self.data {
                    SymbolData::Handle(_) => "handle",
                    SymbolData::Table(_) => "table",
                },
            )
            .finish()
    }
}

impl LatticeSymbol {
    /// Symbol from a closed-form evaluator.
    pub fn from_handle(
        name: impl Into<String>,
        dimension: usize,
        declared_order: f64,
        handle: impl Fn(&[f64], &[i64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            data: SymbolData::Handle(Arc::new(handle)),
            dimension,
            declared_order,
            name: name.into(),
            params: BTreeMap::new(),
            x_derivative: None,
            x_modes: None,
            source_handle: None,
        }
    }

    /// x-independent symbol `a(xi)`. All x-derivatives vanish and the
    /// multiplier fast path applies.
    pub fn from_freq_fn(
        name: impl Into<String>,
        dimension: usize,
        declared_order: f64,
        g: impl Fn(&[i64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        let g: FreqHandle = Arc::new(g);
        let eval = g.clone();
        let deriv = g.clone();
        let mut s = Self::from_handle(name, dimension, declared_order, move |_x, xi| eval(xi));
        s.x_modes = Some(vec![(vec![0; dimension], g)]);
        s.x_derivative = Some(Arc::new(move |_x, xi, beta| {
            if beta.iter().all(|&b| b == 0) {
                deriv(xi)
            } else {
                Complex64::new(0.0, 0.0)
            }
        }));
        s
    }

    /// Tabulated symbol over `grid x cube`.
    pub fn from_table(
        name: impl Into<String>,
        declared_order: f64,
        grid: TorusGrid,
        cube: FrequencyCube,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        grid.check_dimension(cube.dimension())?;
        let domain = IntBox::from_cube(&cube);
        if values.len() != grid.len() * domain.len() {
            return Err(Error::Domain(format!(
                "table length {} does not match grid {} x cube {}",
                values.len(),
                grid.len(),
                domain.len()
            )));
        }
        Ok(Self {
            data: SymbolData::Table(SymbolTable {
                grid,
                domain,
                values,
            }),
            dimension: grid.dimension(),
            declared_order,
            name: name.into(),
            params: BTreeMap::new(),
            x_derivative: None,
            x_modes: None,
            source_handle: None,
        })
    }

    pub(crate) fn from_parts(
        name: String,
        dimension: usize,
        declared_order: f64,
        data: SymbolData,
    ) -> Self {
        Self {
            data,
            dimension,
            declared_order,
            name,
            params: BTreeMap::new(),
            x_derivative: None,
            x_modes: None,
            source_handle: None,
        }
    }

    /// Attach an analytic x-derivative family.
    pub fn with_x_derivative(
        mut self,
        handle: impl Fn(&[f64], &[i64], &[usize]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        self.x_derivative = Some(Arc::new(handle));
        self
    }

    /// Declare a finite trigonometric expansion in x.
    pub fn with_x_modes(mut self, modes: Vec<(Vec<i64>, FreqHandle)>) -> Self {
        self.x_modes = Some(modes);
        self
    }

    pub fn with_param(mut self, key: impl Into<String>, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn declared_order(&self) -> f64 {
        self.declared_order
    }

    pub fn data(&self) -> &SymbolData {
        &self.data
    }

    pub fn is_table(&self) -> bool {
        matches!(self.data, SymbolData::Table(_))
    }

    pub(crate) fn table(&self) -> Option<&SymbolTable> {
        match &self.data {
            SymbolData::Table(t) => Some(t),
            SymbolData::Handle(_) => None,
        }
    }

    pub(crate) fn x_derivative_handle(&self) -> Option<&XDerivativeHandle> {
        self.x_derivative.as_ref()
    }

    /// Spatial modes when the symbol is a finite trigonometric
    /// polynomial in x.
    pub fn x_modes(&self) -> Option<&[(Vec<i64>, FreqHandle)]> {
        self.x_modes.as_deref()
    }

    /// The frequency factor when the symbol does not depend on x at all.
    pub fn x_independent(&self) -> Option<&FreqHandle> {
        match self.x_modes.as_deref() {
            Some([(eta, g)]) if eta.iter().all(|&e| e == 0) => Some(g),
            _ => None,
        }
    }

    /// Valid frequency box; `None` means the symbol evaluates anywhere.
    pub fn domain(&self) -> Option<&IntBox> {
        self.table().map(|t| &t.domain)
    }

    /// Grid on which x is resolved: the table grid, if any.
    pub fn grid_hint(&self) -> Option<TorusGrid> {
        self.table().map(|t| t.grid)
    }

    /// Evaluate at `(x, xi)`. Tabulated symbols evaluate at the grid
    /// node nearest to `x` (all callers in this crate pass exact nodes)
    /// and return zero outside their valid box.
    pub fn eval(&self, x: &[f64], xi: &[i64]) -> Complex64 {
        match &self.data {
            SymbolData::Handle(h) => h(x, xi),
            SymbolData::Table(t) => {
                let n = t.grid.points_per_axis();
                let mut index = Vec::with_capacity(x.len());
                for &c in x {
                    let k = (c * n as f64).round() as i64;
                    index.push(k.rem_euclid(n as i64) as usize);
                }
                let x_flat = t.grid.flat_index(&index);
                self.eval_table(t, x_flat, xi)
            }
        }
    }

    /// Evaluate with x given as a flat node index of `grid`.
    pub fn eval_on_node(&self, grid: &TorusGrid, x_flat: usize, xi: &[i64]) -> Complex64 {
        match &self.data {
            SymbolData::Handle(h) => h(&grid.node(x_flat), xi),
            SymbolData::Table(t) => {
                if t.grid == *grid {
                    self.eval_table(t, x_flat, xi)
                } else {
                    self.eval(&grid.node(x_flat), xi)
                }
            }
        }
    }

    fn eval_table(&self, t: &SymbolTable, x_flat: usize, xi: &[i64]) -> Complex64 {
        match t.domain.flat_index(xi) {
            Some(f) => t.values[x_flat * t.domain.len() + f],
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Materialize the symbol as a table over `grid x cube`, retaining
    /// the handle for cross-checks.
    pub fn tabulate(&self, grid: TorusGrid, cube: FrequencyCube) -> Result<Self> {
        grid.check_dimension(self.dimension)?;
        grid.check_dimension(cube.dimension())?;
        let domain = IntBox::from_cube(&cube);
        let dlen = domain.len();
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len() * dlen];
        for x_flat in 0..grid.len() {
            let x = grid.node(x_flat);
            for xi_flat in 0..dlen {
                let xi = domain.freq(xi_flat);
                let v = self.eval(&x, &xi);
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::Numeric {
                        location: format!("symbol '{}' at x={x:?}, xi={xi:?}", self.name),
                    });
                }
                values[x_flat * dlen + xi_flat] = v;
            }
        }
        let mut out = Self {
            data: SymbolData::Table(SymbolTable {
                grid,
                domain,
                values,
            }),
            dimension: self.dimension,
            declared_order: self.declared_order,
            name: self.name.clone(),
            params: self.params.clone(),
            x_derivative: self.x_derivative.clone(),
            x_modes: self.x_modes.clone(),
            source_handle: None,
        };
        if let SymbolData::Handle(h) = &self.data {
            out.source_handle = Some(h.clone());
        }
        Ok(out)
    }

    /// Largest disagreement between the table and its source handle on
    /// shared points. Zero when either form is absent.
    pub fn forms_disagreement(&self) -> f64 {
        let (Some(t), Some(h)) = (self.table(), self.source_handle.as_ref()) else {
            return 0.0;
        };
        let dlen = t.domain.len();
        let mut worst = 0.0f64;
        for x_flat in 0..t.grid.len() {
            let x = t.grid.node(x_flat);
            for xi_flat in 0..dlen {
                let xi = t.domain.freq(xi_flat);
                let d = (t.values[x_flat * dlen + xi_flat] - h(&x, &xi)).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

/// Symbol `a(x, xi)` on `T^n x R^n`, 1-periodic in every x component.
#[derive(Clone)]
pub struct ContinuumSymbol {
    evaluator: ContinuumHandle,
    dimension: usize,
    declared_order: f64,
    name: String,
    /// Frequency box on which interpolation identities (cardinality,
    /// partition of unity) are exact; `None` for closed forms valid on
    /// all of `R^n`.
    exact_box: Option<(Vec<f64>, Vec<f64>)>,
    x_independent: bool,
}

impl ContinuumSymbol {
    pub fn new(
        name: impl Into<String>,
        dimension: usize,
        declared_order: f64,
        evaluator: impl Fn(&[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            evaluator: Arc::new(evaluator),
            dimension,
            declared_order,
            name: name.into(),
            exact_box: None,
            x_independent: false,
        }
    }

    /// Frequency-only symbol `sigma(xi)`; marks the x-independence that
    /// unlocks multiplier fast paths downstream.
    pub fn from_freq_fn(
        name: impl Into<String>,
        dimension: usize,
        declared_order: f64,
        sigma: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        let mut s = Self::new(name, dimension, declared_order, move |_x, xi| sigma(xi));
        s.x_independent = true;
        s
    }

    pub fn x_independent(&self) -> bool {
        self.x_independent
    }

    pub(crate) fn with_exact_box(mut self, lo: Vec<f64>, hi: Vec<f64>) -> Self {
        self.exact_box = Some((lo, hi));
        self
    }

    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        (self.evaluator)(x, xi)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn declared_order(&self) -> f64 {
        self.declared_order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn exact_box(&self) -> Option<(&[f64], &[f64])> {
        self.exact_box
            .as_ref()
            .map(|(lo, hi)| (lo.as_slice(), hi.as_slice()))
    }

    /// Spot-check 1-periodicity in x at pseudo-random points; returns
    /// the worst defect.
    pub fn periodicity_defect(&self, seed: u64, samples: usize) -> f64 {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..samples {
            let x: Vec<f64> = (0..self.dimension).map(|_| rng.gen::<f64>()).collect();
            let xi: Vec<f64> = (0..self.dimension)
                .map(|_| 16.0 * (rng.gen::<f64>() - 0.5))
                .collect();
            let base = self.eval(&x, &xi);
            for j in 0..self.dimension {
                let mut shifted = x.clone();
                shifted[j] += 1.0;
                let d = (self.eval(&shifted, &xi) - base).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

impl std::fmt::Debug for ContinuumSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContinuumSymbol")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("declared_order", &self.declared_order)
            .finish()
    }
}

/// Amplitude `a(x, y, xi)` on `T^n x T^n x Z^n`.
#[derive(Clone)]
pub struct AmplitudeSymbol {
    evaluator: AmplitudeHandle,
    dimension: usize,
    declared_order: f64,
    name: String,
}

impl AmplitudeSymbol {
    pub fn new(
        name: impl Into<String>,
        dimension: usize,
        declared_order: f64,
        evaluator: impl Fn(&[f64], &[f64], &[i64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            evaluator: Arc::new(evaluator),
            dimension,
            declared_order,
            name: name.into(),
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64], xi: &[i64]) -> Complex64 {
        (self.evaluator)(x, y, xi)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn declared_order(&self) -> f64 {
        self.declared_order
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

/// All multi-indices of the given dimension with total degree `<= max_total`,
/// in lexicographic order.
pub fn multi_indices(dimension: usize, max_total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; dimension];
    loop {
        if cur.iter().sum::<usize>() <= max_total {
            out.push(cur.clone());
        }
        // odometer increment with early carry when the prefix sum is
        // already too large
        let mut j = dimension;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            cur[j] += 1;
            if cur.iter().take(j + 1).sum::<usize>() <= max_total {
                for slot in cur.iter_mut().skip(j + 1) {
                    *slot = 0;
                }
                break;
            }
            cur[j] = 0;
            if j == 0 {
                return out;
            }
        }
    }
}

/// Binomial coefficient as f64 (arguments stay tiny in this crate).
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::bracket;

    #[test]
    fn multi_index_enumeration() {
        let idx = multi_indices(2, 2);
        assert_eq!(idx.len(), 6); // (0,0),(0,1),(0,2),(1,0),(1,1),(2,0)
        assert!(idx.contains(&vec![1, 1]));
        assert!(!idx.contains(&vec![2, 1]));
        assert_eq!(multi_indices(1, 3).len(), 4);
        assert_eq!(multi_indices(3, 0), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(3, 0), 1.0);
        assert_eq!(binomial(2, 5), 0.0);
    }

    #[test]
    fn tabulated_form_matches_handle() {
        let s = LatticeSymbol::from_handle("bracket-inv", 1, -1.0, |_x, xi| {
            Complex64::new(1.0 / bracket(xi), 0.0)
        });
        let grid = TorusGrid::new(1, 8).unwrap();
        let cube = FrequencyCube::new(1, 3).unwrap();
        let t = s.tabulate(grid, cube).unwrap();
        assert!(t.forms_disagreement() < 1e-12);
        assert!((t.eval(&[0.25], &[2]) - Complex64::new(1.0 / bracket(&[2]), 0.0)).norm() < 1e-15);
        // outside the box the table reads as zero
        assert_eq!(t.eval(&[0.25], &[5]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn x_independence_detection() {
        let s = LatticeSymbol::from_freq_fn("one", 2, 0.0, |_| Complex64::new(1.0, 0.0));
        assert!(s.x_independent().is_some());
        let s2 = LatticeSymbol::from_handle("x-dep", 2, 0.0, |x, _| {
            Complex64::new(x[0], 0.0)
        });
        assert!(s2.x_independent().is_none());
    }

    #[test]
    fn continuum_periodicity_check() {
        let good = ContinuumSymbol::new("periodic", 1, 0.0, |x, xi| {
            Complex64::new((std::f64::consts::TAU * x[0]).cos() / (1.0 + xi[0] * xi[0]), 0.0)
        });
        assert!(good.periodicity_defect(1, 64) < 1e-10);
        let bad = ContinuumSymbol::new("drift", 1, 0.0, |x, _| Complex64::new(x[0], 0.0));
        assert!(bad.periodicity_defect(1, 64) > 0.5);
    }
}
