//! Dense matrix form of periodic operators at desk scale.
//!
//! Columns are the operator applied to the discrete delta basis (value
//! one at a single node), so the matrix is the exact linear
//! representation of the application routes on the grid. Every assembly
//! re-checks itself against direct application on ten random inputs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier::PeriodicFunction;
use crate::grid::{FrequencyCube, TorusGrid};
use crate::symbol::{write_columnar, OPERATOR_TAG};

use super::FsoOperator;

/// Hard cap on `N^n` for dense assembly.
pub const MAX_DENSE_NODES: usize = 4096;

/// Relative tolerance of the enforced assembly consistency check.
pub const ASSEMBLY_CHECK_TOLERANCE: f64 = 1e-9;

/// Dense complex matrix mapping grid values to grid values.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    grid: TorusGrid,
    cube: FrequencyCube,
    /// Row-major `L x L` with `L = grid.len()`.
    matrix: Vec<Complex64>,
    provenance: String,
}

impl DenseOperator {
    pub fn from_parts(
        grid: TorusGrid,
        cube: FrequencyCube,
        matrix: Vec<Complex64>,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        let l = grid.len();
        if matrix.len() != l * l {
            return Err(Error::Domain(format!(
                "matrix length {} does not match {l}x{l}",
                matrix.len()
            )));
        }
        if matrix.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Numeric {
                location: "dense operator entries".into(),
            });
        }
        Ok(Self {
            grid,
            cube,
            matrix,
            provenance: provenance.into(),
        })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn cube(&self) -> FrequencyCube {
        self.cube
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.len() + col]
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let l = self.len();
        debug_assert_eq!(v.len(), l);
        (0..l)
            .map(|i| {
                let row = &self.matrix[i * l..(i + 1) * l];
                row.iter().zip(v.iter()).map(|(&m, &x)| m * x).sum()
            })
            .collect()
    }

    pub fn apply(&self, f: &PeriodicFunction) -> Result<PeriodicFunction> {
        if f.grid() != self.grid {
            return Err(Error::DimensionMismatch {
                axis: 0,
                left: f.grid().points_per_axis(),
                right: self.grid.points_per_axis(),
            });
        }
        PeriodicFunction::new(self.grid, self.matvec(f.values()))
    }

    /// Columnar serialization with the operator header tag; rows are
    /// `(row, col, re, im)`.
    pub fn to_columnar(&self) -> String {
        let l = self.len();
        write_columnar(
            OPERATOR_TAG,
            self.grid.dimension(),
            self.grid.points_per_axis(),
            self.cube.cutoff(),
            &self.provenance,
            (0..l).flat_map(|i| (0..l).map(move |j| (i, j, self.matrix[i * l + j]))),
        )
    }
}

/// Assemble the dense form of an operator and enforce the consistency
/// invariant: matrix-vector product agrees with direct application on
/// ten random inputs to `1e-9` relative.
pub fn assemble_matrix(op: &FsoOperator) -> Result<DenseOperator> {
    let grid = op.grid();
    let l = grid.len();
    if l > MAX_DENSE_NODES {
        return Err(Error::Resource(format!(
            "dense assembly needs N^n <= {MAX_DENSE_NODES}, got {l}"
        )));
    }
    let columns: Result<Vec<Vec<Complex64>>> = (0..l)
        .into_par_iter()
        .map(|j| {
            let mut delta = vec![Complex64::new(0.0, 0.0); l];
            delta[j] = Complex64::new(1.0, 0.0);
            let f = PeriodicFunction::new(grid, delta)?;
            Ok(op.apply(&f)?.into_values())
        })
        .collect();
    let columns = columns?;
    let mut matrix = vec![Complex64::new(0.0, 0.0); l * l];
    for (j, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            matrix[i * l + j] = v;
        }
    }
    let dense = DenseOperator::from_parts(
        grid,
        op.cube(),
        matrix,
        format!("fso:{}:{}", op.phase().name(), op.symbol().name()),
    )?;

    // enforced, not sampled: every assembly validates itself
    let mut rng = ChaCha8Rng::seed_from_u64(0xA55E_4B1E);
    for _ in 0..10 {
        let f = PeriodicFunction::new(
            grid,
            (0..l)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect(),
        )?;
        let via_matrix = dense.matvec(f.values());
        let via_apply = op.apply(&f)?;
        let scale = via_apply
            .values()
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let defect = via_matrix
            .iter()
            .zip(via_apply.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max)
            / scale;
        if defect > ASSEMBLY_CHECK_TOLERANCE {
            return Err(Error::Accuracy {
                context: format!("dense assembly of {}", dense.provenance()),
                defect,
                threshold: ASSEMBLY_CHECK_TOLERANCE,
            });
        }
    }
    Ok(dense)
}

/// Conjugate transpose. The discrete inner product carries the uniform
/// quadrature weight `N^{-n}` on both sides, so the weights cancel and
/// `<Mf, g> = <f, M*g>` holds exactly with the plain adjoint.
pub fn adjoint(m: &DenseOperator) -> DenseOperator {
    let l = m.len();
    let mut out = vec![Complex64::new(0.0, 0.0); l * l];
    for i in 0..l {
        for j in 0..l {
            out[j * l + i] = m.matrix[i * l + j].conj();
        }
    }
    DenseOperator {
        grid: m.grid,
        cube: m.cube,
        matrix: out,
        provenance: format!("adjoint:{}", m.provenance),
    }
}
