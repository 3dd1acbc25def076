//! Dense discretized integral operators with their grid metadata.

use faer::{Mat, MatRef};
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::grids::{Grid1D, TensorGrid2D};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operator has a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}

/// Scalars the dense solvers are instantiated for.
pub trait Scalar:
    faer::traits::ComplexField<Real = f64> + Copy + Send + Sync + std::fmt::Debug + 'static
{
    fn from_real(x: f64) -> Self;
    fn modulus(self) -> f64;
    fn conjugate(self) -> Self;
    fn to_complex(self) -> Complex64;
    fn scale(self, k: f64) -> Self;
    fn is_finite_value(self) -> bool;
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn conjugate(self) -> Self {
        self
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn is_finite_value(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn conjugate(self) -> Self {
        self.conj()
    }
    fn to_complex(self) -> Complex64 {
        self
    }
    fn scale(self, k: f64) -> Self {
        self * k
    }
    fn is_finite_value(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

/// Row or column discretization of an operator.
#[derive(Debug, Clone, PartialEq)]
pub enum GridLayout {
    Line(Grid1D),
    Tensor(TensorGrid2D),
}

impl GridLayout {
    pub fn len(&self) -> usize {
        match self {
            GridLayout::Line(g) => g.len(),
            GridLayout::Tensor(g) => g.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Quadrature weight of each flattened node.
    pub fn weights(&self) -> Vec<f64> {
        match self {
            GridLayout::Line(g) => g.weights().to_vec(),
            GridLayout::Tensor(g) => g.weights(),
        }
    }
}

impl From<Grid1D> for GridLayout {
    fn from(g: Grid1D) -> Self {
        GridLayout::Line(g)
    }
}

impl From<TensorGrid2D> for GridLayout {
    fn from(g: TensorGrid2D) -> Self {
        GridLayout::Tensor(g)
    }
}

/// A discretized operator: `entries[(i, j)]` maps column node `j` to row node `i`.
///
/// When `quadrature_absorbed` is set the column quadrature weights are
/// already folded into the entries, so applying the operator is a plain
/// matrix-vector product on nodal samples.
#[derive(Debug, Clone)]
pub struct OperatorMatrix<T> {
    entries: Mat<T>,
    row_grid: GridLayout,
    col_grid: GridLayout,
    quadrature_absorbed: bool,
}

pub type ComplexOperatorMatrix = OperatorMatrix<Complex64>;
pub type RealOperatorMatrix = OperatorMatrix<f64>;

impl<T: Scalar> OperatorMatrix<T> {
    pub fn new(
        entries: Mat<T>,
        row_grid: GridLayout,
        col_grid: GridLayout,
        quadrature_absorbed: bool,
    ) -> Result<Self, OperatorError> {
        if entries.nrows() != row_grid.len() {
            return Err(OperatorError::DimensionMismatch {
                expected: row_grid.len(),
                got: entries.nrows(),
            });
        }
        if entries.ncols() != col_grid.len() {
            return Err(OperatorError::DimensionMismatch {
                expected: col_grid.len(),
                got: entries.ncols(),
            });
        }
        for j in 0..entries.ncols() {
            for i in 0..entries.nrows() {
                if !entries[(i, j)].is_finite_value() {
                    return Err(OperatorError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self {
            entries,
            row_grid,
            col_grid,
            quadrature_absorbed,
        })
    }

    /// Fill an operator column by column (in parallel) from `f(row, col)`.
    pub fn from_fn<F>(
        row_grid: GridLayout,
        col_grid: GridLayout,
        quadrature_absorbed: bool,
        f: F,
    ) -> Result<Self, OperatorError>
    where
        F: Fn(usize, usize) -> T + Sync,
    {
        let (nrows, ncols) = (row_grid.len(), col_grid.len());
        let mut entries = Mat::<T>::zeros(nrows, ncols);
        entries
            .as_mut()
            .par_col_chunks_mut(1)
            .enumerate()
            .for_each(|(j, mut col)| {
                for i in 0..nrows {
                    col[(i, 0)] = f(i, j);
                }
            });
        Self::new(entries, row_grid, col_grid, quadrature_absorbed)
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> MatRef<'_, T> {
        self.entries.as_ref()
    }

    pub fn into_entries(self) -> Mat<T> {
        self.entries
    }

    pub fn row_grid(&self) -> &GridLayout {
        &self.row_grid
    }

    pub fn col_grid(&self) -> &GridLayout {
        &self.col_grid
    }

    pub fn quadrature_absorbed(&self) -> bool {
        self.quadrature_absorbed
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>, OperatorError> {
        if v.len() != self.ncols() {
            return Err(OperatorError::DimensionMismatch {
                expected: self.ncols(),
                got: v.len(),
            });
        }
        let rhs = Mat::<T>::from_fn(v.len(), 1, |i, _| v[i]);
        let out = &self.entries * &rhs;
        Ok((0..self.nrows()).map(|i| out[(i, 0)]).collect())
    }

    /// Composition `self · rhs` as an operator from `rhs`'s columns to `self`'s rows.
    pub fn compose(&self, rhs: &OperatorMatrix<T>) -> Result<Self, OperatorError> {
        if self.ncols() != rhs.nrows() {
            return Err(OperatorError::DimensionMismatch {
                expected: self.ncols(),
                got: rhs.nrows(),
            });
        }
        let entries = &self.entries * &rhs.entries;
        Self::new(
            entries,
            self.row_grid.clone(),
            rhs.col_grid.clone(),
            rhs.quadrature_absorbed,
        )
    }

    /// `diag(left) · M · diag(right)`.
    pub fn scaled(&self, left: &[f64], right: &[f64]) -> Result<Mat<T>, OperatorError> {
        self.check_scaling(left, right)?;
        Ok(Mat::from_fn(self.nrows(), self.ncols(), |i, j| {
            self.entries[(i, j)].scale(left[i] * right[j])
        }))
    }

    /// `diag(left) · M · diag(right)`, reusing the storage of `self`.
    pub fn into_scaled(self, left: &[f64], right: &[f64]) -> Result<Mat<T>, OperatorError> {
        self.check_scaling(left, right)?;
        let mut m = self.entries;
        m.par_col_chunks_mut(1)
            .enumerate()
            .for_each(|(j, mut col)| {
                for i in 0..left.len() {
                    col[(i, 0)] = col[(i, 0)].scale(left[i] * right[j]);
                }
            });
        Ok(m)
    }

    fn check_scaling(&self, left: &[f64], right: &[f64]) -> Result<(), OperatorError> {
        if left.len() != self.nrows() {
            return Err(OperatorError::DimensionMismatch {
                expected: self.nrows(),
                got: left.len(),
            });
        }
        if right.len() != self.ncols() {
            return Err(OperatorError::DimensionMismatch {
                expected: self.ncols(),
                got: right.len(),
            });
        }
        Ok(())
    }

    /// Largest `|M - M^H|` entry relative to the largest `|M|` entry.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(self.entries.as_ref())
    }
}

/// Largest `|M - M^H|` entry relative to the largest `|M|` entry.
pub fn hermitian_defect<T: Scalar>(m: MatRef<'_, T>) -> f64 {
    assert_eq!(
        m.nrows(),
        m.ncols(),
        "hermitian_defect needs a square matrix"
    );
    let n = m.nrows();
    let mut scale = 0.0f64;
    let mut defect = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let a = m[(i, j)];
            scale = scale.max(a.modulus());
            let d = a.to_complex() - m[(j, i)].conjugate().to_complex();
            defect = defect.max(d.norm());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        defect / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::uniform_grid;

    fn line(n: usize) -> GridLayout {
        uniform_grid(0.0, 1.0, n).unwrap().into()
    }

    #[test]
    fn from_fn_fills_every_entry() {
        let m = RealOperatorMatrix::from_fn(line(3), line(4), false, |i, j| (10 * i + j) as f64)
            .unwrap();
        assert_eq!(m.entries()[(2, 3)], 23.0);
        assert_eq!(
            m.apply(&[1.0, 0.0, 0.0, 1.0]).unwrap(),
            vec![3.0, 23.0, 43.0]
        );
    }

    #[test]
    fn rejects_mismatched_shapes_and_nan() {
        assert!(RealOperatorMatrix::new(Mat::zeros(2, 2), line(3), line(2), false).is_err());
        let mut bad = Mat::<f64>::zeros(2, 2);
        bad[(1, 0)] = f64::NAN;
        assert_eq!(
            RealOperatorMatrix::new(bad, line(2), line(2), false).unwrap_err(),
            OperatorError::NonFinite { row: 1, col: 0 }
        );
        let m = RealOperatorMatrix::from_fn(line(2), line(2), false, |_, _| 1.0).unwrap();
        assert!(m.apply(&[1.0]).is_err());
    }

    #[test]
    fn hermitian_defect_of_complex_matrix() {
        let m = ComplexOperatorMatrix::from_fn(line(2), line(2), false, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else if i < j {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::new(0.0, -1.0)
            }
        })
        .unwrap();
        assert_eq!(m.hermitian_defect(), 0.0);
    }
}
