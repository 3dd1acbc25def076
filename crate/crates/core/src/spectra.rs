//! Singular and eigen spectra of discretized operators, and the critical
//! index at which a spectrum drops below a dB threshold.
//!
//! Operators act on `L₂` of their grids. A square operator `M` whose column
//! weights `W` are absorbed discretizes the eigenproblem of `KW`; the
//! similarity `W^½ (KW) W^-½ = W^½ K W^½` is Hermitian whenever `K` is, and is
//! what the Hermitian solver sees.

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ProblemConfig;
use crate::operator::{hermitian_defect, OperatorError, OperatorMatrix, Scalar};

/// Negative Hermitian eigenvalues down to this fraction of the largest are
/// treated as roundoff and clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-10;

/// Relative imaginary part above which a general eigenvalue is flagged.
pub const COMPLEX_FLAG: f64 = 1e-6;

/// Largest tolerated `|M − M^H|` (relative) for the Hermitian path.
pub const HERMITIAN_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("spectrum is empty")]
    Empty,
    #[error("spectrum is identically zero")]
    AllZero,
    #[error("operator is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("operator row and column grids carry different weights")]
    GridMismatch,
    #[error("operator is not Hermitian after symmetrization (defect {0:.3e})")]
    NotHermitian(f64),
    #[error("eigenvalue {value:.3e} is below −{NEGATIVE_CLAMP:e} of the largest ({max:.3e})")]
    NegativeEigenvalue { value: f64, max: f64 },
    #[error("{0} did not converge")]
    NoConvergence(&'static str),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpectrumKind {
    #[serde(rename = "svd_A")]
    SvdA,
    #[serde(rename = "sqrt_eig_AAdag")]
    SqrtEigAAdag,
    #[serde(rename = "sqrt_eig_AAdag_w")]
    SqrtEigAAdagW,
    #[serde(rename = "sqrt_eig_approx")]
    SqrtEigApprox,
    #[serde(rename = "product_closed_form")]
    ProductClosedForm,
}

impl SpectrumKind {
    pub fn label(self) -> &'static str {
        match self {
            SpectrumKind::SvdA => "svd_A",
            SpectrumKind::SqrtEigAAdag => "sqrt_eig_AAdag",
            SpectrumKind::SqrtEigAAdagW => "sqrt_eig_AAdag_w",
            SpectrumKind::SqrtEigApprox => "sqrt_eig_approx",
            SpectrumKind::ProductClosedForm => "product_closed_form",
        }
    }
}

/// A descending nonnegative spectrum and its critical index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub kind: SpectrumKind,
    /// Singular values or `√|λ|`, descending.
    pub values: Vec<f64>,
    /// The squared values: eigenvalues (or `σ²`), descending, negatives
    /// clamped to zero on the Hermitian path.
    pub eigenvalues: Vec<f64>,
    /// First index whose value is `tau_db` below `values[0]`.
    pub critical_index: usize,
    pub threshold_db: f64,
    /// Indices (into `values`) whose eigenvalue had a non-negligible imaginary part.
    pub complex_eig_flags: Vec<usize>,
}

impl SpectrumResult {
    /// Build from eigenvalues in any order. Values are `√max(λ, 0)`.
    pub fn from_eigenvalues(
        kind: SpectrumKind,
        mut eigenvalues: Vec<f64>,
        tau_db: f64,
        complex_eig_flags: Vec<usize>,
    ) -> Result<Self, SpectraError> {
        if eigenvalues.is_empty() {
            return Err(SpectraError::Empty);
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let values: Vec<f64> = eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
        let critical_index = match detect_critical_index(&values, tau_db) {
            Ok(i) => i,
            Err(SpectraError::AllZero) => 1,
            Err(e) => return Err(e),
        };
        Ok(Self {
            kind,
            values,
            eigenvalues,
            critical_index,
            threshold_db: tau_db,
            complex_eig_flags,
        })
    }

    pub fn with_kind(mut self, kind: SpectrumKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `20 log10(values[i] / values[0])`, or `None` for a zero spectrum.
    pub fn db(&self, i: usize) -> Option<f64> {
        let v0 = *self.values.first()?;
        (v0 > 0.0).then(|| 20.0 * (self.values[i] / v0).log10())
    }

    /// Recompute the critical index for another threshold.
    pub fn critical_index_at(&self, tau_db: f64) -> Result<usize, SpectraError> {
        detect_critical_index(&self.values, tau_db)
    }
}

/// Smallest `i` with `20 log10(values[i] / values[0]) < tau_db`, or
/// `values.len()` when no value falls below the threshold.
pub fn detect_critical_index(values: &[f64], tau_db: f64) -> Result<usize, SpectraError> {
    let v0 = *values.first().ok_or(SpectraError::Empty)?;
    if v0.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(SpectraError::AllZero);
    }
    Ok(values
        .iter()
        .position(|&v| 20.0 * (v / v0).log10() < tau_db)
        .unwrap_or(values.len()))
}

/// Row/column scalings turning a square operator into the matrix whose
/// eigenvalues are those of the continuous operator and which is Hermitian
/// when the underlying kernel is.
fn nystrom_scaling<T: Scalar>(m: &OperatorMatrix<T>) -> Result<(Vec<f64>, Vec<f64>), SpectraError> {
    let (rows, cols) = (m.nrows(), m.ncols());
    if rows != cols {
        return Err(SpectraError::NotSquare { rows, cols });
    }
    let w = m.col_grid().weights();
    let wr = m.row_grid().weights();
    if w.len() != wr.len()
        || w.iter()
            .zip(&wr)
            .any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(b.abs()))
    {
        return Err(SpectraError::GridMismatch);
    }
    let sqrt_w: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    let right = if m.quadrature_absorbed() {
        sqrt_w.iter().map(|x| 1.0 / x).collect()
    } else {
        sqrt_w.clone()
    };
    Ok((sqrt_w, right))
}

/// Eigen-spectrum of a square operator.
///
/// With `hermitian`, the operator is symmetrized by its quadrature weights,
/// checked for Hermitian structure, and handed to the symmetric solver;
/// roundoff negatives are clamped and `√λ` returned. Otherwise a general
/// eigensolve returns `√|λ|` sorted by magnitude, flagging eigenvalues above
/// the roundoff floor with a relative imaginary part over [`COMPLEX_FLAG`].
pub fn eig_spectrum<T: Scalar>(
    m: &OperatorMatrix<T>,
    hermitian: bool,
    config: &ProblemConfig,
) -> Result<SpectrumResult, SpectraError> {
    let kind = SpectrumKind::SqrtEigAAdag;
    if hermitian {
        let (left, right) = nystrom_scaling(m)?;
        let s = m.scaled(&left, &right)?;
        let eigenvalues = hermitian_eigenvalues(s)?;
        SpectrumResult::from_eigenvalues(kind, eigenvalues, config.tau_db, Vec::new())
    } else {
        let (rows, cols) = (m.nrows(), m.ncols());
        if rows != cols {
            return Err(SpectraError::NotSquare { rows, cols });
        }
        let mut eig: Vec<Complex64> = m
            .entries()
            .eigenvalues()
            .map_err(|_| SpectraError::NoConvergence("general eigensolver"))?;
        eig.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
        let max = eig.first().map_or(0.0, |l| l.norm());
        let floor = rows as f64 * f64::EPSILON * max;
        let flags = eig
            .iter()
            .enumerate()
            .filter(|(_, l)| l.norm() > floor && l.im.abs() > COMPLEX_FLAG * l.norm())
            .map(|(i, _)| i)
            .collect();
        let magnitudes = eig.iter().map(|l| l.norm()).collect();
        SpectrumResult::from_eigenvalues(kind, magnitudes, config.tau_db, flags)
    }
}

/// Eigenvalues of a Hermitian matrix, descending, with roundoff negatives clamped.
pub fn hermitian_eigenvalues<T: Scalar>(s: Mat<T>) -> Result<Vec<f64>, SpectraError> {
    let defect = hermitian_defect(s.as_ref());
    if defect > HERMITIAN_TOLERANCE {
        return Err(SpectraError::NotHermitian(defect));
    }
    let mut eigenvalues = s
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|_| SpectraError::NoConvergence("Hermitian eigensolver"))?;
    drop(s);
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    let max = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    for l in &mut eigenvalues {
        if *l < 0.0 {
            if *l < -NEGATIVE_CLAMP * max {
                return Err(SpectraError::NegativeEigenvalue { value: *l, max });
            }
            *l = 0.0;
        }
    }
    Ok(eigenvalues)
}

/// Singular values of the `L₂`-consistent matrix `W_rows^½ · K · W_cols^½`,
/// where `K` is the kernel (entries with absorbed column weights divided out).
///
/// Takes the operator by value: the weighted copy reuses its storage, which
/// matters for the full-size lifted operator.
pub fn svd_spectrum<T: Scalar>(
    a: OperatorMatrix<T>,
    config: &ProblemConfig,
) -> Result<SpectrumResult, SpectraError> {
    let left: Vec<f64> = a.row_grid().weights().iter().map(|w| w.sqrt()).collect();
    let right: Vec<f64> = a
        .col_grid()
        .weights()
        .iter()
        .map(|w| {
            if a.quadrature_absorbed() {
                1.0 / w.sqrt()
            } else {
                w.sqrt()
            }
        })
        .collect();
    let b = a.into_scaled(&left, &right)?;
    let sigma = b
        .singular_values()
        .map_err(|_| SpectraError::NoConvergence("SVD"))?;
    drop(b);
    let squared = sigma.iter().map(|s| s * s).collect();
    SpectrumResult::from_eigenvalues(SpectrumKind::SvdA, squared, config.tau_db, Vec::new())
}

/// Largest relative difference between two descending spectra over the
/// leading indices where `a[i] / a[0] > floor`.
pub fn relative_agreement(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let Some(&a0) = a.first() else { return 0.0 };
    a.iter()
        .zip(b)
        .take_while(|(x, _)| **x > floor * a0)
        .map(|(x, y)| (x - y).abs() / x.abs())
        .fold(0.0, f64::max)
}
