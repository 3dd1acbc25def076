//! End-to-end spectra for a configuration and the cross-module property checks.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{compute_bounds, ProblemConfig};
use crate::forward::{assemble_t, squared_field};
use crate::grids::{r_grid_from_s, s_grid_from_r, u_grid, x_grid};
use crate::lifting::{assemble_a, assemble_a_adjoint, assemble_aadag_approx, LiftedUnknown};
use crate::operator::ComplexOperatorMatrix;
use crate::slepian::{closed_form_scale, product_spectrum, s_axis_spectrum, u_axis_spectrum};
use crate::spectra::{
    eig_spectrum, relative_agreement, svd_spectrum, SpectrumKind, SpectrumResult,
};
use crate::Error;

/// Seed for the random source vectors of the lifting-consistency check.
pub const VERIFY_SEED: u64 = 0x5eed_1f7e;

/// Number of random sources in the lifting-consistency check.
pub const LIFTING_TRIALS: usize = 20;

pub const LIFTING_TOLERANCE: f64 = 1e-10;
pub const GRAM_TOLERANCE: f64 = 1e-8;
pub const SIMILARITY_TOLERANCE: f64 = 1e-8;
pub const TENSOR_TOLERANCE: f64 = 1e-10;

/// Leading indices compared in the Gram and tensor-product checks.
pub const COMPARED_INDICES: usize = 200;

/// Relative floor (on singular values) for the SVD-vs-Gram comparison.
/// Squaring into the Gram matrix costs half the digits, so values far below
/// this cannot agree to [`GRAM_TOLERANCE`] in double precision.
pub const GRAM_FLOOR: f64 = 1e-3;

/// Relative floor (on eigenvalue magnitudes) for the similarity check.
pub const SIMILARITY_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// `√eig(AA†)`: the actual singular values of the lifted operator.
    Lifting,
    /// `√eig(AA_w†)` with the Jacobian-canceling weight.
    Weighted,
    /// `√eig` of the enclosing-rectangle approximation of `AA_w†`.
    Approx,
    /// `√` of the closed-form product of the two sinc-operator spectra.
    Product,
}

impl OperatorKind {
    pub fn spectrum_kind(self) -> SpectrumKind {
        match self {
            OperatorKind::Lifting => SpectrumKind::SqrtEigAAdag,
            OperatorKind::Weighted => SpectrumKind::SqrtEigAAdagW,
            OperatorKind::Approx => SpectrumKind::SqrtEigApprox,
            OperatorKind::Product => SpectrumKind::ProductClosedForm,
        }
    }
}

/// `T` on the configured grids.
pub fn forward_operator(config: &ProblemConfig) -> Result<ComplexOperatorMatrix, Error> {
    let r = r_grid_from_s(&s_grid_from_r(config)?, config.r_max)?;
    assemble_t(config, &x_grid(config)?, &r, &u_grid(config)?)
}

/// `A` on the configured grids.
pub fn lifting_operator(config: &ProblemConfig) -> Result<ComplexOperatorMatrix, Error> {
    let r = r_grid_from_s(&s_grid_from_r(config)?, config.r_max)?;
    assemble_a(config, &x_grid(config)?, &r, &u_grid(config)?)
}

/// `√eig(A A†)` or `√eig(A A_w†)`, composed as an explicit matrix product.
///
/// Both compositions are `H W` with `H` Hermitian positive semidefinite
/// (the weight is nonnegative) and `W` the diagonal data weights, so the
/// Hermitian solver applies after the `W^½` similarity.
pub fn gram_spectrum(
    a: &ComplexOperatorMatrix,
    weighted: bool,
    config: &ProblemConfig,
) -> Result<SpectrumResult, Error> {
    let adj = assemble_a_adjoint(a, weighted, config)?;
    let composed = a.compose(&adj)?;
    drop(adj);
    let kind = if weighted {
        SpectrumKind::SqrtEigAAdagW
    } else {
        SpectrumKind::SqrtEigAAdag
    };
    Ok(eig_spectrum(&composed, true, config)?.with_kind(kind))
}

/// Same as [`gram_spectrum`] with `weighted`, but through the general
/// (non-Hermitian) eigensolver, populating the complex-eigenvalue flags.
pub fn weighted_spectrum_general(
    a: &ComplexOperatorMatrix,
    config: &ProblemConfig,
) -> Result<SpectrumResult, Error> {
    let adj = assemble_a_adjoint(a, true, config)?;
    let composed = a.compose(&adj)?;
    drop(adj);
    Ok(eig_spectrum(&composed, false, config)?.with_kind(SpectrumKind::SqrtEigAAdagW))
}

/// Spectrum of the symmetrized approximation (identical, up to roundoff, to
/// the `s_o/s` form; see [`check_similarity_invariance`]).
pub fn approx_spectrum(config: &ProblemConfig) -> Result<SpectrumResult, Error> {
    let m = assemble_aadag_approx(config, &s_grid_from_r(config)?, &u_grid(config)?, true)?;
    Ok(eig_spectrum(&m, true, config)?.with_kind(SpectrumKind::SqrtEigApprox))
}

pub fn product_closed_form(config: &ProblemConfig) -> Result<SpectrumResult, Error> {
    let u = u_axis_spectrum(config)?;
    let s = s_axis_spectrum(config)?;
    Ok(product_spectrum(
        &u,
        &s,
        closed_form_scale(config),
        config.tau_db,
    )?)
}

pub fn operator_spectrum(
    config: &ProblemConfig,
    kind: OperatorKind,
) -> Result<SpectrumResult, Error> {
    match kind {
        OperatorKind::Lifting => gram_spectrum(&lifting_operator(config)?, false, config),
        OperatorKind::Weighted => gram_spectrum(&lifting_operator(config)?, true, config),
        OperatorKind::Approx => approx_spectrum(config),
        OperatorKind::Product => product_closed_form(config),
    }
}

/// Plain and weighted Gram spectra sharing one assembly of `A`.
pub fn lifting_spectra(config: &ProblemConfig) -> Result<(SpectrumResult, SpectrumResult), Error> {
    let a = lifting_operator(config)?;
    let plain = gram_spectrum(&a, false, config)?;
    let weighted = gram_spectrum(&a, true, config)?;
    Ok((plain, weighted))
}

/// Outcome of one property check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyCheck {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl PropertyCheck {
    fn below(name: &'static str, measured: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: measured.is_finite() && measured < tolerance,
            measured,
            tolerance,
            detail,
        }
    }

    fn failed(name: &'static str, tolerance: f64, err: &Error) -> Self {
        Self {
            name: name.to_string(),
            passed: false,
            measured: f64::NAN,
            tolerance,
            detail: format!("error: {err}"),
        }
    }
}

impl fmt::Display for PropertyCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<24} measured={:.3e} tol={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, "  {}", self.detail)?;
        }
        Ok(())
    }
}

/// Complex sources with standard-normal-ish components from a fixed seed.
pub fn random_sources(n: usize, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (0..n)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect()
        })
        .collect()
}

/// Worst `max |A vec(J J^H) − |TJ|²| / max |TJ|²` over random sources.
pub fn lifting_consistency_error(
    a: &ComplexOperatorMatrix,
    t: &ComplexOperatorMatrix,
    count: usize,
    seed: u64,
) -> Result<f64, Error> {
    let mut worst = 0.0f64;
    for j in random_sources(t.ncols(), count, seed) {
        let lifted = a.apply(LiftedUnknown::from_source(&j).values())?;
        let direct = squared_field(t, &j)?;
        let peak = direct.iter().cloned().fold(0.0, f64::max);
        let err = lifted
            .iter()
            .zip(&direct)
            .map(|(l, d)| (l - d).norm())
            .fold(0.0, f64::max);
        worst = worst.max(err / peak);
    }
    Ok(worst)
}

pub fn check_lifting_consistency(
    config: &ProblemConfig,
    a: &ComplexOperatorMatrix,
    seed: u64,
) -> PropertyCheck {
    const NAME: &str = "lifting_consistency";
    let measured = forward_operator(config)
        .and_then(|t| lifting_consistency_error(a, &t, LIFTING_TRIALS, seed));
    match measured {
        Ok(err) => PropertyCheck::below(
            NAME,
            err,
            LIFTING_TOLERANCE,
            format!("{LIFTING_TRIALS} random sources, seed {seed:#x}"),
        ),
        Err(e) => PropertyCheck::failed(NAME, LIFTING_TOLERANCE, &e),
    }
}

/// Singular values of `A` against `√eig(A A†)`. Consumes `A` so the SVD
/// can work in its storage.
pub fn check_gram_consistency(config: &ProblemConfig, a: ComplexOperatorMatrix) -> PropertyCheck {
    const NAME: &str = "gram_consistency";
    let run = move || -> Result<(f64, usize), Error> {
        let gram = gram_spectrum(&a, false, config)?;
        let svd = svd_spectrum(a, config)?;
        let n = COMPARED_INDICES.min(svd.len()).min(gram.len());
        Ok((
            relative_agreement(&svd.values[..n], &gram.values[..n], GRAM_FLOOR),
            n,
        ))
    };
    match run() {
        Ok((err, n)) => PropertyCheck::below(
            NAME,
            err,
            GRAM_TOLERANCE,
            format!("top {n} singular values above {GRAM_FLOOR:e} of the largest"),
        ),
        Err(e) => PropertyCheck::failed(NAME, GRAM_TOLERANCE, &e),
    }
}

/// Eigenvalue magnitudes of the `s_o/s` form against the symmetrized form.
pub fn similarity_error(config: &ProblemConfig) -> Result<(f64, SpectrumResult), Error> {
    let s = s_grid_from_r(config)?;
    let u = u_grid(config)?;
    let plain = assemble_aadag_approx(config, &s, &u, false)?;
    let general = eig_spectrum(&plain, false, config)?;
    drop(plain);
    let symmetric = assemble_aadag_approx(config, &s, &u, true)?;
    let sym = eig_spectrum(&symmetric, true, config)?.with_kind(SpectrumKind::SqrtEigApprox);
    let err = relative_agreement(&sym.eigenvalues, &general.eigenvalues, SIMILARITY_FLOOR);
    Ok((err, sym))
}

pub fn check_similarity_invariance(
    config: &ProblemConfig,
) -> (PropertyCheck, Option<SpectrumResult>) {
    const NAME: &str = "similarity_invariance";
    match similarity_error(config) {
        Ok((err, sym)) => (
            PropertyCheck::below(
                NAME,
                err,
                SIMILARITY_TOLERANCE,
                format!("eigenvalues above {SIMILARITY_FLOOR:e} of the largest"),
            ),
            Some(sym),
        ),
        Err(e) => (PropertyCheck::failed(NAME, SIMILARITY_TOLERANCE, &e), None),
    }
}

/// Eigenvalues of the discretized separable operator against the pairwise
/// products of the one-dimensional spectra.
pub fn tensor_product_error(
    config: &ProblemConfig,
    symmetric: Option<&SpectrumResult>,
) -> Result<f64, Error> {
    let direct = match symmetric {
        Some(s) => s.clone(),
        None => approx_spectrum(config)?,
    };
    let product = product_closed_form(config)?;
    let n = COMPARED_INDICES.min(direct.len());
    Ok(relative_agreement(
        &direct.eigenvalues[..n],
        &product.eigenvalues[..n],
        0.0,
    ))
}

pub fn check_tensor_exactness(
    config: &ProblemConfig,
    symmetric: Option<&SpectrumResult>,
) -> PropertyCheck {
    const NAME: &str = "tensor_product_exactness";
    match tensor_product_error(config, symmetric) {
        Ok(err) => PropertyCheck::below(
            NAME,
            err,
            TENSOR_TOLERANCE,
            format!("top {COMPARED_INDICES} eigenvalues"),
        ),
        Err(e) => PropertyCheck::failed(NAME, TENSOR_TOLERANCE, &e),
    }
}

/// The bound formulas, and their agreement (±1) with the number of
/// normalized sinc-operator eigenvalues above ½ on each axis.
pub fn check_bounds(config: &ProblemConfig) -> PropertyCheck {
    const NAME: &str = "bound_check";
    let run = || -> Result<(f64, String), Error> {
        let b = compute_bounds(config)?;
        let u = u_axis_spectrum(config)?;
        let s = s_axis_spectrum(config)?;
        let (cu, cs) = (u.count_above(0.5), s.count_above(0.5));
        let mut measured = ((cu as f64) - (b.m_u - 1.0))
            .abs()
            .max(((cs as f64) - (b.m_s - 1.0)).abs());
        let consistent = b.m_u >= 1.0 && b.m_s >= 1.0 && b.m_bar == b.m_u * b.m_s;
        if !consistent {
            measured = f64::INFINITY;
        }
        Ok((measured, format!("{b}; counts above 0.5: u={cu} s={cs}")))
    };
    match run() {
        Ok((measured, detail)) => PropertyCheck::count_check(NAME, measured, detail),
        Err(e) => PropertyCheck::failed(NAME, 1.0, &e),
    }
}

impl PropertyCheck {
    fn count_check(name: &'static str, measured: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: measured <= 1.0,
            measured,
            tolerance: 1.0,
            detail,
        }
    }
}

/// Run every property check on the configured grids.
pub fn run_verification(config: &ProblemConfig, seed: u64) -> Result<Vec<PropertyCheck>, Error> {
    config.validate()?;
    let mut checks = Vec::with_capacity(5);
    match lifting_operator(config) {
        Ok(a) => {
            checks.push(check_lifting_consistency(config, &a, seed));
            checks.push(check_gram_consistency(config, a));
        }
        Err(e) => {
            checks.push(PropertyCheck::failed(
                "lifting_consistency",
                LIFTING_TOLERANCE,
                &e,
            ));
            checks.push(PropertyCheck::failed(
                "gram_consistency",
                GRAM_TOLERANCE,
                &e,
            ));
        }
    }
    let (similarity, symmetric) = check_similarity_invariance(config);
    checks.push(similarity);
    checks.push(check_tensor_exactness(config, symmetric.as_ref()));
    checks.push(check_bounds(config));
    Ok(checks)
}
