//! Dimension of the data space of Fresnel-zone phase retrieval.
//!
//! A strip current on `[-a, a]` radiates into the Fresnel zone, and only the
//! squared field amplitude `|E(r, u)|²` is observed. Lifting the unknown to
//! `F(x, x̄) = J(x) J*(x̄)` makes the data linear in `F`; the number of
//! significant singular values of that lifted operator is the data-space
//! dimension. This crate assembles the operator, computes its spectra
//! (plain adjoint, Jacobian-weighted adjoint, and the closed-form separable
//! approximation built from two sinc-kernel operators), and checks them
//! against the bound `M̄ = M_u · M_s`.
//!
//! ```no_run
//! use lifted_spectrum::{compute_bounds, ProblemConfig};
//!
//! let bounds = compute_bounds(&ProblemConfig::reference_case()).unwrap();
//! assert_eq!(bounds.m_bar_ceil, 164);
//! ```
//!
//! Every capability has a runnable program under `examples/`.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod forward;
pub mod grids;
pub mod lifting;
pub mod operator;
pub mod report;
pub mod slepian;
pub mod spectra;

use thiserror::Error;

pub use config::{compute_bounds, validate_fresnel_regime, BoundResult, ProblemConfig};
pub use experiment::{OperatorKind, PropertyCheck};
pub use grids::{Grid1D, TensorGrid2D};
pub use operator::{ComplexOperatorMatrix, RealOperatorMatrix};
pub use slepian::SlepianSpectrum;
pub use spectra::{SpectrumKind, SpectrumResult};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error(transparent)]
    Grid(#[from] grids::GridError),
    #[error(transparent)]
    Operator(#[from] operator::OperatorError),
    #[error(transparent)]
    Lifting(#[from] lifting::LiftingError),
    #[error(transparent)]
    Slepian(#[from] slepian::SlepianError),
    #[error(transparent)]
    Spectra(#[from] spectra::SpectraError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Whether the error comes from configuration rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Grid(grids::GridError::Config(_))
                | Error::Slepian(slepian::SlepianError::Grid(grids::GridError::Config(_)))
        )
    }
}
