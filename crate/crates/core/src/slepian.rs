//! Sinc-kernel (Slepian–Pollak) operators on a finite interval and the
//! separable product spectrum they generate.
//!
//! The operator `(Kf)(t) = ∫ sinc(Ω(t − t')) f(t') dt'` on `[lo, hi]` has
//! eigenvalues bounded by `π/Ω`. They are reported normalized by that factor,
//! so the plateau sits at 1 and roughly `c = 2ΩT/π` of them (the Shannon
//! number, `T` the half-length) are near 1 before the plunge.

use std::f64::consts::PI;

use faer::Mat;
use serde::Serialize;
use thiserror::Error;

use crate::config::ProblemConfig;
use crate::grids::{uniform_grid, GridError};
use crate::lifting::{approx_operator_prefactor, s_bandwidth, u_bandwidth};
use crate::spectra::{SpectraError, SpectrumKind, SpectrumResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SlepianError {
    #[error("bandwidth must be positive and finite, got {0}")]
    BadBandwidth(f64),
    #[error("{n} points cannot resolve Shannon number {shannon:.3}; need at least {required}")]
    UnderResolved {
        n: usize,
        shannon: f64,
        required: usize,
    },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("eigensolver did not converge")]
    NoConvergence,
}

/// `sin(t)/t`, with `sinc(0) = 1`.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 * (1.0 - t2 / 20.0)
    } else {
        t.sin() / t
    }
}

/// Shannon number `2ΩT/π` of a sinc operator on an interval of half-length `T`.
pub fn shannon_number(omega: f64, half_width: f64) -> f64 {
    2.0 * omega * half_width / PI
}

/// Smallest grid that resolves the plunge of a sinc operator.
pub fn required_points(shannon: f64) -> usize {
    (2.0 * shannon).ceil() as usize + 20
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlepianSpectrum {
    pub omega: f64,
    pub half_width: f64,
    pub shannon: f64,
    /// Descending, normalized by `π/Ω`.
    pub eigenvalues: Vec<f64>,
}

impl SlepianSpectrum {
    /// Number of normalized eigenvalues strictly above `level`.
    pub fn count_above(&self, level: f64) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > level).count()
    }

    /// Factor restoring the unnormalized eigenvalues, `π/Ω`.
    pub fn raw_scale(&self) -> f64 {
        PI / self.omega
    }
}

/// Midpoint Nyström discretization of the sinc operator with bandwidth
/// `omega` on `[lo, hi]`, symmetrized by the `√weight` similarity.
pub fn slepian_spectrum(
    omega: f64,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<SlepianSpectrum, SlepianError> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(SlepianError::BadBandwidth(omega));
    }
    let grid = uniform_grid(lo, hi, n)?;
    let half_width = 0.5 * (hi - lo);
    let shannon = shannon_number(omega, half_width);
    let required = required_points(shannon);
    if n < required {
        return Err(SlepianError::UnderResolved {
            n,
            shannon,
            required,
        });
    }
    let t = grid.nodes();
    let sw: Vec<f64> = grid.weights().iter().map(|w| w.sqrt()).collect();
    let k = Mat::<f64>::from_fn(n, n, |i, j| sw[i] * sinc(omega * (t[i] - t[j])) * sw[j]);
    let mut eigenvalues = k
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .map_err(|_| SlepianError::NoConvergence)?;
    let norm = omega / PI;
    for l in &mut eigenvalues {
        *l *= norm;
    }
    eigenvalues.sort_by(|a, b| b.total_cmp(a));
    Ok(SlepianSpectrum {
        omega,
        half_width,
        shannon,
        eigenvalues,
    })
}

/// The `u`-axis operator: kernel `sinc(2βa(u_o − u))` on `[−u_max, u_max]`.
pub fn u_axis_spectrum(config: &ProblemConfig) -> Result<SlepianSpectrum, SlepianError> {
    config.validate().map_err(GridError::from)?;
    slepian_spectrum(u_bandwidth(config), -config.u_max, config.u_max, config.n_u)
}

/// The `s`-axis operator: kernel `sinc((βa²/2r_max)(s_o − s))` on `[1, r_max/r_min]`.
pub fn s_axis_spectrum(config: &ProblemConfig) -> Result<SlepianSpectrum, SlepianError> {
    config.validate().map_err(GridError::from)?;
    slepian_spectrum(s_bandwidth(config), 1.0, config.s_max(), config.n_s)
}

/// Scale turning products of normalized spectra into eigenvalues of the
/// approximated operator: `8a³/(β² r_max²) · (π/Ω_u) · (π/Ω_s)`.
pub fn closed_form_scale(config: &ProblemConfig) -> f64 {
    approx_operator_prefactor(config) * (PI / u_bandwidth(config)) * (PI / s_bandwidth(config))
}

/// All pairwise products `scale · λ_u λ_s`, sorted descending.
pub fn product_spectrum(
    spec_u: &SlepianSpectrum,
    spec_s: &SlepianSpectrum,
    scale: f64,
    tau_db: f64,
) -> Result<SpectrumResult, SpectraError> {
    let products: Vec<f64> = spec_u
        .eigenvalues
        .iter()
        .flat_map(|lu| spec_s.eigenvalues.iter().map(move |ls| scale * lu * ls))
        .collect();
    SpectrumResult::from_eigenvalues(
        SpectrumKind::ProductClosedForm,
        products,
        tau_db,
        Vec::new(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn s_axis() -> SlepianSpectrum {
        slepian_spectrum(PI, 1.0, 4.0, 32).unwrap()
    }

    fn u_axis() -> SlepianSpectrum {
        slepian_spectrum(40.0 * PI, -0.5, 0.5, 164).unwrap()
    }

    #[test]
    fn sinc_convention() {
        assert_eq!(sinc(0.0), 1.0);
        assert_relative_eq!(sinc(PI / 2.0), 2.0 / PI, max_relative = 1e-15);
        assert!(sinc(PI).abs() < 1e-16);
        // series branch matches the direct formula at the switch-over
        assert_relative_eq!(
            sinc(0.99e-4),
            (0.99e-4f64).sin() / 0.99e-4,
            max_relative = 1e-15
        );
    }

    #[test]
    fn s_axis_matches_lapack_reference() {
        // Values from an independent LAPACK (dsyevd) run on the same discretization.
        let reference = [
            0.998920985004547,
            0.9689644544723212,
            0.7333423402044754,
            0.2620875153419395,
            0.03444508040889119,
            0.00215259498624121,
        ];
        let spec = s_axis();
        assert_relative_eq!(spec.shannon, 3.0, max_relative = 1e-14);
        for (got, want) in spec.eigenvalues.iter().zip(reference) {
            assert_relative_eq!(*got, want, max_relative = 1e-10);
        }
        assert_eq!(spec.count_above(0.5), 3);
    }

    #[test]
    fn u_axis_plunge_matches_lapack_reference() {
        let spec = u_axis();
        assert_relative_eq!(spec.shannon, 40.0, max_relative = 1e-14);
        assert_eq!(spec.count_above(0.5), 40);
        let reference = [
            (38, 0.8882098573468914),
            (39, 0.6614947180790098),
            (40, 0.33824174362393095),
            (41, 0.11183490879053473),
            (45, 1.2960104572477853e-04),
        ];
        for (i, want) in reference {
            assert_relative_eq!(spec.eigenvalues[i], want, max_relative = 1e-8);
        }
    }

    #[test]
    fn plateau_then_plunge() {
        for spec in [u_axis(), s_axis()] {
            let l0 = spec.eigenvalues[0];
            let idx = spec.shannon.ceil() as usize + 5;
            assert!(l0 > 0.99);
            assert!(spec.eigenvalues[idx] / l0 < 1e-2);
            assert!(spec.eigenvalues.len() >= spec.shannon.ceil() as usize + 10);
            assert!(spec
                .eigenvalues
                .iter()
                .all(|&l| l > -1e-10 && l < 1.0 + 1e-6));
            assert!(spec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn trace_equals_shannon_number() {
        // Midpoint trace: Σ λ = (Ω/π) Σ w_i sinc(0) = 2ΩT/π.
        for spec in [u_axis(), s_axis()] {
            let trace: f64 = spec.eigenvalues.iter().sum();
            assert_relative_eq!(trace, spec.shannon, max_relative = 1e-12);
        }
    }

    #[test]
    fn leading_eigenvalue_shrinks_with_bandwidth() {
        let mut prev = f64::INFINITY;
        for omega in [2.0, 1.0, 0.5, 0.25, 0.1] {
            let l0 = slepian_spectrum(omega, 1.0, 4.0, 40).unwrap().eigenvalues[0];
            assert!(l0 < prev);
            prev = l0;
        }
        // As Ω → 0 the normalized leading eigenvalue approaches (hi − lo)Ω/π.
        let omega = 1e-3;
        let l0 = slepian_spectrum(omega, 1.0, 4.0, 40).unwrap().eigenvalues[0];
        assert_relative_eq!(l0, 3.0 * omega / PI, max_relative = 1e-5);
    }

    #[test]
    fn rejects_coarse_grids_and_bad_bandwidth() {
        assert!(matches!(
            slepian_spectrum(40.0 * PI, -0.5, 0.5, 99),
            Err(SlepianError::UnderResolved { required: 100, .. })
        ));
        assert!(slepian_spectrum(40.0 * PI, -0.5, 0.5, 100).is_ok());
        assert!(matches!(
            slepian_spectrum(0.0, 0.0, 1.0, 30),
            Err(SlepianError::BadBandwidth(_))
        ));
        assert!(slepian_spectrum(1.0, 1.0, 0.0, 30).is_err());
    }

    #[test]
    fn singleton_product() {
        let u = SlepianSpectrum {
            omega: 1.0,
            half_width: 1.0,
            shannon: 2.0 / PI,
            eigenvalues: vec![1.0, 0.5],
        };
        let s = SlepianSpectrum {
            eigenvalues: vec![1.0],
            ..u.clone()
        };
        let p = product_spectrum(&u, &s, 1.0, -40.0).unwrap();
        assert_eq!(p.eigenvalues, vec![1.0, 0.5]);
        assert_relative_eq!(p.values[1], 0.5f64.sqrt());
        assert_eq!(p.kind, SpectrumKind::ProductClosedForm);
    }

    #[test]
    fn axis_spectra_follow_config() {
        let cfg = ProblemConfig::reference_case();
        let u = u_axis_spectrum(&cfg).unwrap();
        let s = s_axis_spectrum(&cfg).unwrap();
        assert_eq!(u.eigenvalues.len(), 164);
        assert_eq!(s.eigenvalues.len(), 32);
        assert_relative_eq!(u.omega, 40.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(s.omega, PI, max_relative = 1e-15);
        let bounds = crate::config::compute_bounds(&cfg).unwrap();
        assert!((u.count_above(0.5) as f64 - (bounds.m_u - 1.0)).abs() <= 1.0);
        assert!((s.count_above(0.5) as f64 - (bounds.m_s - 1.0)).abs() <= 1.0);
        assert_relative_eq!(
            closed_form_scale(&cfg),
            8000.0 / (4.0 * PI * PI * 1e4) * (1.0 / 40.0),
            max_relative = 1e-14
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn count_tracks_shannon_number(omega in 2.0f64..30.0, width in 0.5f64..2.0) {
            let shannon = shannon_number(omega, 0.5 * width);
            let n = required_points(shannon) + 10;
            let spec = slepian_spectrum(omega, 0.0, width, n).unwrap();
            let count = spec.count_above(0.5) as f64;
            prop_assert!((count - shannon.round()).abs() <= 1.0, "count {} shannon {}", count, shannon);
        }
    }
}
