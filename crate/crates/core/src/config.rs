//! Problem geometry and the closed-form data-space bounds.
//!
//! All lengths are measured in wavelengths, so the wavenumber is fixed at
//! `β = 2π`. The strip source occupies `[-a, a]`; the squared field is
//! observed on `[r_min, r_max] × [-u_max, u_max]` with `u = sin θ`.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Wavenumber for wavelength-normalized lengths.
pub const BETA: f64 = 2.0 * PI;

/// `β / π`, kept exact so the bound formulas produce integers when they should.
const BETA_OVER_PI: f64 = 2.0;

/// Relative slack used when rounding real-valued bounds up to an index.
const CEIL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("invalid config: {field} {reason}")]
    InvalidField { field: &'static str, reason: String },
}

impl ConfigError {
    fn field(field: &'static str, reason: impl Into<String>) -> Self {
        ConfigError::InvalidField {
            field,
            reason: reason.into(),
        }
    }

    /// Name of the offending configuration field.
    pub fn field_name(&self) -> &'static str {
        match self {
            ConfigError::InvalidField { field, .. } => field,
        }
    }
}

/// Geometry, discretization and threshold parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    /// Half-width of the source strip.
    pub a: f64,
    /// Observation half-extent in `u = sin θ`.
    pub u_max: f64,
    pub r_min: f64,
    pub r_max: f64,
    /// Source samples per axis of `[-a, a]`.
    pub n_x: usize,
    pub n_u: usize,
    /// Samples of `s = r_max / r` on `[1, r_max / r_min]`.
    pub n_s: usize,
    /// Significance threshold in dB relative to the largest spectral value.
    pub tau_db: f64,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        Self::reference_case()
    }
}

impl ProblemConfig {
    /// The reference test case: `a = 10λ`, `u_max = 0.5`, `r ∈ [25λ, 100λ]`,
    /// with grids oversampling the expected 41 × 4 modes by at least 4×.
    pub fn reference_case() -> Self {
        Self {
            a: 10.0,
            u_max: 0.5,
            r_min: 25.0,
            r_max: 100.0,
            n_x: 121,
            n_u: 164,
            n_s: 32,
            tau_db: -40.0,
        }
    }

    /// Same geometry with different grid sizes.
    pub fn with_grids(mut self, n_x: usize, n_u: usize, n_s: usize) -> Self {
        self.n_x = n_x;
        self.n_u = n_u;
        self.n_s = n_s;
        self
    }

    pub fn beta(&self) -> f64 {
        BETA
    }

    /// Upper end of the `s = r_max / r` interval.
    pub fn s_max(&self) -> f64 {
        self.r_max / self.r_min
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let finite = |field, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::field(
                    field,
                    format!("must be finite, got {v}"),
                ))
            }
        };
        finite("a", self.a)?;
        finite("u_max", self.u_max)?;
        finite("r_min", self.r_min)?;
        finite("r_max", self.r_max)?;
        finite("tau_db", self.tau_db)?;

        if self.a <= 0.0 {
            return Err(ConfigError::field(
                "a",
                format!("must be positive, got {}", self.a),
            ));
        }
        if !(self.u_max > 0.0 && self.u_max <= 1.0) {
            return Err(ConfigError::field(
                "u_max",
                format!("must lie in (0, 1], got {}", self.u_max),
            ));
        }
        if self.r_min <= 0.0 {
            return Err(ConfigError::field(
                "r_min",
                format!("must be positive, got {}", self.r_min),
            ));
        }
        if self.r_min >= self.r_max {
            return Err(ConfigError::field(
                "r_min",
                format!("({}) must be less than r_max ({})", self.r_min, self.r_max),
            ));
        }
        for (field, n) in [("n_x", self.n_x), ("n_u", self.n_u), ("n_s", self.n_s)] {
            if n < 2 {
                return Err(ConfigError::field(
                    field,
                    format!("must be at least 2, got {n}"),
                ));
            }
        }
        if self.tau_db >= 0.0 {
            return Err(ConfigError::field(
                "tau_db",
                format!("must be negative, got {}", self.tau_db),
            ));
        }
        Ok(())
    }
}

/// Significance indices of the two Slepian sequences and their product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub m_u: f64,
    pub m_s: f64,
    pub m_bar: f64,
    pub m_u_ceil: u64,
    pub m_s_ceil: u64,
    pub m_bar_ceil: u64,
}

impl fmt::Display for BoundResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "M_u={} M_s={} M_bar={}",
            fmt_index(self.m_u),
            fmt_index(self.m_s),
            fmt_index(self.m_bar)
        )
    }
}

fn fmt_index(x: f64) -> String {
    if (x - x.round()).abs() <= CEIL_SLACK * x.abs() {
        format!("{}", x.round() as u64)
    } else {
        format!("{x:.4}")
    }
}

/// Round a real-valued index up, ignoring roundoff just above an integer.
pub fn ceil_index(x: f64) -> u64 {
    (x - CEIL_SLACK * x.abs()).ceil().max(0.0) as u64
}

/// `M_u = (4/π) β a u_max + 1`, `M_s = (β a² / 2π)(1/r_min − 1/r_max) + 1`,
/// and their product `M̄`, an upper bound on the data-space dimension.
pub fn compute_bounds(config: &ProblemConfig) -> Result<BoundResult, ConfigError> {
    config.validate()?;
    Ok(bounds_unchecked(config))
}

fn bounds_unchecked(config: &ProblemConfig) -> BoundResult {
    let m_u = 4.0 * BETA_OVER_PI * config.a * config.u_max + 1.0;
    // (1/r_min − 1/r_max) written over a common denominator: it is exact for
    // the reference case where the naive difference is not.
    let inv_span = (config.r_max - config.r_min) / (config.r_min * config.r_max);
    let m_s = 0.5 * BETA_OVER_PI * config.a * config.a * inv_span + 1.0;
    let m_bar = m_u * m_s;
    BoundResult {
        m_u,
        m_s,
        m_bar,
        m_u_ceil: ceil_index(m_u),
        m_s_ceil: ceil_index(m_s),
        m_bar_ceil: ceil_index(m_bar),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegimeWarning {
    /// `r_min < 2a`: the paraxial Fresnel approximation is questionable.
    FresnelDistance { r_min: f64, two_a: f64 },
    /// `u_max > 0.7`: observation angles strain paraxiality.
    Paraxiality { u_max: f64 },
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeWarning::FresnelDistance { r_min, two_a } => write!(
                f,
                "r_min = {r_min} is below 2a = {two_a}; the Fresnel approximation is questionable"
            ),
            RegimeWarning::Paraxiality { u_max } => {
                write!(f, "u_max = {u_max} exceeds 0.7; paraxiality is strained")
            }
        }
    }
}

pub const PARAXIAL_U_MAX: f64 = 0.7;

/// Heuristic validity checks. Never rejects a configuration.
pub fn validate_fresnel_regime(config: &ProblemConfig) -> Vec<RegimeWarning> {
    let mut warnings = Vec::new();
    if config.r_min < 2.0 * config.a {
        warnings.push(RegimeWarning::FresnelDistance {
            r_min: config.r_min,
            two_a: 2.0 * config.a,
        });
    }
    if config.u_max > PARAXIAL_U_MAX {
        warnings.push(RegimeWarning::Paraxiality {
            u_max: config.u_max,
        });
    }
    warnings
}
