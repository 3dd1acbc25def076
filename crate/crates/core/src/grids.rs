//! Midpoint quadrature grids on the source and observation domains.

use serde::Serialize;
use thiserror::Error;

use crate::config::{ConfigError, ProblemConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid interval [{lo}, {hi}] with {n} points")]
    InvalidInterval { lo: f64, hi: f64, n: usize },
    #[error("grid nodes must be finite and strictly ascending")]
    Unordered,
    #[error("grid weights must be finite and positive")]
    BadWeights,
    #[error("node and weight counts differ ({nodes} vs {weights})")]
    LengthMismatch { nodes: usize, weights: usize },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// Quadrature nodes and weights on `[lo, hi]`.
///
/// Grids from [`uniform_grid`] have weights summing to `hi - lo`. Grids
/// obtained through a change of variables ([`r_grid_from_s`]) carry the
/// Jacobian in their weights instead.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid1D {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    interval: (f64, f64),
}

impl Grid1D {
    /// Build a grid from explicit nodes and weights. Nodes must be strictly
    /// ascending and inside `interval`; weights must be positive.
    pub fn from_parts(
        nodes: Vec<f64>,
        weights: Vec<f64>,
        interval: (f64, f64),
    ) -> Result<Self, GridError> {
        if nodes.len() != weights.len() {
            return Err(GridError::LengthMismatch {
                nodes: nodes.len(),
                weights: weights.len(),
            });
        }
        let (lo, hi) = interval;
        if nodes.is_empty()
            || lo.partial_cmp(&hi).is_none_or(|o| o.is_gt())
            || !lo.is_finite()
            || !hi.is_finite()
        {
            return Err(GridError::InvalidInterval {
                lo,
                hi,
                n: nodes.len(),
            });
        }
        let ascending = nodes.windows(2).all(|w| w[0] < w[1]);
        let inside = nodes.iter().all(|&x| x.is_finite() && x >= lo && x <= hi);
        if !ascending || !inside {
            return Err(GridError::Unordered);
        }
        if weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(GridError::BadWeights);
        }
        Ok(Self {
            nodes,
            weights,
            interval,
        })
    }

    /// A single evaluation point with unit weight.
    pub fn point(x: f64) -> Result<Self, GridError> {
        Self::from_parts(vec![x], vec![1.0], (x, x))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Whether all weights are equal (to roundoff).
    pub fn is_uniform(&self) -> bool {
        let w0 = self.weights[0];
        self.weights.iter().all(|w| (w - w0).abs() <= 1e-14 * w0)
    }
}

/// Midpoint rule with `n` cells: nodes `lo + (k + ½)h`, weights `h`.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Result<Grid1D, GridError> {
    if n < 2
        || lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less)
        || !lo.is_finite()
        || !hi.is_finite()
    {
        return Err(GridError::InvalidInterval { lo, hi, n });
    }
    let h = (hi - lo) / n as f64;
    let nodes = (0..n).map(|k| lo + (k as f64 + 0.5) * h).collect();
    Ok(Grid1D {
        nodes,
        weights: vec![h; n],
        interval: (lo, hi),
    })
}

/// Source grid on `[-a, a]` with `n_x` points.
pub fn x_grid(config: &ProblemConfig) -> Result<Grid1D, GridError> {
    config.validate()?;
    uniform_grid(-config.a, config.a, config.n_x)
}

/// Observation grid in `u` on `[-u_max, u_max]`.
pub fn u_grid(config: &ProblemConfig) -> Result<Grid1D, GridError> {
    config.validate()?;
    uniform_grid(-config.u_max, config.u_max, config.n_u)
}

/// Uniform grid in `s = r_max / r` on `[1, r_max / r_min]`.
pub fn s_grid_from_r(config: &ProblemConfig) -> Result<Grid1D, GridError> {
    config.validate()?;
    uniform_grid(1.0, config.s_max(), config.n_s)
}

/// Radial grid induced by an `s` grid: `r = r_max / s`, `dr = (r_max / s²) ds`.
/// Nodes are returned ascending in `r` (descending in `s`).
pub fn r_grid_from_s(s_grid: &Grid1D, r_max: f64) -> Result<Grid1D, GridError> {
    let (s_lo, s_hi) = s_grid.interval();
    let (nodes, weights): (Vec<f64>, Vec<f64>) = s_grid
        .nodes()
        .iter()
        .zip(s_grid.weights())
        .rev()
        .map(|(&s, &w)| (r_max / s, w * r_max / (s * s)))
        .unzip();
    Grid1D::from_parts(nodes, weights, (r_max / s_hi, r_max / s_lo))
}

/// Tensor product of two grids, flattened with `axis2` fastest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorGrid2D {
    axis1: Grid1D,
    axis2: Grid1D,
}

impl TensorGrid2D {
    pub fn new(axis1: Grid1D, axis2: Grid1D) -> Self {
        Self { axis1, axis2 }
    }

    pub fn axis1(&self) -> &Grid1D {
        &self.axis1
    }

    pub fn axis2(&self) -> &Grid1D {
        &self.axis2
    }

    pub fn len(&self) -> usize {
        self.axis1.len() * self.axis2.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Split a flat index into `(axis1, axis2)` indices.
    pub fn split(&self, flat: usize) -> (usize, usize) {
        (flat / self.axis2.len(), flat % self.axis2.len())
    }

    pub fn node(&self, flat: usize) -> (f64, f64) {
        let (i, j) = self.split(flat);
        (self.axis1.nodes[i], self.axis2.nodes[j])
    }

    pub fn weight(&self, flat: usize) -> f64 {
        let (i, j) = self.split(flat);
        self.axis1.weights[i] * self.axis2.weights[j]
    }

    pub fn weights(&self) -> Vec<f64> {
        self.axis1
            .weights
            .iter()
            .flat_map(|w1| self.axis2.weights.iter().map(move |w2| w1 * w2))
            .collect()
    }
}

/// The `(r, u)` observation grid, with `r` induced by the uniform `s` grid.
pub fn observation_grid(config: &ProblemConfig) -> Result<TensorGrid2D, GridError> {
    let r = r_grid_from_s(&s_grid_from_r(config)?, config.r_max)?;
    Ok(TensorGrid2D::new(r, u_grid(config)?))
}

/// The `(s, u)` grid on which the closed-form approximation is discretized.
pub fn su_grid(config: &ProblemConfig) -> Result<TensorGrid2D, GridError> {
    Ok(TensorGrid2D::new(s_grid_from_r(config)?, u_grid(config)?))
}

/// Source pairs `(x, x̄)` on `[-a, a]²`, with `x̄` fastest.
pub fn pair_grid(x: &Grid1D) -> TensorGrid2D {
    TensorGrid2D::new(x.clone(), x.clone())
}
