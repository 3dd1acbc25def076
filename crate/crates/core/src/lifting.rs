//! The lifted operator `A`, which maps `F(x, x̄) = J(x) J*(x̄)` linearly to
//! `|E(r, u)|²`, its plain and weighted adjoints, and the enclosing-rectangle
//! approximation of the `AA_w†` kernel.
//!
//! The weight `w(x, x̄) = 2|x̄ − x| / r_max` is the reciprocal of the Jacobian
//! of `(x, x̄) ↦ (X1, X2) = (x̄ − x, (x̄² − x²)/r_max)`. With it the `AA_w†`
//! kernel becomes an integral of plane waves over the image domain, which the
//! approximation replaces by the rectangle `[−2a, 2a] × [−a²/r_max, a²/r_max]`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error as ThisError;

use crate::config::ProblemConfig;
use crate::grids::{pair_grid, Grid1D, TensorGrid2D};
use crate::operator::{ComplexOperatorMatrix, GridLayout, RealOperatorMatrix};
use crate::slepian::sinc;
use crate::Error;

#[derive(Debug, Clone, PartialEq, ThisError)]
pub enum LiftingError {
    #[error("weight is undefined on the diagonal x = x̄ = {0}")]
    DiagonalPoint(f64),
    #[error("operator columns are not a quadrature-absorbed (x, x̄) pair grid")]
    NotLifted,
}

/// Samples of `F(x_k, x̄_l)` on the pair grid, flattened with `l` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedUnknown(pub Vec<Complex64>);

impl LiftedUnknown {
    /// The rank-one lift `F = J J^H`.
    pub fn from_source(j: &[Complex64]) -> Self {
        LiftedUnknown(
            j.iter()
                .flat_map(|jk| j.iter().map(move |jl| jk * jl.conj()))
                .collect(),
        )
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }
}

/// Discretize `A` with rows on the `(r, u)` grid and columns on `(x, x̄)`.
/// Both source quadrature weights are absorbed.
pub fn assemble_a(
    config: &ProblemConfig,
    x_grid: &Grid1D,
    r_grid: &Grid1D,
    u_grid: &Grid1D,
) -> Result<ComplexOperatorMatrix, Error> {
    config.validate()?;
    let beta = config.beta();
    let rows = TensorGrid2D::new(r_grid.clone(), u_grid.clone());
    let x = x_grid.nodes();
    let wx = x_grid.weights();
    let (r, u) = (r_grid.nodes(), u_grid.nodes());
    let (nu, nx) = (u.len(), x.len());
    let a = ComplexOperatorMatrix::from_fn(
        GridLayout::Tensor(rows),
        GridLayout::Tensor(pair_grid(x_grid)),
        true,
        |p, q| {
            let (ri, uj) = (r[p / nu], u[p % nu]);
            let (k, l) = (q / nx, q % nx);
            let (xk, xl) = (x[k], x[l]);
            let phase = beta * (xl * xl - xk * xk) / (2.0 * ri) - beta * uj * (xl - xk);
            Complex64::from_polar(wx[k] * wx[l] / (beta * ri), phase)
        },
    )?;
    Ok(a)
}

/// `w(x, x̄) = 2|x̄ − x| / r_max`; undefined on the diagonal.
pub fn weight_function(x: f64, x_bar: f64, r_max: f64) -> Result<f64, LiftingError> {
    if x == x_bar {
        return Err(LiftingError::DiagonalPoint(x));
    }
    Ok(2.0 * (x_bar - x).abs() / r_max)
}

/// Discretize `A†` (or `A_w†` when `weighted`) from an assembled `A`.
///
/// Rows live on the `(x, x̄)` grid and columns on the data grid, whose
/// quadrature weights are absorbed. In the weighted case the diagonal pairs
/// `x_k = x̄_k` get weight zero: the diagonal is a null set of the continuous
/// integral, and the weight itself vanishes there.
pub fn assemble_a_adjoint(
    a: &ComplexOperatorMatrix,
    weighted: bool,
    config: &ProblemConfig,
) -> Result<ComplexOperatorMatrix, Error> {
    config.validate()?;
    let pairs = match a.col_grid() {
        GridLayout::Tensor(g) if a.quadrature_absorbed() => g.clone(),
        _ => return Err(LiftingError::NotLifted.into()),
    };
    let data_weights = a.row_grid().weights();
    let pair_weights = pairs.weights();
    let pair_factor: Vec<f64> = (0..pairs.len())
        .map(|q| {
            let scale = 1.0 / pair_weights[q];
            if !weighted {
                return scale;
            }
            let (x, x_bar) = pairs.node(q);
            weight_function(x, x_bar, config.r_max).map_or(0.0, |w| w * scale)
        })
        .collect();
    let entries = a.entries();
    let adj = ComplexOperatorMatrix::from_fn(
        GridLayout::Tensor(pairs),
        a.row_grid().clone(),
        true,
        |q, p| entries[(p, q)].conj() * (pair_factor[q] * data_weights[p]),
    )?;
    Ok(adj)
}

/// Image of `(x, x̄)` under `X1 = x̄ − x`, `X2 = (x̄² − x²)/r_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftedPoint {
    pub x1: f64,
    pub x2: f64,
    /// `x = x̄`, which maps to the excluded origin.
    pub diagonal: bool,
}

pub fn map_to_lifted(x: f64, x_bar: f64, r_max: f64) -> LiftedPoint {
    LiftedPoint {
        x1: x_bar - x,
        x2: (x_bar * x_bar - x * x) / r_max,
        diagonal: x == x_bar,
    }
}

/// Closed bounding box `[x1_min, x1_max] × [x2_min, x2_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundingBox {
    pub x1: (f64, f64),
    pub x2: (f64, f64),
}

impl BoundingBox {
    pub fn contains(&self, x1: f64, x2: f64) -> bool {
        x1 >= self.x1.0 && x1 <= self.x1.1 && x2 >= self.x2.0 && x2 <= self.x2.1
    }
}

/// The rectangle `[−2a, 2a] × [−a²/r_max, a²/r_max]` enclosing the image domain.
pub fn enclosing_rectangle(config: &ProblemConfig) -> BoundingBox {
    let h = config.a * config.a / config.r_max;
    BoundingBox {
        x1: (-2.0 * config.a, 2.0 * config.a),
        x2: (-h, h),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftedDomainSample {
    pub points: Vec<(f64, f64)>,
    pub bbox: BoundingBox,
}

/// Images of the off-diagonal pairs of an `(n_samples + 1)`-point grid on
/// `[−a, a]` (endpoints included), so the extreme points `(±2a, 0)` appear.
pub fn sample_lifted_domain(config: &ProblemConfig, n_samples: usize) -> LiftedDomainSample {
    let n = n_samples.max(1);
    let a = config.a;
    let axis: Vec<f64> = (0..=n)
        .map(|k| -a + 2.0 * a * k as f64 / n as f64)
        .collect();
    let points: Vec<(f64, f64)> = axis
        .iter()
        .flat_map(|&x| axis.iter().map(move |&xb| (x, xb)))
        .map(|(x, xb)| map_to_lifted(x, xb, config.r_max))
        .filter(|p| !p.diagonal)
        .map(|p| (p.x1, p.x2))
        .collect();
    let fold = |f: fn(&(f64, f64)) -> f64| {
        points
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
    };
    let bbox = BoundingBox {
        x1: fold(|p| p.0),
        x2: fold(|p| p.1),
    };
    LiftedDomainSample { points, bbox }
}

/// Prefactor `8a³ / (β² r_max)` of the approximated kernel.
fn kernel_prefactor(config: &ProblemConfig) -> f64 {
    let beta = config.beta();
    8.0 * config.a.powi(3) / (beta * beta * config.r_max)
}

/// `(8a³/β²r_max) (1/(r r_o)) sinc((βa²/2)(1/r_o − 1/r)) sinc(2βa(u_o − u))`,
/// with `sinc(t) = sin(t)/t`.
pub fn approx_kernel_h(r: f64, r_o: f64, u: f64, u_o: f64, config: &ProblemConfig) -> f64 {
    let beta = config.beta();
    let a = config.a;
    kernel_prefactor(config) / (r * r_o)
        * sinc(0.5 * beta * a * a * (1.0 / r_o - 1.0 / r))
        * sinc(2.0 * beta * a * (u_o - u))
}

/// Bandwidth of the `s`-axis sinc factor, `βa² / (2 r_max)`.
pub fn s_bandwidth(config: &ProblemConfig) -> f64 {
    0.5 * config.beta() * config.a * config.a / config.r_max
}

/// Bandwidth of the `u`-axis sinc factor, `2βa`.
pub fn u_bandwidth(config: &ProblemConfig) -> f64 {
    2.0 * config.beta() * config.a
}

/// Prefactor `8a³ / (β² r_max²)` of the approximated operator in `s`.
pub fn approx_operator_prefactor(config: &ProblemConfig) -> f64 {
    kernel_prefactor(config) / config.r_max
}

/// Discretize the approximated `AA_w†` in `s = r_max / r` on the `(s, u)`
/// grid (`u` fastest), quadrature weights absorbed.
///
/// Without `symmetrized` the kernel carries the factor `s_o / s`; with it
/// that factor is removed by the diagonal similarity `v ↦ v / s`, leaving a
/// real symmetric difference kernel.
pub fn assemble_aadag_approx(
    config: &ProblemConfig,
    s_grid: &Grid1D,
    u_grid: &Grid1D,
    symmetrized: bool,
) -> Result<RealOperatorMatrix, Error> {
    config.validate()?;
    let grid = TensorGrid2D::new(s_grid.clone(), u_grid.clone());
    let weights = grid.weights();
    let (s, u) = (s_grid.nodes(), u_grid.nodes());
    let nu = u.len();
    let c = approx_operator_prefactor(config);
    let (omega_s, omega_u) = (s_bandwidth(config), u_bandwidth(config));
    let m = RealOperatorMatrix::from_fn(
        GridLayout::Tensor(grid.clone()),
        GridLayout::Tensor(grid),
        true,
        |o, q| {
            let (so, uo) = (s[o / nu], u[o % nu]);
            let (sq, uq) = (s[q / nu], u[q % nu]);
            let ratio = if symmetrized { 1.0 } else { so / sq };
            c * ratio * sinc(omega_s * (so - sq)) * sinc(omega_u * (uo - uq)) * weights[q]
        },
    )?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{assemble_t, squared_field};
    use crate::grids::{r_grid_from_s, s_grid_from_r, u_grid, x_grid};
    use crate::operator::hermitian_defect;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn small() -> ProblemConfig {
        ProblemConfig::reference_case().with_grids(9, 12, 4)
    }

    fn grids(cfg: &ProblemConfig) -> (Grid1D, Grid1D, Grid1D) {
        let s = s_grid_from_r(cfg).unwrap();
        (
            x_grid(cfg).unwrap(),
            r_grid_from_s(&s, cfg.r_max).unwrap(),
            u_grid(cfg).unwrap(),
        )
    }

    #[test]
    fn weight_values() {
        assert_relative_eq!(weight_function(-1.0, 1.0, 100.0).unwrap(), 0.04);
        assert_relative_eq!(weight_function(0.0, 10.0, 100.0).unwrap(), 0.2);
        assert_eq!(
            weight_function(3.0, 3.0, 100.0),
            Err(LiftingError::DiagonalPoint(3.0))
        );
    }

    #[test]
    fn lifted_map_values() {
        let p = map_to_lifted(0.0, 10.0, 100.0);
        assert_eq!((p.x1, p.x2, p.diagonal), (10.0, 1.0, false));
        let p = map_to_lifted(-10.0, 10.0, 100.0);
        assert_eq!((p.x1, p.x2), (20.0, 0.0));
        let p = map_to_lifted(5.0, 5.0, 100.0);
        assert_eq!((p.x1, p.x2, p.diagonal), (0.0, 0.0, true));
    }

    #[test]
    fn lifted_domain_fills_the_rectangle() {
        let cfg = ProblemConfig::reference_case();
        let sample = sample_lifted_domain(&cfg, 40);
        let rect = enclosing_rectangle(&cfg);
        assert_eq!(rect.x1, (-20.0, 20.0));
        assert_eq!(rect.x2, (-1.0, 1.0));
        assert_eq!(sample.bbox.x1, (-20.0, 20.0));
        assert_eq!(sample.bbox.x2, (-1.0, 1.0));
        assert!(sample.points.iter().all(|&(x1, x2)| rect.contains(x1, x2)));
        assert!(!sample.points.contains(&(0.0, 0.0)));
    }

    #[test]
    fn single_sample_hits_the_box_edge() {
        let sample = sample_lifted_domain(&ProblemConfig::reference_case(), 1);
        assert!(sample.points.contains(&(20.0, 0.0)));
        assert!(sample.points.contains(&(-20.0, 0.0)));
    }

    #[test]
    fn approx_kernel_on_the_diagonal() {
        let cfg = ProblemConfig::reference_case();
        let h = approx_kernel_h(50.0, 50.0, 0.1, 0.1, &cfg);
        assert_relative_eq!(
            h,
            8000.0 / (4.0 * PI * PI * 100.0 * 2500.0),
            max_relative = 1e-14
        );
        assert!((h - 8.105e-4).abs() < 1e-7);
    }

    #[test]
    fn approx_kernel_first_u_null() {
        // 2βaΔu = π at Δu = 1/(4a) = 0.025.
        let cfg = ProblemConfig::reference_case();
        let before = approx_kernel_h(50.0, 50.0, 0.0, 0.024, &cfg);
        let after = approx_kernel_h(50.0, 50.0, 0.0, 0.026, &cfg);
        assert!(before > 0.0 && after < 0.0);
        assert!(approx_kernel_h(50.0, 50.0, 0.0, 0.025, &cfg).abs() < 1e-15);
    }

    #[test]
    fn lifting_reproduces_squared_field() {
        let cfg = small();
        let (x, r, u) = grids(&cfg);
        let a = assemble_a(&cfg, &x, &r, &u).unwrap();
        let t = assemble_t(&cfg, &x, &r, &u).unwrap();
        let j: Vec<Complex64> = (0..x.len())
            .map(|k| Complex64::new((k as f64 * 0.7).cos(), (k as f64 * 1.3).sin()))
            .collect();
        let lifted = a.apply(LiftedUnknown::from_source(&j).values()).unwrap();
        let direct = squared_field(&t, &j).unwrap();
        let peak = direct.iter().cloned().fold(0.0, f64::max);
        for (l, d) in lifted.iter().zip(&direct) {
            assert!((l - d).norm() / peak < 1e-12);
        }
    }

    #[test]
    fn lifting_of_a_unit_sample() {
        // F = e_k e_k^H: A F picks the weight-squared column of |T e_k|².
        let cfg = small();
        let (x, r, u) = grids(&cfg);
        let a = assemble_a(&cfg, &x, &r, &u).unwrap();
        let t = assemble_t(&cfg, &x, &r, &u).unwrap();
        let k = 3;
        let mut j = vec![Complex64::new(0.0, 0.0); x.len()];
        j[k] = Complex64::new(1.0, 0.0);
        let af = a.apply(LiftedUnknown::from_source(&j).values()).unwrap();
        let wk = x.weights()[k];
        for (p, v) in af.iter().enumerate() {
            let col = t.entries()[(p, k)].norm_sqr();
            assert_relative_eq!(v.re, col, max_relative = 1e-12);
            assert_relative_eq!(
                v.re,
                1.0 / (2.0 * PI * r.nodes()[p / u.len()]) * wk * wk,
                max_relative = 1e-12
            );
        }
        let zero = vec![Complex64::new(0.0, 0.0); a.ncols()];
        assert!(a.apply(&zero).unwrap().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn plain_gram_is_hermitian_psd() {
        let cfg = small();
        let (x, r, u) = grids(&cfg);
        let a = assemble_a(&cfg, &x, &r, &u).unwrap();
        let adj = assemble_a_adjoint(&a, false, &cfg).unwrap();
        let aadag = a.compose(&adj).unwrap();
        // A·A† carries the data weights on its columns; W^½ (·) W^-½ is Hermitian.
        let w = aadag.col_grid().weights();
        let sw: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
        let isw: Vec<f64> = sw.iter().map(|v| 1.0 / v).collect();
        let h = aadag.scaled(&sw, &isw).unwrap();
        assert!(hermitian_defect(h.as_ref()) < 1e-13);
        let ev = h.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        let max = ev.iter().cloned().fold(0.0, f64::max);
        assert!(ev.iter().all(|&l| l > -1e-10 * max));
    }

    #[test]
    fn weighted_adjoint_zeroes_the_diagonal() {
        let cfg = small();
        let (x, r, u) = grids(&cfg);
        let a = assemble_a(&cfg, &x, &r, &u).unwrap();
        let adj = assemble_a_adjoint(&a, true, &cfg).unwrap();
        let n = x.len();
        for k in 0..n {
            let row = k * n + k;
            assert!((0..adj.ncols()).all(|p| adj.entries()[(row, p)].norm() == 0.0));
        }
        let off = 1;
        assert!(adj.entries()[(off, 0)].norm() > 0.0);
    }

    #[test]
    fn adjoint_requires_a_lifted_operator() {
        let cfg = small();
        let (x, r, u) = grids(&cfg);
        let t = assemble_t(&cfg, &x, &r, &u).unwrap();
        assert!(matches!(
            assemble_a_adjoint(&t, false, &cfg),
            Err(Error::Lifting(LiftingError::NotLifted))
        ));
    }

    #[test]
    fn symmetrized_approx_is_symmetric() {
        let cfg = ProblemConfig::reference_case().with_grids(9, 20, 6);
        let (s, u) = (s_grid_from_r(&cfg).unwrap(), u_grid(&cfg).unwrap());
        let m = assemble_aadag_approx(&cfg, &s, &u, true).unwrap();
        assert!(m.hermitian_defect() < 1e-14);
        let c = 8.0 * 1000.0 / (4.0 * PI * PI * 1e4);
        let w = s.weights()[0] * u.weights()[0];
        assert_relative_eq!(m.entries()[(7, 7)], c * w, max_relative = 1e-14);
        let plain = assemble_aadag_approx(&cfg, &s, &u, false).unwrap();
        assert!(plain.hermitian_defect() > 1e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn hermitian_unknowns_give_real_data(seed in 0u64..1000) {
            let cfg = ProblemConfig::reference_case().with_grids(7, 6, 3);
            let (x, r, u) = grids(&cfg);
            let a = assemble_a(&cfg, &x, &r, &u).unwrap();
            let n = x.len();
            let z = |k: usize, l: usize| {
                let t = (seed as f64 + 1.0) * (k as f64 * 1.7 + l as f64 * 0.3);
                Complex64::new(t.sin(), (0.5 * t).cos())
            };
            // F(x, x̄) = G + G^H is Hermitian.
            let f: Vec<Complex64> = (0..n * n)
                .map(|q| { let (k, l) = (q / n, q % n); z(k, l) + z(l, k).conj() })
                .collect();
            let out = a.apply(&f).unwrap();
            let peak = out.iter().map(|v| v.norm()).fold(0.0, f64::max);
            prop_assert!(out.iter().all(|v| v.im.abs() <= 1e-10 * peak));
        }

        #[test]
        fn lifted_images_stay_in_the_rectangle(
            x in -10.0f64..10.0,
            xb in -10.0f64..10.0,
        ) {
            let cfg = ProblemConfig::reference_case();
            let p = map_to_lifted(x, xb, cfg.r_max);
            prop_assert!(enclosing_rectangle(&cfg).contains(p.x1, p.x2));
        }
    }
}
