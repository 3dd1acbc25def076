//! Paraxial Fresnel radiation operator of the strip source and the
//! quadratic data map `J ↦ |TJ|²`.

use num_complex::Complex64;

use crate::config::ProblemConfig;
use crate::grids::{Grid1D, TensorGrid2D};
use crate::operator::{ComplexOperatorMatrix, GridLayout, OperatorError};
use crate::Error;

/// Field samples on the flattened `(r, u)` observation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSamples(pub Vec<Complex64>);

impl FieldSamples {
    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Squared magnitudes `|E|²`.
    pub fn intensity(&self) -> Vec<f64> {
        self.0.iter().map(|e| e.norm_sqr()).collect()
    }
}

/// Kernel of `T` without quadrature weight:
/// `(βr)^{-1/2} exp(−jβr(1 + u²/2)) exp(−jβx²/(2r)) exp(jβux)`.
pub fn fresnel_kernel(beta: f64, r: f64, u: f64, x: f64) -> Complex64 {
    let phase = -beta * r * (1.0 + 0.5 * u * u) - beta * x * x / (2.0 * r) + beta * u * x;
    Complex64::from_polar(1.0 / (beta * r).sqrt(), phase)
}

/// Discretize `T` with rows on the `(r, u)` tensor grid (`u` fastest) and
/// columns on `x_grid`. Column quadrature weights are absorbed.
pub fn assemble_t(
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
    let nu = u.len();
    let t = ComplexOperatorMatrix::from_fn(
        GridLayout::Tensor(rows),
        GridLayout::Line(x_grid.clone()),
        true,
        |p, k| fresnel_kernel(beta, r[p / nu], u[p % nu], x[k]) * wx[k],
    )?;
    Ok(t)
}

pub fn apply_t(t: &ComplexOperatorMatrix, j: &[Complex64]) -> Result<FieldSamples, OperatorError> {
    t.apply(j).map(FieldSamples)
}

/// `|TJ|²` on the observation grid.
pub fn squared_field(
    t: &ComplexOperatorMatrix,
    j: &[Complex64],
) -> Result<Vec<f64>, OperatorError> {
    Ok(apply_t(t, j)?.intensity())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grids::{uniform_grid, x_grid};
    use std::f64::consts::PI;

    fn unit_source(n: usize) -> Vec<Complex64> {
        vec![Complex64::new(1.0, 0.0); n]
    }

    #[test]
    fn zero_source_radiates_nothing() {
        let cfg = ProblemConfig::reference_case().with_grids(21, 8, 4);
        let x = x_grid(&cfg).unwrap();
        let t = assemble_t(
            &cfg,
            &x,
            &uniform_grid(25.0, 100.0, 4).unwrap(),
            &uniform_grid(-0.5, 0.5, 8).unwrap(),
        )
        .unwrap();
        let zero = vec![Complex64::new(0.0, 0.0); x.len()];
        assert!(apply_t(&t, &zero)
            .unwrap()
            .values()
            .iter()
            .all(|e| e.norm() == 0.0));
        assert!(squared_field(&t, &zero).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn far_broadside_amplitude() {
        // At r = 10⁶ the chirp phase βa²/(2r) ≈ 3e-4 rad, so ∫J dx → 2a.
        let cfg = ProblemConfig::reference_case();
        let x = x_grid(&cfg).unwrap();
        let r = Grid1D::point(1e6).unwrap();
        let u = Grid1D::point(0.0).unwrap();
        let t = assemble_t(&cfg, &x, &r, &u).unwrap();
        let e = apply_t(&t, &unit_source(x.len())).unwrap().values()[0].norm();
        let expected = 20.0 / (2.0 * PI * 1e6f64).sqrt();
        assert!((e - expected).abs() / expected < 1e-3, "{e} vs {expected}");
        assert!((expected - 7.98e-3).abs() < 1e-5);
    }

    #[test]
    fn far_field_first_null() {
        // |E(u)| ∝ |sinc(βau)| with the first zero at u = 1/(2a) = 0.05.
        let cfg = ProblemConfig::reference_case();
        let x = x_grid(&cfg).unwrap();
        let u = uniform_grid(0.0, 0.1, 200).unwrap();
        let t = assemble_t(&cfg, &x, &Grid1D::point(1e6).unwrap(), &u).unwrap();
        let mag: Vec<f64> = apply_t(&t, &unit_source(x.len()))
            .unwrap()
            .values()
            .iter()
            .map(|e| e.norm())
            .collect();
        let first_min = (1..mag.len() - 1)
            .find(|&i| mag[i] < mag[i - 1] && mag[i] <= mag[i + 1])
            .unwrap();
        let spacing = 0.1 / 200.0;
        assert!((u.nodes()[first_min] - 0.05).abs() <= spacing);
    }

    #[test]
    fn unit_sample_picks_a_column() {
        let cfg = ProblemConfig::reference_case().with_grids(11, 6, 3);
        let x = x_grid(&cfg).unwrap();
        let t = assemble_t(
            &cfg,
            &x,
            &uniform_grid(25.0, 100.0, 3).unwrap(),
            &uniform_grid(-0.5, 0.5, 6).unwrap(),
        )
        .unwrap();
        let mut j = vec![Complex64::new(0.0, 0.0); x.len()];
        j[4] = Complex64::new(1.0, 0.0);
        let e = apply_t(&t, &j).unwrap();
        for (p, v) in e.values().iter().enumerate() {
            assert_eq!(*v, t.entries()[(p, 4)]);
        }
        assert!(apply_t(&t, &j[..3]).is_err());
    }
}
