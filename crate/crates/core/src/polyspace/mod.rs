//! Polynomial spaces on polygons: scaled monomials, Gauss rules, polygon
//! quadrature and polynomial L² projection.

mod basis;
mod gauss;

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::geometry::{self, Point};

pub use basis::{eval_poly, eval_poly_gradient, eval_poly_hessian, poly_dim, ScaledMonomialBasis};
pub use gauss::{gauss_legendre, EdgeQuadrature, MAX_GAUSS_POINTS};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("Gauss-Legendre rules need 1..=30 points, got {0}")]
    PointsOutOfRange(usize),
    #[error("degenerate polygon (area {0:e})")]
    DegeneratePolygon(f64),
    #[error("requested degree {requested} exceeds the basis degree {available}")]
    DegreeTooHigh { requested: usize, available: usize },
    #[error("singular Gram matrix")]
    SingularGram,
}

/// Points and positive weights on a polygon; the weights sum to its area.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonQuadrature {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl PolygonQuadrature {
    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Collapsed tensor Gauss rule on each triangle of the fan from the area
/// centroid. With `n = ⌊(degree + 3) / 2⌋` points per direction the rule is
/// exact up to `degree` (the collapse adds one degree in the radial variable).
pub fn polygon_quadrature(poly: &[Point], degree: usize) -> Result<PolygonQuadrature, QuadratureError> {
    let area = if poly.len() < 3 { 0.0 } else { geometry::signed_area(poly) };
    if !(area >= 1e-14) {
        return Err(QuadratureError::DegeneratePolygon(area));
    }
    let n = (degree + 3) / 2;
    let g = gauss_legendre(n)?;
    let c = geometry::centroid(poly);
    let mut points = Vec::with_capacity(poly.len() * n * n);
    let mut weights = Vec::with_capacity(poly.len() * n * n);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let twice = geometry::cross(&(a - c), &(b - a));
        if twice == 0.0 {
            continue;
        }
        // x = c + ξ (a − c) + ξη (b − a), Jacobian ξ · 2|T|.
        for (xi, wxi) in g.unit_interval() {
            for (eta, weta) in g.unit_interval() {
                points.push(c + (a - c) * xi + (b - a) * (xi * eta));
                weights.push(wxi * weta * xi * twice);
            }
        }
    }
    Ok(PolygonQuadrature { points, weights, degree })
}

/// `∫_K m_α` for every `m_α` of degree at most `up_to`.
pub fn monomial_moments(
    poly: &[Point],
    basis: &ScaledMonomialBasis,
    up_to: usize,
) -> Result<Vec<f64>, QuadratureError> {
    if up_to > basis.degree {
        return Err(QuadratureError::DegreeTooHigh { requested: up_to, available: basis.degree });
    }
    let quad = polygon_quadrature(poly, up_to)?;
    let b = basis.with_degree(up_to);
    let mut out = alloc::vec![0.0; b.dim()];
    for (p, w) in quad.iter() {
        for (o, m) in out.iter_mut().zip(b.eval(p)) {
            *o += w * m;
        }
    }
    Ok(out)
}

/// `∫_K m_i m_j` over the basis, with an exact rule.
pub fn gram_matrix(poly: &[Point], basis: &ScaledMonomialBasis) -> Result<DMatrix<f64>, QuadratureError> {
    let quad = polygon_quadrature(poly, 2 * basis.degree)?;
    let n = basis.dim();
    let mut gram = DMatrix::zeros(n, n);
    for (p, w) in quad.iter() {
        let m = DVector::from_vec(basis.eval(p));
        gram.ger(w, &m, &m, 1.0);
    }
    Ok(gram)
}

/// L² projection onto `P_target` of the polynomial `Σ coeffs_α m_α` (in
/// `basis`), returned as coefficients in the same scaling at degree `target`.
pub fn l2_project_polynomial(
    poly: &[Point],
    basis: &ScaledMonomialBasis,
    coeffs: &[f64],
    target: usize,
) -> Result<Vec<f64>, QuadratureError> {
    let tb = basis.with_degree(target);
    let quad = polygon_quadrature(poly, target + basis.degree)?;
    let (nt, ns) = (tb.dim(), basis.dim());
    let mut gram = DMatrix::zeros(nt, nt);
    let mut rhs = DVector::zeros(nt);
    let c = DVector::from_column_slice(&coeffs[..ns]);
    for (p, w) in quad.iter() {
        let mt = DVector::from_vec(tb.eval(p));
        let src = DVector::from_vec(basis.eval(p)).dot(&c);
        gram.ger(w, &mt, &mt, 1.0);
        rhs.axpy(w * src, &mt, 1.0);
    }
    let chol = gram.cholesky().ok_or(QuadratureError::SingularGram)?;
    Ok(chol.solve(&rhs).as_slice().to_vec())
}
