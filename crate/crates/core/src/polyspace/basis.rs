use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Matrix2, Vector2};

use crate::geometry::Point;

/// `m_α(x) = ((x − centroid) / h)^α`, ordered by total degree and, within a
/// degree, by decreasing power of the first coordinate:
/// `1, ξ, η, ξ², ξη, η², ξ³, …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledMonomialBasis {
    pub centroid: Point,
    pub h: f64,
    pub degree: usize,
}

/// `dim P_d = (d + 1)(d + 2) / 2`.
pub const fn poly_dim(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

impl ScaledMonomialBasis {
    pub fn new(centroid: Point, h: f64, degree: usize) -> Self {
        Self { centroid, h, degree }
    }

    pub fn dim(&self) -> usize {
        poly_dim(self.degree)
    }

    /// The same scaling at another degree.
    pub fn with_degree(&self, degree: usize) -> Self {
        Self { degree, ..*self }
    }

    pub fn exponent(i: usize) -> (usize, usize) {
        let mut d = 0;
        while poly_dim(d) <= i {
            d += 1;
        }
        let b = i + d + 1 - poly_dim(d);
        (d - b, b)
    }

    pub fn index(a: usize, b: usize) -> usize {
        let d = a + b;
        d * (d + 1) / 2 + b
    }

    fn powers(&self, p: Point) -> (Vec<f64>, Vec<f64>) {
        let s = (p - self.centroid) / self.h;
        let mut xs = vec![1.0; self.degree + 1];
        let mut ys = vec![1.0; self.degree + 1];
        for i in 1..=self.degree {
            xs[i] = xs[i - 1] * s.x;
            ys[i] = ys[i - 1] * s.y;
        }
        (xs, ys)
    }

    pub fn eval(&self, p: Point) -> Vec<f64> {
        let (xs, ys) = self.powers(p);
        (0..self.dim())
            .map(|i| {
                let (a, b) = Self::exponent(i);
                xs[a] * ys[b]
            })
            .collect()
    }

    pub fn gradients(&self, p: Point) -> Vec<Vector2<f64>> {
        let (xs, ys) = self.powers(p);
        let ih = 1.0 / self.h;
        (0..self.dim())
            .map(|i| {
                let (a, b) = Self::exponent(i);
                let dx = if a > 0 { a as f64 * xs[a - 1] * ys[b] * ih } else { 0.0 };
                let dy = if b > 0 { b as f64 * xs[a] * ys[b - 1] * ih } else { 0.0 };
                Vector2::new(dx, dy)
            })
            .collect()
    }

    pub fn hessians(&self, p: Point) -> Vec<Matrix2<f64>> {
        let (xs, ys) = self.powers(p);
        let ih2 = 1.0 / (self.h * self.h);
        (0..self.dim())
            .map(|i| {
                let (a, b) = Self::exponent(i);
                let (af, bf) = (a as f64, b as f64);
                let xx = if a > 1 { af * (af - 1.0) * xs[a - 2] * ys[b] } else { 0.0 };
                let yy = if b > 1 { bf * (bf - 1.0) * xs[a] * ys[b - 2] } else { 0.0 };
                let xy = if a > 0 && b > 0 { af * bf * xs[a - 1] * ys[b - 1] } else { 0.0 };
                Matrix2::new(xx, xy, xy, yy) * ih2
            })
            .collect()
    }

    /// Gradient of `∇ Δ m_α` for every basis function (third derivatives).
    pub fn grad_laplacians(&self, p: Point) -> Vec<Vector2<f64>> {
        let (xs, ys) = self.powers(p);
        let ih3 = 1.0 / (self.h * self.h * self.h);
        let d3 = |a: usize, b: usize, da: usize, db: usize| -> f64 {
            if a < da || b < db {
                return 0.0;
            }
            let fa: f64 = (0..da).map(|k| (a - k) as f64).product();
            let fb: f64 = (0..db).map(|k| (b - k) as f64).product();
            fa * fb * xs[a - da] * ys[b - db]
        };
        (0..self.dim())
            .map(|i| {
                let (a, b) = Self::exponent(i);
                Vector2::new(d3(a, b, 3, 0) + d3(a, b, 1, 2), d3(a, b, 2, 1) + d3(a, b, 0, 3)) * ih3
            })
            .collect()
    }
}

/// `Σ_α c_α m_α(p)`.
pub fn eval_poly(basis: &ScaledMonomialBasis, coeffs: &[f64], p: Point) -> f64 {
    basis.eval(p).iter().zip(coeffs).map(|(m, c)| m * c).sum()
}

pub fn eval_poly_gradient(basis: &ScaledMonomialBasis, coeffs: &[f64], p: Point) -> Vector2<f64> {
    basis.gradients(p).iter().zip(coeffs).fold(Vector2::zeros(), |acc, (g, c)| acc + g * *c)
}

pub fn eval_poly_hessian(basis: &ScaledMonomialBasis, coeffs: &[f64], p: Point) -> Matrix2<f64> {
    basis.hessians(p).iter().zip(coeffs).fold(Matrix2::zeros(), |acc, (h, c)| acc + h * *c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;

    #[test]
    fn ordering() {
        let expect = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(ScaledMonomialBasis::exponent(i), e);
            assert_eq!(ScaledMonomialBasis::index(e.0, e.1), i);
        }
        assert_eq!(poly_dim(3), 10);
    }

    #[test]
    fn vanishing_at_centroid() {
        let b = ScaledMonomialBasis::new(point(0.3, -0.2), 0.7, 4);
        let (v, g, h) = (b.eval(b.centroid), b.gradients(b.centroid), b.hessians(b.centroid));
        for i in 0..b.dim() {
            let (x, y) = ScaledMonomialBasis::exponent(i);
            let d = x + y;
            if d > 0 {
                assert_eq!(v[i], 0.0);
            }
            if d > 1 {
                assert_eq!(g[i], Vector2::zeros());
            }
            if d > 2 {
                assert_eq!(h[i], Matrix2::zeros());
            }
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let b = ScaledMonomialBasis::new(point(0.1, 0.2), 0.5, 3);
        let p = point(0.37, -0.11);
        let eps = 1e-5;
        let ex = point(eps, 0.0);
        let ey = point(0.0, eps);
        for i in 0..b.dim() {
            let fd_x = (b.eval(p + ex)[i] - b.eval(p - ex)[i]) / (2.0 * eps);
            let fd_y = (b.eval(p + ey)[i] - b.eval(p - ey)[i]) / (2.0 * eps);
            assert!((b.gradients(p)[i] - Vector2::new(fd_x, fd_y)).norm() < 1e-7);
            let hx = (b.gradients(p + ex)[i] - b.gradients(p - ex)[i]) / (2.0 * eps);
            assert!((b.hessians(p)[i].column(0) - hx).norm() < 1e-6);
            let lap = |q: Point| b.hessians(q)[i].trace();
            let gl = Vector2::new((lap(p + ex) - lap(p - ex)) / (2.0 * eps), (lap(p + ey) - lap(p - ey)) / (2.0 * eps));
            assert!((b.grad_laplacians(p)[i] - gl).norm() < 1e-5);
        }
    }
}
