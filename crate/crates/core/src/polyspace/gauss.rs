use alloc::vec;
use alloc::vec::Vec;

use nalgebra::ComplexField;

use super::QuadratureError;
use crate::geometry::Point;

/// A rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeQuadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub const MAX_GAUSS_POINTS: usize = 30;

/// `n`-point Gauss–Legendre rule, nodes ascending. Exact for polynomials of
/// degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Result<EdgeQuadrature, QuadratureError> {
    if n == 0 || n > MAX_GAUSS_POINTS {
        return Err(QuadratureError::PointsOutOfRange(n));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Newton's method on P_n from the Tricomi initial guess.
        let mut z = ComplexField::cos(core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (0.0, 1.0);
            for j in 1..=n {
                let jf = j as f64;
                let p2 = p0;
                p0 = p1;
                p1 = ((2.0 * jf - 1.0) * z * p0 - (jf - 1.0) * p2) / jf;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(EdgeQuadrature { nodes, weights })
}

impl EdgeQuadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[0, 1]`.
    pub fn unit_interval(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().zip(&self.weights).map(|(&t, &w)| (0.5 * (t + 1.0), 0.5 * w))
    }

    /// Points and arclength weights on the segment `a → b`.
    pub fn on_segment(&self, a: Point, b: Point) -> impl Iterator<Item = (Point, f64)> + '_ {
        let len = (b - a).norm();
        self.unit_interval().map(move |(s, w)| (a + (b - a) * s, w * len))
    }
}
