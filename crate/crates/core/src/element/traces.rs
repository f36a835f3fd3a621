//! Traces of a local virtual function on one edge.
//!
//! Along an edge the value is the cubic Hermite interpolant of the endpoint
//! values and tangential derivatives. The outward normal derivative is
//! linear between the endpoint values for k = 2; for k = 3 it is the
//! quadratic that also reproduces the moment `∫_e ∂v/∂n dξ`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DVector, Vector2};

use super::{EdgeGeometry, ElementError, ElementSpec, LocalDofLayout};

/// A polynomial in the edge parameter `t = ξ / |e| ∈ [0, 1]`, power basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgePolynomial {
    pub coeffs: Vec<f64>,
    pub length: f64,
}

impl EdgePolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    /// Derivative with respect to arclength.
    pub fn arclength_derivative(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (i, c) in self.coeffs.iter().enumerate().skip(1).rev() {
            acc = acc * t + i as f64 * c;
        }
        acc / self.length
    }

    /// `∫_e p dξ`.
    pub fn integral(&self) -> f64 {
        self.length * self.coeffs.iter().enumerate().map(|(i, c)| c / (i + 1) as f64).sum::<f64>()
    }
}

/// The dofs that determine the traces on one edge, in the edge's orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeDofs {
    pub values: [f64; 2],
    pub gradients: [Vector2<f64>; 2],
    /// `∫_e ∂v/∂n dξ` (outward); ignored for k = 2.
    pub normal_moment: f64,
}

impl EdgeDofs {
    /// Restriction of a local dof vector to local edge `edge`.
    pub fn from_local(layout: &LocalDofLayout, dofs: &DVector<f64>, edge: usize) -> Self {
        let ends = [edge, (edge + 1) % layout.n_vertices];
        let grad = |v: usize| Vector2::new(dofs[layout.deriv(v, 0)], dofs[layout.deriv(v, 1)]);
        Self {
            values: [dofs[layout.value(ends[0])], dofs[layout.value(ends[1])]],
            gradients: [grad(ends[0]), grad(ends[1])],
            normal_moment: if layout.spec.has_normal_moments() {
                dofs[layout.normal_moment(edge)]
            } else {
                0.0
            },
        }
    }
}

fn check_length(edge: &EdgeGeometry) -> Result<(), ElementError> {
    if edge.length > 0.0 {
        Ok(())
    } else {
        Err(ElementError::ZeroLengthEdge { edge: 0 })
    }
}

/// Cubic Hermite value trace.
pub fn edge_value_trace(edge: &EdgeGeometry, dofs: &EdgeDofs) -> Result<EdgePolynomial, ElementError> {
    check_length(edge)?;
    let l = edge.length;
    let [va, vb] = dofs.values;
    let ta = l * dofs.gradients[0].dot(&edge.tangent);
    let tb = l * dofs.gradients[1].dot(&edge.tangent);
    Ok(EdgePolynomial {
        coeffs: vec![va, ta, -3.0 * va - 2.0 * ta + 3.0 * vb - tb, 2.0 * va + ta - 2.0 * vb + tb],
        length: l,
    })
}

/// Outward normal-derivative trace: degree 1 for k = 2, degree 2 for k = 3.
pub fn edge_normal_trace(
    edge: &EdgeGeometry,
    spec: ElementSpec,
    dofs: &EdgeDofs,
) -> Result<EdgePolynomial, ElementError> {
    check_length(edge)?;
    let na = dofs.gradients[0].dot(&edge.normal);
    let nb = dofs.gradients[1].dot(&edge.normal);
    let coeffs = if spec.has_normal_moments() {
        // Linear part plus the mean-one bubble 6t(1 − t) matching the moment.
        let c = dofs.normal_moment / edge.length - 0.5 * (na + nb);
        vec![na, nb - na + 6.0 * c, -6.0 * c]
    } else {
        vec![na, nb - na]
    };
    Ok(EdgePolynomial { coeffs, length: edge.length })
}

/// Hermite basis `(h00, h10, h01, h11)` at `t`.
fn hermite(t: f64) -> [f64; 4] {
    let (t2, t3) = (t * t, t * t * t);
    [1.0 - 3.0 * t2 + 2.0 * t3, t - 2.0 * t2 + t3, 3.0 * t2 - 2.0 * t3, t3 - t2]
}

fn hermite_dt(t: f64) -> [f64; 4] {
    let t2 = t * t;
    [-6.0 * t + 6.0 * t2, 1.0 - 4.0 * t + 3.0 * t2, 6.0 * t - 6.0 * t2, 3.0 * t2 - 2.0 * t]
}

/// The three traces at one point of an edge as linear functionals on the
/// local dof vector.
pub(crate) struct TraceRows {
    pub value: DVector<f64>,
    pub tangential: DVector<f64>,
    pub normal: DVector<f64>,
}

impl TraceRows {
    pub fn at(layout: &LocalDofLayout, edge_index: usize, edge: &EdgeGeometry, t: f64) -> Self {
        let n = layout.n_dofs();
        let ends = [edge_index, (edge_index + 1) % layout.n_vertices];
        let (l, tau, nrm) = (edge.length, edge.tangent, edge.normal);
        let mut value = DVector::zeros(n);
        let mut tangential = DVector::zeros(n);
        let mut normal = DVector::zeros(n);

        let h = hermite(t);
        let hd = hermite_dt(t);
        for (side, &v) in ends.iter().enumerate() {
            let (hv, hg) = (h[2 * side], h[2 * side + 1]);
            let (dv, dg) = (hd[2 * side], hd[2 * side + 1]);
            value[layout.value(v)] += hv;
            tangential[layout.value(v)] += dv / l;
            for axis in 0..2 {
                value[layout.deriv(v, axis)] += hg * l * tau[axis];
                tangential[layout.deriv(v, axis)] += dg * tau[axis];
            }
        }

        let (wa, wb) = if layout.spec.has_normal_moments() {
            let bubble = 6.0 * t * (1.0 - t);
            normal[layout.normal_moment(edge_index)] = bubble / l;
            (1.0 - t - 0.5 * bubble, t - 0.5 * bubble)
        } else {
            (1.0 - t, t)
        };
        for axis in 0..2 {
            normal[layout.deriv(ends[0], axis)] += wa * nrm[axis];
            normal[layout.deriv(ends[1], axis)] += wb * nrm[axis];
        }
        Self { value, tangential, normal }
    }
}
