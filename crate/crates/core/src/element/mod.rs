//! Everything local to one polygon: degrees of freedom, edge traces, the
//! energy projector, the enhanced L² projector, stabilization, stiffness and
//! load.
//!
//! Local dofs are ordered vertex-major (`w`, `∂w/∂x`, `∂w/∂y` at every vertex
//! in loop order) followed, for k = 3, by one normal-derivative moment
//! `∫_e ∂w/∂n dξ` per edge, taken with respect to the cell's outward normal.

mod projector;
mod traces;

use alloc::vec::Vec;

use nalgebra::{DVector, Matrix2, Vector2};

use crate::geometry::{self, Point};
use crate::polyspace::{
    eval_poly, eval_poly_gradient, eval_poly_hessian, gauss_legendre, QuadratureError,
    ScaledMonomialBasis,
};

pub use projector::{
    compute_local_matrices, local_load, local_stiffness, project_energy, project_l2, stabilization,
    EnergyProjection, LocalElementMatrices,
};
pub use traces::{edge_normal_trace, edge_value_trace, EdgeDofs, EdgePolynomial};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ElementError {
    #[error("only k = 2 (VEM31) and k = 3 (VEM32) are supported, got k = {0}")]
    UnsupportedDegree(usize),
    #[error("invalid material: rigidity {rigidity}, Poisson ratio {poisson}")]
    InvalidMaterial { rigidity: f64, poisson: f64 },
    #[error("edge {edge} has zero length")]
    ZeroLengthEdge { edge: usize },
    #[error("degenerate cell geometry: {0}")]
    Geometry(#[from] QuadratureError),
    #[error("singular projector system")]
    SingularProjector,
}

/// Bending rigidity `D` and Poisson ratio `ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub rigidity: f64,
    pub poisson: f64,
}

impl Default for Material {
    fn default() -> Self {
        Self { rigidity: 1.0, poisson: 0.3 }
    }
}

impl Material {
    pub fn new(rigidity: f64, poisson: f64) -> Result<Self, ElementError> {
        if rigidity > 0.0 && (0.0..0.5).contains(&poisson) {
            Ok(Self { rigidity, poisson })
        } else {
            Err(ElementError::InvalidMaterial { rigidity, poisson })
        }
    }

    /// Moment tensor `D [(1 − ν) ∇²w + ν Δw I]` for a field with Hessian `hess`.
    pub fn moment(&self, hess: &Matrix2<f64>) -> Matrix2<f64> {
        let nu = self.poisson;
        (hess * (1.0 - nu) + Matrix2::identity() * (nu * hess.trace())) * self.rigidity
    }

    /// Energy density `M(u) : ∇²v`.
    pub fn energy_density(&self, hess_u: &Matrix2<f64>, hess_v: &Matrix2<f64>) -> f64 {
        self.moment(hess_u).component_mul(hess_v).sum()
    }
}

/// Material plus a transverse load density.
#[derive(Debug, Clone, Copy)]
pub struct PlateModel<F> {
    pub material: Material,
    pub load: F,
}

impl<F: Fn(Point) -> f64> PlateModel<F> {
    pub fn new(material: Material, load: F) -> Self {
        Self { material, load }
    }
}

/// The accuracy degree `k` with its trace degrees `r = max(3, k)`,
/// `s = k − 1` and interior degree `m = k − 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElementSpec {
    k: usize,
}

impl ElementSpec {
    pub const VEM31: Self = Self { k: 2 };
    pub const VEM32: Self = Self { k: 3 };

    pub fn new(k: usize) -> Result<Self, ElementError> {
        match k {
            2 | 3 => Ok(Self { k }),
            _ => Err(ElementError::UnsupportedDegree(k)),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.k.max(3)
    }

    pub fn s(&self) -> usize {
        self.k - 1
    }

    pub fn m(&self) -> isize {
        self.k as isize - 4
    }

    pub fn name(&self) -> &'static str {
        match self.k {
            2 => "VEM31",
            _ => "VEM32",
        }
    }

    pub fn has_normal_moments(&self) -> bool {
        self.s() > 1
    }

    pub fn layout(&self, n_vertices: usize) -> LocalDofLayout {
        LocalDofLayout { spec: *self, n_vertices }
    }

    /// Gauss points per edge: exact for the boundary integrands (degree ≤ 6).
    pub(crate) fn edge_gauss_points(&self) -> usize {
        if self.k == 2 {
            4
        } else {
            5
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    Value { vertex: usize },
    DerivX { vertex: usize },
    DerivY { vertex: usize },
    NormalMoment { edge: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalDofLayout {
    pub spec: ElementSpec,
    pub n_vertices: usize,
}

impl LocalDofLayout {
    pub fn n_dofs(&self) -> usize {
        3 * self.n_vertices + if self.spec.has_normal_moments() { self.n_vertices } else { 0 }
    }

    pub fn value(&self, vertex: usize) -> usize {
        3 * vertex
    }

    pub fn deriv(&self, vertex: usize, axis: usize) -> usize {
        3 * vertex + 1 + axis
    }

    /// Only meaningful when the spec carries normal moments.
    pub fn normal_moment(&self, edge: usize) -> usize {
        3 * self.n_vertices + edge
    }

    pub fn kind(&self, dof: usize) -> DofKind {
        if dof >= 3 * self.n_vertices {
            return DofKind::NormalMoment { edge: dof - 3 * self.n_vertices };
        }
        let vertex = dof / 3;
        match dof % 3 {
            0 => DofKind::Value { vertex },
            1 => DofKind::DerivX { vertex },
            _ => DofKind::DerivY { vertex },
        }
    }

    pub fn kinds(&self) -> Vec<DofKind> {
        (0..self.n_dofs()).map(|d| self.kind(d)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeGeometry {
    pub start: Point,
    pub end: Point,
    pub length: f64,
    pub tangent: Vector2<f64>,
    /// Outward unit normal of the owning cell.
    pub normal: Vector2<f64>,
}

impl EdgeGeometry {
    pub fn new(start: Point, end: Point) -> Self {
        let d = end - start;
        let length = d.norm();
        let tangent = if length > 0.0 { d / length } else { Vector2::zeros() };
        Self { start, end, length, tangent, normal: Vector2::new(tangent.y, -tangent.x) }
    }

    pub fn point_at(&self, t: f64) -> Point {
        self.start + (self.end - self.start) * t
    }
}

/// Counter-clockwise polygon with the measures every local computation needs.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGeometry {
    pub vertices: Vec<Point>,
    pub edges: Vec<EdgeGeometry>,
    pub area: f64,
    pub centroid: Point,
    pub diameter: f64,
}

impl CellGeometry {
    pub fn new(vertices: Vec<Point>) -> Result<Self, ElementError> {
        let n = vertices.len();
        let area = if n < 3 { 0.0 } else { geometry::signed_area(&vertices) };
        if !(area > 0.0) {
            return Err(QuadratureError::DegeneratePolygon(area).into());
        }
        let edges: Vec<EdgeGeometry> =
            (0..n).map(|i| EdgeGeometry::new(vertices[i], vertices[(i + 1) % n])).collect();
        if let Some(edge) = edges.iter().position(|e| !(e.length > 0.0)) {
            return Err(ElementError::ZeroLengthEdge { edge });
        }
        let centroid = geometry::centroid(&vertices);
        let diameter = geometry::diameter(&vertices);
        Ok(Self { vertices, edges, area, centroid, diameter })
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn basis(&self, degree: usize) -> ScaledMonomialBasis {
        ScaledMonomialBasis::new(self.centroid, self.diameter, degree)
    }
}

/// A smooth function with first and second derivatives.
pub trait SmoothField {
    fn value(&self, p: Point) -> f64;
    fn gradient(&self, p: Point) -> Vector2<f64>;
    fn hessian(&self, p: Point) -> Matrix2<f64>;
}

/// `Σ coeffs_α m_α` in a cell's scaled basis.
#[derive(Debug, Clone, Copy)]
pub struct LocalPolynomial<'a> {
    pub basis: &'a ScaledMonomialBasis,
    pub coeffs: &'a [f64],
}

impl SmoothField for LocalPolynomial<'_> {
    fn value(&self, p: Point) -> f64 {
        eval_poly(self.basis, self.coeffs, p)
    }

    fn gradient(&self, p: Point) -> Vector2<f64> {
        eval_poly_gradient(self.basis, self.coeffs, p)
    }

    fn hessian(&self, p: Point) -> Matrix2<f64> {
        eval_poly_hessian(self.basis, self.coeffs, p)
    }
}

/// Gauss points used for normal-derivative moments of arbitrary smooth fields.
const MOMENT_GAUSS_POINTS: usize = 8;

/// `∫_e ∇w · n dξ` along the segment `start → end` for the unit normal `normal`.
pub fn normal_moment<W: SmoothField + ?Sized>(w: &W, start: Point, end: Point, normal: Vector2<f64>) -> f64 {
    let g = gauss_legendre(MOMENT_GAUSS_POINTS).expect("fixed rule size");
    g.on_segment(start, end).map(|(p, wt)| wt * w.gradient(p).dot(&normal)).sum()
}

/// Dof vector of the interpolant of `w`: vertex values and gradients, and
/// for k = 3 the outward normal-derivative moment of every edge.
pub fn dof_values_of<W: SmoothField + ?Sized>(w: &W, cell: &CellGeometry, spec: ElementSpec) -> DVector<f64> {
    let layout = spec.layout(cell.n_vertices());
    let mut dofs = DVector::zeros(layout.n_dofs());
    for (i, &v) in cell.vertices.iter().enumerate() {
        let g = w.gradient(v);
        dofs[layout.value(i)] = w.value(v);
        dofs[layout.deriv(i, 0)] = g.x;
        dofs[layout.deriv(i, 1)] = g.y;
    }
    if spec.has_normal_moments() {
        for (j, e) in cell.edges.iter().enumerate() {
            dofs[layout.normal_moment(j)] = normal_moment(w, e.start, e.end, e.normal);
        }
    }
    dofs
}
