//! Polygonal meshes of a planar domain.
//!
//! A [`PolygonalMesh`] is built from vertex coordinates and counter-clockwise
//! cell loops; edges, cell–edge incidence and boundary flags are derived and
//! the whole structure is validated on construction, so every mesh value in
//! the program satisfies the conformity invariants.

mod regularity;
mod triangles;
mod voronoi;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{self, Point};

pub use regularity::{cell_star_radius, check_shape_regularity, ShapeRegularityReport};
pub use triangles::build_uniform_triangle_mesh;
pub use voronoi::{build_voronoi_mesh, AREA_TOLERANCE};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("mesh has no cells")]
    NoCells,
    #[error("cell {cell} references vertex {vertex}, but the mesh has {count} vertices")]
    VertexOutOfRange { cell: usize, vertex: usize, count: usize },
    #[error("cell {cell} has {count} vertices; at least 3 are required")]
    TooFewVertices { cell: usize, count: usize },
    #[error("cell {cell} is not counter-clockwise (signed area {area:e})")]
    NotCounterClockwise { cell: usize, area: f64 },
    #[error("cell {cell} is not a simple polygon")]
    SelfIntersecting { cell: usize },
    #[error("edge ({a}, {b}) is shared by more than two cells")]
    NonManifoldEdge { a: usize, b: usize },
    #[error("edge ({a}, {b}) is traversed in the same direction by two cells")]
    InconsistentOrientation { a: usize, b: usize },
    #[error("boundary edges do not form closed loops at vertex {vertex}")]
    OpenBoundary { vertex: usize },
    #[error("cell areas sum to {cells}, but the boundary encloses {domain}")]
    AreaMismatch { cells: f64, domain: f64 },
    #[error("clipped cell {cell} collapsed (area {area:e})")]
    DegenerateCell { cell: usize, area: f64 },
    #[error("boundary edge ({a}, {b}) does not lie on the domain boundary")]
    NonConforming { a: usize, b: usize },
    #[error("invalid mesh size: {0}")]
    InvalidSize(&'static str),
}

/// An edge with the cell on its left (which traverses `vertices[0] → vertices[1]`)
/// and, for interior edges, the cell on its right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub left: usize,
    pub right: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalMesh {
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
    edges: Vec<Edge>,
    /// `cell_edges[c][i]` is the edge joining `cells[c][i]` and `cells[c][i + 1]`.
    cell_edges: Vec<Vec<usize>>,
    boundary_vertex: Vec<bool>,
    boundary_edge: Vec<bool>,
}

impl PolygonalMesh {
    pub fn new(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Result<Self, MeshError> {
        if cells.is_empty() {
            return Err(MeshError::NoCells);
        }
        let nv = vertices.len();
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() < 3 {
                return Err(MeshError::TooFewVertices { cell: c, count: cell.len() });
            }
            if let Some(&v) = cell.iter().find(|&&v| v >= nv) {
                return Err(MeshError::VertexOutOfRange { cell: c, vertex: v, count: nv });
            }
            let poly = geometry::gather(&vertices, cell);
            let area = geometry::signed_area(&poly);
            if !(area > 0.0) {
                return Err(MeshError::NotCounterClockwise { cell: c, area });
            }
            if !geometry::is_simple(&poly) {
                return Err(MeshError::SelfIntersecting { cell: c });
            }
        }

        let mut edges: Vec<Edge> = Vec::new();
        let mut lookup: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            let n = cell.len();
            let mut local = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (cell[i], cell[(i + 1) % n]);
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    None => {
                        lookup.insert(key, edges.len());
                        local.push(edges.len());
                        edges.push(Edge { vertices: [a, b], left: c, right: None });
                    }
                    Some(&e) => {
                        let edge = &mut edges[e];
                        if edge.right.is_some() {
                            return Err(MeshError::NonManifoldEdge { a: key.0, b: key.1 });
                        }
                        if edge.vertices[0] == a {
                            return Err(MeshError::InconsistentOrientation { a: key.0, b: key.1 });
                        }
                        edge.right = Some(c);
                        local.push(e);
                    }
                }
            }
            cell_edges.push(local);
        }

        let mut boundary_vertex = vec![false; nv];
        let boundary_edge: Vec<bool> = edges.iter().map(Edge::is_boundary).collect();
        // Boundary loops are closed iff every vertex has as many outgoing as
        // incoming boundary edges.
        let mut balance = vec![0i64; nv];
        let mut domain_twice = 0.0;
        for e in edges.iter().filter(|e| e.is_boundary()) {
            let [a, b] = e.vertices;
            boundary_vertex[a] = true;
            boundary_vertex[b] = true;
            balance[a] += 1;
            balance[b] -= 1;
            domain_twice += geometry::cross(&vertices[a], &vertices[b]);
        }
        if let Some(vertex) = balance.iter().position(|&b| b != 0) {
            return Err(MeshError::OpenBoundary { vertex });
        }
        let domain = 0.5 * domain_twice;
        let total: f64 = cells
            .iter()
            .map(|c| geometry::signed_area(&geometry::gather(&vertices, c)))
            .sum();
        if (total - domain).abs() > 1e-12 * domain.abs().max(f64::MIN_POSITIVE) {
            return Err(MeshError::AreaMismatch { cells: total, domain });
        }

        Ok(Self { vertices, cells, edges, cell_edges, boundary_vertex, boundary_edge })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn cell_edges(&self, cell: usize) -> &[usize] {
        &self.cell_edges[cell]
    }

    pub fn boundary_vertex_flags(&self) -> &[bool] {
        &self.boundary_vertex
    }

    pub fn boundary_edge_flags(&self) -> &[bool] {
        &self.boundary_edge
    }

    pub fn cell_polygon(&self, cell: usize) -> Vec<Point> {
        geometry::gather(&self.vertices, &self.cells[cell])
    }

    pub fn cell_area(&self, cell: usize) -> f64 {
        geometry::signed_area(&self.cell_polygon(cell))
    }

    pub fn cell_diameter(&self, cell: usize) -> f64 {
        geometry::diameter(&self.cell_polygon(cell))
    }

    /// +1 if `cell` is the left cell of its `i`-th edge (its outward normal
    /// agrees with the edge's reference normal), −1 otherwise.
    pub fn edge_sign(&self, cell: usize, i: usize) -> f64 {
        if self.edges[self.cell_edges[cell][i]].left == cell {
            1.0
        } else {
            -1.0
        }
    }

    /// Largest cell diameter.
    pub fn h_max(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.cell_diameter(c)).fold(0.0, f64::max)
    }

    pub fn h_mean(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.cell_diameter(c)).sum::<f64>() / self.n_cells() as f64
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.cell_area(c)).sum()
    }

    /// The same mesh with cells listed in a different order.
    pub fn with_cell_order(&self, order: &[usize]) -> Result<Self, MeshError> {
        let cells = order.iter().map(|&c| self.cells[c].clone()).collect();
        Self::new(self.vertices.clone(), cells)
    }
}
