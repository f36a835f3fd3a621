//! Global dof numbering, clamped constraints, assembly and solve.
//!
//! Global dofs are `3v + c` for vertex `v` (`c` = value, ∂x, ∂y) followed,
//! for k = 3, by one normal-derivative moment per edge. Edge moments are
//! taken with respect to the edge's reference normal, the outward normal of
//! its left cell, so the right cell sees them with a sign flip.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;

use crate::element::{compute_local_matrices, CellGeometry, ElementError, ElementSpec, LocalElementMatrices, Material, PlateModel};
use crate::geometry::Point;
use crate::mesh::PolygonalMesh;
use crate::sparse::{CsrMatrix, EnvelopeCholesky, SparseError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AssemblyError {
    #[error("cell {cell}: {source}")]
    Element { cell: usize, source: ElementError },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("system not SPD: {0}")]
    NotSpd(#[from] SparseError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    spec: ElementSpec,
    n_vertices: usize,
    n_edges: usize,
    constrained: Vec<bool>,
    /// Position among the free dofs, if free.
    free_index: Vec<Option<usize>>,
    free: Vec<usize>,
}

impl DofMap {
    pub fn spec(&self) -> ElementSpec {
        self.spec
    }

    pub fn n_dofs(&self) -> usize {
        self.constrained.len()
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn n_constrained(&self) -> usize {
        self.n_dofs() - self.n_free()
    }

    pub fn vertex_dof(&self, vertex: usize, component: usize) -> usize {
        3 * vertex + component
    }

    pub fn edge_dof(&self, edge: usize) -> Option<usize> {
        self.spec.has_normal_moments().then(|| 3 * self.n_vertices + edge)
    }

    pub fn is_constrained(&self, dof: usize) -> bool {
        self.constrained[dof]
    }

    pub fn free_index(&self, dof: usize) -> Option<usize> {
        self.free_index[dof]
    }

    pub fn free_dofs(&self) -> &[usize] {
        &self.free
    }

    /// Global index and orientation sign of every local dof of `cell`.
    pub fn cell_dofs(&self, mesh: &PolygonalMesh, cell: usize) -> Vec<(usize, f64)> {
        let loop_ = &mesh.cells()[cell];
        let mut out = Vec::with_capacity(4 * loop_.len());
        for &v in loop_ {
            for c in 0..3 {
                out.push((self.vertex_dof(v, c), 1.0));
            }
        }
        if self.spec.has_normal_moments() {
            for (i, &e) in mesh.cell_edges(cell).iter().enumerate() {
                out.push((3 * self.n_vertices + e, mesh.edge_sign(cell, i)));
            }
        }
        out
    }

    /// Local dof vector of `cell` extracted from a global vector.
    pub fn gather(&self, mesh: &PolygonalMesh, cell: usize, global: &[f64]) -> DVector<f64> {
        let map = self.cell_dofs(mesh, cell);
        DVector::from_iterator(map.len(), map.iter().map(|&(g, s)| s * global[g]))
    }
}

/// Constrained dofs for `w = ∂w/∂n = 0` on the boundary: all three dofs of
/// every boundary vertex (the tangential derivative vanishes with `w`, and at
/// corners two tangents span the plane) and the normal moment of every
/// boundary edge. Sorted ascending.
pub fn apply_clamped_bc(mesh: &PolygonalMesh, spec: ElementSpec) -> Vec<usize> {
    let mut out = Vec::new();
    for (v, _) in mesh.boundary_vertex_flags().iter().enumerate().filter(|(_, &b)| b) {
        out.extend((0..3).map(|c| 3 * v + c));
    }
    if spec.has_normal_moments() {
        let base = 3 * mesh.n_vertices();
        for (e, _) in mesh.boundary_edge_flags().iter().enumerate().filter(|(_, &b)| b) {
            out.push(base + e);
        }
    }
    out
}

pub fn number_dofs(mesh: &PolygonalMesh, spec: ElementSpec) -> DofMap {
    let n_vertices = mesh.n_vertices();
    let n_edges = mesh.n_edges();
    let n = 3 * n_vertices + if spec.has_normal_moments() { n_edges } else { 0 };
    let mut constrained = vec![false; n];
    for d in apply_clamped_bc(mesh, spec) {
        constrained[d] = true;
    }
    let mut free_index = vec![None; n];
    let mut free = Vec::new();
    for d in 0..n {
        if !constrained[d] {
            free_index[d] = Some(free.len());
            free.push(d);
        }
    }
    DofMap { spec, n_vertices, n_edges, constrained, free_index, free }
}

/// Stiffness and load over the free dofs.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub dofmap: DofMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// All global dofs; constrained entries are zero.
    pub dofs: Vec<f64>,
    /// `‖A x − b‖ / ‖b‖` over the free dofs (absolute when `b = 0`).
    pub residual: f64,
}

pub fn cell_geometry(mesh: &PolygonalMesh, cell: usize) -> Result<CellGeometry, AssemblyError> {
    CellGeometry::new(mesh.cell_polygon(cell)).map_err(|source| AssemblyError::Element { cell, source })
}

pub fn compute_element<F: Fn(Point) -> f64>(
    mesh: &PolygonalMesh,
    cell: usize,
    spec: ElementSpec,
    material: &Material,
    load: &F,
) -> Result<LocalElementMatrices, AssemblyError> {
    let geom = cell_geometry(mesh, cell)?;
    compute_local_matrices(&geom, spec, material, load).map_err(|source| AssemblyError::Element { cell, source })
}

/// Scatters precomputed element matrices (in cell order) into the free-dof
/// system. Constrained rows and columns are dropped, which is exact for
/// homogeneous data.
pub fn assemble_from_elements(
    mesh: &PolygonalMesh,
    dofmap: &DofMap,
    elements: &[LocalElementMatrices],
) -> GlobalSystem {
    let nf = dofmap.n_free();
    let mut triplets = Vec::new();
    let mut rhs = vec![0.0; nf];
    for (cell, local) in elements.iter().enumerate() {
        let map: Vec<(Option<usize>, f64)> =
            dofmap.cell_dofs(mesh, cell).into_iter().map(|(g, s)| (dofmap.free_index(g), s)).collect();
        for (i, &(gi, si)) in map.iter().enumerate() {
            let Some(gi) = gi else { continue };
            rhs[gi] += si * local.load[i];
            for (j, &(gj, sj)) in map.iter().enumerate() {
                if let Some(gj) = gj {
                    triplets.push((gi, gj, si * sj * local.stiffness[(i, j)]));
                }
            }
        }
    }
    GlobalSystem { matrix: CsrMatrix::from_triplets(nf, triplets), rhs, dofmap: dofmap.clone() }
}

pub fn assemble<F: Fn(Point) -> f64>(
    mesh: &PolygonalMesh,
    spec: ElementSpec,
    model: &PlateModel<F>,
) -> Result<GlobalSystem, AssemblyError> {
    let dofmap = number_dofs(mesh, spec);
    let elements = (0..mesh.n_cells())
        .map(|c| compute_element(mesh, c, spec, &model.material, &model.load))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(assemble_from_elements(mesh, &dofmap, &elements))
}

fn norm(v: &[f64]) -> f64 {
    nalgebra::ComplexField::sqrt(v.iter().map(|x| x * x).sum::<f64>())
}

const REFINEMENT_STEPS: usize = 3;

/// Envelope Cholesky solve of the free-dof system.
pub fn solve(system: &GlobalSystem) -> Result<Solution, SolveError> {
    let dofmap = &system.dofmap;
    let mut dofs = vec![0.0; dofmap.n_dofs()];
    if dofmap.n_free() == 0 {
        return Ok(Solution { dofs, residual: 0.0 });
    }
    let chol = EnvelopeCholesky::factor(&system.matrix)?;
    let residual_of = |x: &[f64]| -> Vec<f64> {
        system.matrix.matvec(x).iter().zip(&system.rhs).map(|(a, b)| b - a).collect()
    };
    let bn = norm(&system.rhs);
    let scale = if bn > 0.0 { bn } else { 1.0 };
    let mut x = chol.solve(&system.rhs);
    let mut r = residual_of(&x);
    let mut residual = norm(&r) / scale;
    // Iterative refinement against the same factor.
    for _ in 0..REFINEMENT_STEPS {
        if residual == 0.0 {
            break;
        }
        let dx = chol.solve(&r);
        let y: Vec<f64> = x.iter().zip(&dx).map(|(a, d)| a + d).collect();
        let ry = residual_of(&y);
        let ny = norm(&ry) / scale;
        if !(ny < residual) {
            break;
        }
        (x, r, residual) = (y, ry, ny);
    }
    for (&g, xi) in dofmap.free_dofs().iter().zip(x) {
        dofs[g] = xi;
    }
    Ok(Solution { dofs, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_uniform_triangle_mesh, build_voronoi_mesh};

    #[test]
    fn dof_counts() {
        let m = build_uniform_triangle_mesh(1).unwrap();
        assert_eq!(number_dofs(&m, ElementSpec::VEM31).n_dofs(), 12);
        assert_eq!(number_dofs(&m, ElementSpec::VEM32).n_dofs(), 17);
        let sq = build_voronoi_mesh(1, 3, 0).unwrap();
        let d = number_dofs(&sq, ElementSpec::VEM31);
        assert_eq!((d.n_dofs(), d.n_free()), (12, 0));
        assert_eq!(number_dofs(&sq, ElementSpec::VEM32).n_free(), 0);
    }

    #[test]
    fn clamped_counts_on_n4() {
        let m = build_uniform_triangle_mesh(4).unwrap();
        let d = number_dofs(&m, ElementSpec::VEM31);
        assert_eq!(d.n_constrained(), 48);
        assert_eq!(d.n_free(), 27);
        for (v, &b) in m.boundary_vertex_flags().iter().enumerate() {
            for c in 0..3 {
                assert_eq!(d.is_constrained(d.vertex_dof(v, c)), b);
            }
        }
        let d3 = number_dofs(&m, ElementSpec::VEM32);
        assert_eq!(d3.n_constrained(), 48 + 16);
    }

    #[test]
    fn shared_edges_map_consistently() {
        let m = build_voronoi_mesh(12, 5, 1).unwrap();
        let d = number_dofs(&m, ElementSpec::VEM32);
        let mut seen = vec![0i32; d.n_dofs()];
        for c in 0..m.n_cells() {
            for (i, (g, s)) in d.cell_dofs(&m, c).into_iter().enumerate() {
                if i >= 3 * m.cells()[c].len() {
                    seen[g] += s as i32;
                }
            }
        }
        for (e, edge) in m.edges().iter().enumerate() {
            let expect = if edge.is_boundary() { 1 } else { 0 };
            assert_eq!(seen[d.edge_dof(e).unwrap()], expect);
        }
    }

    #[test]
    fn zero_load_gives_zero_solution() {
        let m = build_uniform_triangle_mesh(3).unwrap();
        let model = PlateModel::new(Material::default(), |_: Point| 0.0);
        let sys = assemble(&m, ElementSpec::VEM32, &model).unwrap();
        assert!(sys.rhs.iter().all(|&b| b == 0.0));
        let sol = solve(&sys).unwrap();
        assert!(sol.dofs.iter().all(|&x| x == 0.0));
        assert_eq!(sol.residual, 0.0);
    }

    #[test]
    fn symmetric_and_solvable() {
        let m = build_uniform_triangle_mesh(4).unwrap();
        for spec in [ElementSpec::VEM31, ElementSpec::VEM32] {
            let model = PlateModel::new(Material::default(), |p: Point| 1.0 + p.x);
            let sys = assemble(&m, spec, &model).unwrap();
            assert!(sys.matrix.asymmetry() <= 1e-12);
            let sol = solve(&sys).unwrap();
            assert!(sol.residual <= 1e-12);
        }
    }
}
