use alloc::vec::Vec;

use super::{MeshError, PolygonalMesh};
use crate::geometry::point;

/// `N × N × 2` equal right triangles on the unit square. Every square is cut
/// along its `(i, j) → (i+1, j+1)` diagonal, so every cell has diameter `√2/N`.
pub fn build_uniform_triangle_mesh(n: usize) -> Result<PolygonalMesh, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidSize("triangle subdivision N must be at least 1"));
    }
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(point(i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(alloc::vec![id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            cells.push(alloc::vec![id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    PolygonalMesh::new(vertices, cells)
}
