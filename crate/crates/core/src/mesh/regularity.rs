//! Shape-regularity measures: star-shapedness with respect to a ball and
//! the shortest edge, both relative to the cell diameter.

use nalgebra::ComplexField;

use super::PolygonalMesh;
use crate::geometry::{self, point, Point};

const GRID: usize = 129;
const ZOOM_GRID: usize = 17;
const ZOOM_LEVELS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeRegularityReport {
    /// Smallest `ρ_K / h_K` over cells, where `ρ_K` is the radius of the
    /// largest ball every point of which sees the whole cell.
    pub rho_star: f64,
    /// Smallest `|e| / h_K` over cells and their edges.
    pub min_edge_ratio: f64,
    pub h_max: f64,
    pub h_mean: f64,
}

/// Radius of the largest ball with respect to all points of which `poly` is
/// star-shaped, or 0 if no such ball exists.
///
/// The star kernel is the intersection of the inner half-planes of the edges,
/// so the radius is the maximum over points of the smallest inward distance
/// to an edge line. The maximum is located on a dense grid over the bounding
/// box and then refined on successively smaller grids around the best node.
pub fn cell_star_radius(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut lines = alloc::vec::Vec::with_capacity(n);
    for i in 0..n {
        let a = poly[i];
        let t = poly[(i + 1) % n] - a;
        let len = t.norm();
        if len == 0.0 {
            continue;
        }
        lines.push((a, point(-t.y / len, t.x / len)));
    }
    let depth = |p: Point| {
        lines.iter().map(|(a, nin)| (p - a).dot(nin)).fold(f64::INFINITY, f64::min)
    };

    let (mut lo, mut hi) = (poly[0], poly[0]);
    for p in poly {
        lo = point(lo.x.min(p.x), lo.y.min(p.y));
        hi = point(hi.x.max(p.x), hi.y.max(p.y));
    }
    let mut best = (f64::NEG_INFINITY, lo);
    let scan = |lo: Point, hi: Point, m: usize, best: &mut (f64, Point)| {
        let step = (hi - lo) / (m - 1) as f64;
        for j in 0..m {
            for i in 0..m {
                let p = point(lo.x + i as f64 * step.x, lo.y + j as f64 * step.y);
                let d = depth(p);
                if d > best.0 {
                    *best = (d, p);
                }
            }
        }
        step
    };
    let mut step = scan(lo, hi, GRID, &mut best);
    for _ in 0..ZOOM_LEVELS {
        let c = best.1;
        let s = scan(c - step, c + step, ZOOM_GRID, &mut best);
        step = s;
    }
    best.0.max(0.0)
}

pub fn check_shape_regularity(mesh: &PolygonalMesh) -> ShapeRegularityReport {
    let mut rho_star = f64::INFINITY;
    let mut min_edge_ratio = f64::INFINITY;
    let mut h_max: f64 = 0.0;
    let mut h_sum = 0.0;
    for c in 0..mesh.n_cells() {
        let poly = mesh.cell_polygon(c);
        let h = geometry::diameter(&poly);
        h_max = h_max.max(h);
        h_sum += h;
        rho_star = rho_star.min(cell_star_radius(&poly) / h);
        let n = poly.len();
        for i in 0..n {
            let len = ComplexField::sqrt((poly[(i + 1) % n] - poly[i]).norm_squared());
            min_edge_ratio = min_edge_ratio.min(len / h);
        }
    }
    ShapeRegularityReport { rho_star, min_edge_ratio, h_max, h_mean: h_sum / mesh.n_cells() as f64 }
}
