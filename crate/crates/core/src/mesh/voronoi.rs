//! Random Voronoi tessellations of the unit square.
//!
//! Each cell is the unit square clipped by the perpendicular bisectors
//! between its generator and every other generator. Cells are clipped
//! independently, then coincident corners are merged into shared vertices.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MeshError, PolygonalMesh};
use crate::geometry::{self, point, Point};

/// Clipped cells with less area than this are rejected.
pub const AREA_TOLERANCE: f64 = 1e-12;

/// Cell corners closer than this fraction of the smallest cell diameter are merged.
const SHORT_EDGE_FACTOR: f64 = 1e-9;

/// `n_cells` generators drawn uniformly from `[0, 1)²` with a ChaCha8 stream
/// seeded by `seed`, followed by `lloyd_iters` centroidal relaxation sweeps.
pub fn build_voronoi_mesh(
    n_cells: usize,
    seed: u64,
    lloyd_iters: usize,
) -> Result<PolygonalMesh, MeshError> {
    if n_cells == 0 {
        return Err(MeshError::InvalidSize("a Voronoi mesh needs at least one cell"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites: Vec<Point> =
        (0..n_cells).map(|_| point(rng.random::<f64>(), rng.random::<f64>())).collect();

    let mut polygons = clipped_cells(&sites);
    for _ in 0..lloyd_iters {
        sites = polygons.iter().map(|p| geometry::centroid(p)).collect();
        polygons = clipped_cells(&sites);
    }
    for (cell, poly) in polygons.iter().enumerate() {
        let area = if poly.len() < 3 { 0.0 } else { geometry::signed_area(poly) };
        if area < AREA_TOLERANCE {
            return Err(MeshError::DegenerateCell { cell, area });
        }
    }
    conform(&polygons)
}

fn unit_square() -> Vec<Point> {
    vec![point(0., 0.), point(1., 0.), point(1., 1.), point(0., 1.)]
}

fn clipped_cells(sites: &[Point]) -> Vec<Vec<Point>> {
    let mut order: Vec<usize> = Vec::with_capacity(sites.len());
    sites
        .iter()
        .enumerate()
        .map(|(i, &site)| {
            order.clear();
            order.extend((0..sites.len()).filter(|&j| j != i));
            let dist2 = |j: usize| (sites[j] - site).norm_squared();
            order.sort_by(|&a, &b| dist2(a).partial_cmp(&dist2(b)).unwrap_or(Ordering::Equal));
            let mut poly = unit_square();
            for &j in &order {
                // A bisector farther than the farthest corner cannot cut the cell.
                let reach2 = poly.iter().map(|p| (p - site).norm_squared()).fold(0.0, f64::max);
                if dist2(j) > 4.0 * reach2 {
                    break;
                }
                poly = clip(&poly, site, sites[j]);
                if poly.is_empty() {
                    break;
                }
            }
            poly
        })
        .collect()
}

/// Keeps the part of `poly` closer to `site` than to `other`.
fn clip(poly: &[Point], site: Point, other: Point) -> Vec<Point> {
    let dir = other - site;
    let mid = (site + other) * 0.5;
    let side = |p: &Point| (p - mid).dot(&dir);
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let cur = poly[i];
        let next = poly[(i + 1) % n];
        let (fc, fnext) = (side(&cur), side(&next));
        if fc <= 0.0 {
            out.push(cur);
        }
        if (fc < 0.0 && fnext > 0.0) || (fc > 0.0 && fnext < 0.0) {
            let t = fc / (fc - fnext);
            out.push(cur + (next - cur) * t);
        }
    }
    out
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut i: usize) -> usize {
        while self.0[i] != i {
            self.0[i] = self.0[self.0[i]];
            i = self.0[i];
        }
        i
    }

    /// The smaller index becomes the root so clusters are labelled deterministically.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
    }
}

fn conform(polygons: &[Vec<Point>]) -> Result<PolygonalMesh, MeshError> {
    let h_min = polygons.iter().map(|p| geometry::diameter(p)).fold(f64::INFINITY, f64::min);
    let tol = SHORT_EDGE_FACTOR * h_min;

    let points: Vec<Point> = polygons.iter().flatten().copied().collect();
    let mut by_x: Vec<usize> = (0..points.len()).collect();
    by_x.sort_by(|&a, &b| points[a].x.partial_cmp(&points[b].x).unwrap_or(Ordering::Equal));
    let mut uf = UnionFind((0..points.len()).collect());
    for (k, &i) in by_x.iter().enumerate() {
        for &j in &by_x[k + 1..] {
            if points[j].x - points[i].x > tol {
                break;
            }
            if (points[j] - points[i]).norm() <= tol {
                uf.union(i, j);
            }
        }
    }

    // Representatives keep any coordinate that sits exactly on the square's sides.
    let mut rep: Vec<Point> = points.clone();
    for i in 0..points.len() {
        let r = uf.find(i);
        for d in 0..2 {
            let c = points[i][d];
            if c == 0.0 || c == 1.0 {
                rep[r][d] = c;
            }
        }
    }

    let mut global_id = vec![usize::MAX; points.len()];
    let mut vertices = Vec::new();
    let mut cells = Vec::with_capacity(polygons.len());
    let mut flat = 0;
    for (cell, poly) in polygons.iter().enumerate() {
        let mut loop_: Vec<usize> = Vec::with_capacity(poly.len());
        for _ in poly {
            let r = uf.find(flat);
            flat += 1;
            if global_id[r] == usize::MAX {
                global_id[r] = vertices.len();
                vertices.push(rep[r]);
            }
            let id = global_id[r];
            if loop_.last() != Some(&id) {
                loop_.push(id);
            }
        }
        while loop_.len() > 1 && loop_.first() == loop_.last() {
            loop_.pop();
        }
        let area = if loop_.len() < 3 {
            0.0
        } else {
            geometry::signed_area(&geometry::gather(&vertices, &loop_))
        };
        if area < AREA_TOLERANCE {
            return Err(MeshError::DegenerateCell { cell, area });
        }
        cells.push(loop_);
    }

    let mesh = PolygonalMesh::new(vertices, cells)?;
    let on_side = |p: &Point, q: &Point| {
        (p.x == 0.0 && q.x == 0.0)
            || (p.x == 1.0 && q.x == 1.0)
            || (p.y == 0.0 && q.y == 0.0)
            || (p.y == 1.0 && q.y == 1.0)
    };
    for e in mesh.edges().iter().filter(|e| e.is_boundary()) {
        let [a, b] = e.vertices;
        if !on_side(&mesh.vertices()[a], &mesh.vertices()[b]) {
            return Err(MeshError::NonConforming { a, b });
        }
    }
    Ok(mesh)
}
