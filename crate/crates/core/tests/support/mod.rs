//! Shared generators and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use c1vem_core::element::{CellGeometry, SmoothField};
use c1vem_core::mesh::{build_voronoi_mesh, cell_star_radius};
use c1vem_core::polyspace::gauss_legendre;
use c1vem_core::{DofMap, ElementSpec, Material, Point, PolygonalMesh};
use nalgebra::{DVector, Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pt(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

/// `Σ c_ab ξ^a η^b` over `a + b ≤ 3` with `(ξ, η) = (x − x₀) / s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cubic {
    pub c: BTreeMap<(i32, i32), f64>,
    pub origin: Point,
    pub scale: f64,
}

impl Cubic {
    pub fn monomial(a: i32, b: i32) -> Self {
        Self { c: BTreeMap::from([((a, b), 1.0)]), origin: pt(0.0, 0.0), scale: 1.0 }
    }

    /// Random coefficients in [-1, 1] for every monomial of degree ≤ `degree`
    /// in raw coordinates.
    pub fn random(rng: &mut impl Rng, degree: i32) -> Self {
        Self::random_around(rng, degree, pt(0.0, 0.0), 1.0)
    }

    pub fn random_around(rng: &mut impl Rng, degree: i32, origin: Point, scale: f64) -> Self {
        let mut c = BTreeMap::new();
        for d in 0..=degree {
            for b in 0..=d {
                c.insert((d - b, b), rng.random_range(-1.0..1.0));
            }
        }
        Self { c, origin, scale }
    }

    fn term(p: Point, a: i32, b: i32, da: i32, db: i32) -> f64 {
        if da > a || db > b {
            return 0.0;
        }
        let fall = |n: i32, k: i32| (0..k).map(|i| (n - i) as f64).product::<f64>();
        fall(a, da) * fall(b, db) * p.x.powi(a - da) * p.y.powi(b - db)
    }

    pub fn derivative(&self, p: Point, dx: i32, dy: i32) -> f64 {
        let local = (p - self.origin) / self.scale;
        let chain = self.scale.powi(-(dx + dy));
        self.c.iter().map(|(&(a, b), &v)| v * Self::term(local, a, b, dx, dy)).sum::<f64>() * chain
    }

    pub fn grad_laplacian(&self, p: Point) -> Vector2<f64> {
        Vector2::new(
            self.derivative(p, 3, 0) + self.derivative(p, 1, 2),
            self.derivative(p, 2, 1) + self.derivative(p, 0, 3),
        )
    }
}

impl SmoothField for Cubic {
    fn value(&self, p: Point) -> f64 {
        self.derivative(p, 0, 0)
    }

    fn gradient(&self, p: Point) -> Vector2<f64> {
        Vector2::new(self.derivative(p, 1, 0), self.derivative(p, 0, 1))
    }

    fn hessian(&self, p: Point) -> Matrix2<f64> {
        let xy = self.derivative(p, 1, 1);
        Matrix2::new(self.derivative(p, 2, 0), xy, xy, self.derivative(p, 0, 2))
    }
}

fn diameter(poly: &[Point]) -> f64 {
    let mut h: f64 = 0.0;
    for a in poly {
        for b in poly {
            h = h.max((a - b).norm());
        }
    }
    h
}

/// Shape-regular in the usual sense: star radius and shortest edge both at
/// least `gamma · h`.
pub fn is_regular(poly: &[Point], gamma: f64) -> bool {
    let h = diameter(poly);
    let n = poly.len();
    let min_edge = (0..n).map(|i| (poly[(i + 1) % n] - poly[i]).norm()).fold(f64::INFINITY, f64::min);
    min_edge >= gamma * h && cell_star_radius(poly) >= gamma * h
}

fn place(rng: &mut impl Rng, poly: Vec<Point>) -> Vec<Point> {
    let scale = 10f64.powf(rng.random_range(-1.5..0.0));
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    let (s, c) = angle.sin_cos();
    let shift = pt(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    poly.into_iter().map(|p| shift + scale * pt(c * p.x - s * p.y, s * p.x + c * p.y)).collect()
}

pub fn random_triangle(rng: &mut impl Rng) -> Vec<Point> {
    loop {
        let mut t: Vec<Point> = (0..3).map(|_| pt(rng.random(), rng.random())).collect();
        let area = (t[1] - t[0]).perp(&(t[2] - t[0]));
        if area < 0.0 {
            t.swap(1, 2);
        }
        if is_regular(&t, 0.08) {
            return place(rng, t);
        }
    }
}

pub fn random_square(rng: &mut impl Rng) -> Vec<Point> {
    place(rng, vec![pt(0., 0.), pt(1., 0.), pt(1., 1.), pt(0., 1.)])
}

/// Pentagons and hexagons cut out of random Voronoi tessellations.
pub fn voronoi_polygons(sides: &[usize], count: usize, seed: u64) -> Vec<Vec<Point>> {
    let mut out = Vec::new();
    let mut s = seed;
    while out.len() < count {
        let mesh = build_voronoi_mesh(40, s, 0).expect("voronoi mesh");
        for c in 0..mesh.n_cells() {
            let poly = mesh.cell_polygon(c);
            if sides.contains(&poly.len()) && is_regular(&poly, 0.05) && out.len() < count {
                out.push(poly);
            }
        }
        s += 1;
    }
    out
}

/// A mixed family of triangles, squares, pentagons and hexagons.
pub fn random_polygons(count: usize, seed: u64) -> Vec<Vec<Point>> {
    let mut r = rng(seed);
    let quarter = count / 4;
    let mut out: Vec<Vec<Point>> = (0..quarter).map(|_| random_triangle(&mut r)).collect();
    out.extend((0..quarter).map(|_| random_square(&mut r)));
    for poly in voronoi_polygons(&[5, 6], count - 2 * quarter, seed) {
        out.push(place(&mut r, poly));
    }
    out
}

pub fn random_dofs(rng: &mut impl Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
}

/// `a^K(p, v_δ)` for a polynomial `p` of degree ≤ 3, integrating by parts
/// twice on every edge. The traces of `v_δ` are rebuilt here from the dofs:
/// the value is the cubic Hermite interpolant of the vertex data and the
/// normal derivative is linear (k = 2) or the quadratic with the prescribed
/// moment (k = 3).
pub fn by_parts_energy(cell: &CellGeometry, spec: ElementSpec, material: &Material, p: &Cubic, dofs: &DVector<f64>) -> f64 {
    let n = cell.n_vertices();
    let (d, nu) = (material.rigidity, material.poisson);
    let rule = gauss_legendre(10).unwrap();
    let mut total = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        let (a, b) = (cell.vertices[i], cell.vertices[j]);
        let len = (b - a).norm();
        let tau = (b - a) / len;
        let nor = Vector2::new(tau.y, -tau.x);
        let (va, vb) = (dofs[3 * i], dofs[3 * j]);
        let ga = Vector2::new(dofs[3 * i + 1], dofs[3 * i + 2]);
        let gb = Vector2::new(dofs[3 * j + 1], dofs[3 * j + 2]);
        let (ta, tb) = (len * ga.dot(&tau), len * gb.dot(&tau));
        let (na, nb) = (ga.dot(&nor), gb.dot(&nor));
        let bubble = if spec.k() == 3 { dofs[3 * n + i] / len - 0.5 * (na + nb) } else { 0.0 };
        for (t, w) in rule.unit_interval() {
            let value = va * (1. - 3. * t * t + 2. * t * t * t)
                + ta * (t - 2. * t * t + t * t * t)
                + vb * (3. * t * t - 2. * t * t * t)
                + tb * (t * t * t - t * t);
            let dvalue = (va * (-6. * t + 6. * t * t)
                + ta * (1. - 4. * t + 3. * t * t)
                + vb * (6. * t - 6. * t * t)
                + tb * (3. * t * t - 2. * t))
                / len;
            let normal = na * (1. - t) + nb * t + 6. * t * (1. - t) * bubble;
            let x = a + t * (b - a);
            let hess = p.hessian(x);
            let moment = d * ((1. - nu) * hess + nu * hess.trace() * Matrix2::identity());
            let m_nn = nor.dot(&(moment * nor));
            let m_nt = tau.dot(&(moment * nor));
            let shear = d * p.grad_laplacian(x).dot(&nor);
            total += w * len * (m_nn * normal + m_nt * dvalue - shear * value);
        }
    }
    total
}

/// Global dofs keyed by mesh entity so meshes with different cell orders can
/// be compared: vertex dofs by `(vertex, component)`, edge moments by the
/// sorted vertex pair with the sign of the `min → max` right-hand normal.
pub fn keyed_dofs(mesh: &PolygonalMesh, dofmap: &DofMap, dofs: &[f64]) -> BTreeMap<(usize, usize, usize), f64> {
    let mut out = BTreeMap::new();
    for v in 0..mesh.n_vertices() {
        for c in 0..3 {
            out.insert((0, v, c), dofs[dofmap.vertex_dof(v, c)]);
        }
    }
    for (e, edge) in mesh.edges().iter().enumerate() {
        if let Some(g) = dofmap.edge_dof(e) {
            let [a, b] = edge.vertices;
            let sign = if a < b { 1.0 } else { -1.0 };
            out.insert((1, a.min(b), a.max(b)), sign * dofs[g]);
        }
    }
    out
}

/// `∫_K f` over a polygon: fan from vertex 0, tensor Gauss rule on each
/// triangle mapped from the square (collapsed coordinates).
pub fn fan_integral(poly: &[Point], points: usize, f: impl Fn(Point) -> f64) -> f64 {
    let g = gauss_legendre(points).unwrap();
    let mut total = 0.0;
    for i in 1..poly.len() - 1 {
        let (a, b, c) = (poly[0], poly[i], poly[i + 1]);
        let jac = (b - a).perp(&(c - a));
        for (u, wu) in g.unit_interval() {
            for (v, wv) in g.unit_interval() {
                let x = a + u * (b - a) + u * v * (c - b);
                total += wu * wv * u * jac * f(x);
            }
        }
    }
    total
}

/// One polygon of a kind chosen by the seed: triangle, square, pentagon or hexagon.
pub fn random_polygon(seed: u64) -> Vec<Point> {
    let mut r = rng(seed);
    match seed % 4 {
        0 => random_triangle(&mut r),
        1 => random_square(&mut r),
        k => {
            let poly = voronoi_polygons(&[3 + k as usize], 1, seed / 4).remove(0);
            place(&mut r, poly)
        }
    }
}
