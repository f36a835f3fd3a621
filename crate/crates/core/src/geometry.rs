//! Planar points and polygon measures.

use alloc::vec::Vec;
use nalgebra::{ComplexField, Vector2};

pub type Point = Vector2<f64>;

#[inline]
pub fn point(x: f64, y: f64) -> Point {
    Vector2::new(x, y)
}

#[inline]
pub fn cross(a: &Point, b: &Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Shoelace area; positive for counter-clockwise loops.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut twice = 0.0;
    for i in 0..n {
        twice += cross(&poly[i], &poly[(i + 1) % n]);
    }
    0.5 * twice
}

/// Area centroid. Falls back to the vertex mean for zero-area loops.
pub fn centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    // Shift to the first vertex to keep the shoelace sums well conditioned.
    let o = poly[0];
    let mut a = 0.0;
    let mut c = Point::zeros();
    for i in 0..n {
        let p = poly[i] - o;
        let q = poly[(i + 1) % n] - o;
        let w = cross(&p, &q);
        a += w;
        c += (p + q) * w;
    }
    if a.abs() < f64::MIN_POSITIVE {
        let mut s = Point::zeros();
        for p in poly {
            s += p;
        }
        return s / n as f64;
    }
    o + c / (3.0 * a)
}

/// Maximum distance between any two vertices.
pub fn diameter(poly: &[Point]) -> f64 {
    let mut d2: f64 = 0.0;
    for (i, p) in poly.iter().enumerate() {
        for q in &poly[i + 1..] {
            d2 = d2.max((p - q).norm_squared());
        }
    }
    ComplexField::sqrt(d2)
}

pub fn gather(vertices: &[Point], loop_: &[usize]) -> Vec<Point> {
    loop_.iter().map(|&i| vertices[i]).collect()
}

/// True if the closed segments `[a, b]` and `[c, d]` share a point.
pub fn segments_touch(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let orient = |p: &Point, q: &Point, r: &Point| cross(&(q - p), &(r - p));
    let on_segment = |p: &Point, q: &Point, r: &Point| {
        r.x >= p.x.min(q.x) && r.x <= p.x.max(q.x) && r.y >= p.y.min(q.y) && r.y <= p.y.max(q.y)
    };
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// True if the loop has no crossing or overlapping edges.
pub fn is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if a == b {
            return false;
        }
        // Consecutive edges may be collinear but must not fold back.
        let c = poly[(i + 2) % n];
        if cross(&(b - a), &(c - b)) == 0.0 && (b - a).dot(&(c - b)) < 0.0 {
            return false;
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_touch(&a, &b, &poly[j], &poly[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}
