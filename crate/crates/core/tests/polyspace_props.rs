mod support;

use c1vem_core::mesh::build_uniform_triangle_mesh;
use c1vem_core::polyspace::{gauss_legendre, gram_matrix, l2_project_polynomial, polygon_quadrature, ScaledMonomialBasis};
use c1vem_core::Point;
use proptest::prelude::*;
use rand::Rng;
use support::{random_polygon, rng};

/// `∫_K x^a y^b` by the divergence theorem: `∮ x^{a+1} y^b / (a+1) n_x ds`.
fn green_moment(poly: &[Point], a: i32, b: i32) -> f64 {
    let g = gauss_legendre(12).unwrap();
    let n = poly.len();
    let mut total = 0.0;
    for i in 0..n {
        let (p, q) = (poly[i], poly[(i + 1) % n]);
        let dy = q.y - p.y;
        for (t, w) in g.unit_interval() {
            let x = p + t * (q - p);
            total += w * dy * x.x.powi(a + 1) * x.y.powi(b) / (a + 1) as f64;
        }
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn polygon_rule_is_exact_to_its_degree(seed in any::<u64>(), degree in 0usize..=10) {
        let poly = random_polygon(seed);
        let c = poly.iter().sum::<Point>() / poly.len() as f64;
        let local: Vec<Point> = poly.iter().map(|p| p - c).collect();
        let quad = polygon_quadrature(&local, degree).unwrap();
        for d in 0..=degree as i32 {
            for b in 0..=d {
                let a = d - b;
                let exact = green_moment(&local, a, b);
                let got = quad.integrate(|p| p.x.powi(a) * p.y.powi(b));
                let scale = quad.integrate(|p| (p.x.powi(a) * p.y.powi(b)).abs());
                prop_assert!((got - exact).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE), "{a},{b}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn l2_projection_is_idempotent(seed in any::<u64>(), degree in 1usize..=4, target in 0usize..=3) {
        let poly = random_polygon(seed);
        let c = poly.iter().sum::<Point>() / poly.len() as f64;
        let h = poly.iter().flat_map(|p| poly.iter().map(move |q| (p - q).norm())).fold(0.0, f64::max);
        let basis = ScaledMonomialBasis::new(c, h, degree);
        let mut r = rng(seed);
        let coeffs: Vec<f64> = (0..basis.dim()).map(|_| r.random_range(-1.0..1.0)).collect();
        let once = l2_project_polynomial(&poly, &basis, &coeffs, target).unwrap();
        let low = basis.with_degree(target);
        let twice = l2_project_polynomial(&poly, &low, &once, target).unwrap();
        let eig = gram_matrix(&poly, &low).unwrap().symmetric_eigenvalues();
        let tol = 1e-14 * (eig.max() / eig.min()) * (1.0 + once.iter().fold(0.0f64, |m, a| m.max(a.abs())));
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() <= tol, "{a} vs {b}, tolerance {tol:e}");
        }
    }
}

#[test]
fn gram_conditioning_does_not_grow_under_refinement() {
    let cond = |n: usize| {
        let m = build_uniform_triangle_mesh(n).unwrap();
        (0..m.n_cells())
            .map(|c| {
                let poly = m.cell_polygon(c);
                let centroid = poly.iter().sum::<Point>() / 3.0;
                let basis = ScaledMonomialBasis::new(centroid, m.cell_diameter(c), 3);
                let eig = gram_matrix(&poly, &basis).unwrap().symmetric_eigenvalues();
                eig.max() / eig.min()
            })
            .fold(0.0, f64::max)
    };
    let coarse = cond(4);
    for n in [8, 16, 32] {
        assert!(cond(n) <= 1.01 * coarse, "N={n}: {} vs {coarse}", cond(n));
    }
}
