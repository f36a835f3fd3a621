mod support;

use c1vem_core::analysis::{compute_field_errors, interpolation_errors};
use c1vem_core::element::{project_energy, CellGeometry, SmoothField};
use c1vem_core::mesh::{build_uniform_triangle_mesh, build_voronoi_mesh};
use c1vem_core::polyspace::{eval_poly, eval_poly_gradient, eval_poly_hessian, ScaledMonomialBasis};
use c1vem_core::{
    convergence_study, manufactured_square, number_dofs, ElementSpec, Material, Point, PolygonalMesh, Solution,
};
use nalgebra::{DVector, Matrix2, Vector2};
use proptest::prelude::*;
use rand::Rng;
use support::rng;

/// The cellwise projection `Π^K_k v` of a discrete function as a field.
struct Piecewise {
    cells: Vec<(Vec<Point>, ScaledMonomialBasis, Vec<f64>)>,
}

impl Piecewise {
    fn new(mesh: &PolygonalMesh, spec: ElementSpec, dofs: &[f64]) -> Self {
        let dofmap = number_dofs(mesh, spec);
        let cells = (0..mesh.n_cells())
            .map(|c| {
                let geom = CellGeometry::new(mesh.cell_polygon(c)).unwrap();
                let proj = project_energy(&geom, spec, &Material::default()).unwrap();
                let local: DVector<f64> = dofmap.gather(mesh, c, dofs);
                let coeffs = (&proj.pi_star * local).as_slice().to_vec();
                (geom.vertices, proj.basis, coeffs)
            })
            .collect();
        Self { cells }
    }

    fn locate(&self, p: Point) -> (&ScaledMonomialBasis, &[f64]) {
        let inside = |poly: &[Point]| {
            (0..poly.len()).all(|i| (poly[(i + 1) % poly.len()] - poly[i]).perp(&(p - poly[i])) >= -1e-14)
        };
        let (_, b, c) = self.cells.iter().find(|(poly, _, _)| inside(poly)).expect("point in mesh");
        (b, c)
    }
}

impl SmoothField for Piecewise {
    fn value(&self, p: Point) -> f64 {
        let (b, c) = self.locate(p);
        eval_poly(b, c, p)
    }

    fn gradient(&self, p: Point) -> Vector2<f64> {
        let (b, c) = self.locate(p);
        eval_poly_gradient(b, c, p)
    }

    fn hessian(&self, p: Point) -> Matrix2<f64> {
        let (b, c) = self.locate(p);
        eval_poly_hessian(b, c, p)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn reconstruction_has_zero_error_against_itself(seed in any::<u64>(), k in 2usize..=3, cells in 1usize..12) {
        let spec = ElementSpec::new(k).unwrap();
        let mesh = build_voronoi_mesh(cells, seed, 2).unwrap();
        let n = number_dofs(&mesh, spec).n_dofs();
        let mut r = rng(seed);
        let dofs: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..1.0)).collect();
        let field = Piecewise::new(&mesh, spec, &dofs);
        let sol = Solution { dofs, residual: 0.0 };
        let rep = compute_field_errors(&field, &mesh, spec, &Material::default(), &sol).unwrap();
        prop_assert!(rep.rel_l2 <= 1e-11 && rep.rel_h1 <= 1e-11 && rep.rel_h2 <= 1e-11, "{:?}", rep);
    }
}

fn sequences() -> Vec<(String, Vec<PolygonalMesh>)> {
    vec![
        ("triangles".into(), [4, 8, 16, 32].iter().map(|&n| build_uniform_triangle_mesh(n).unwrap()).collect()),
        ("voronoi".into(), [25, 100, 400, 1600].iter().map(|&n| build_voronoi_mesh(n, 1, 0).unwrap()).collect()),
    ]
}

#[test]
fn refinement_decreases_every_error() {
    let case = manufactured_square(1.0);
    for (label, meshes) in sequences() {
        for spec in [ElementSpec::VEM31, ElementSpec::VEM32] {
            let t = convergence_study(&case, &meshes, spec, &Material::default()).unwrap();
            for w in t.rows.windows(2) {
                assert!(w[1].rel_l2 < w[0].rel_l2, "{label} {}", spec.name());
                assert!(w[1].rel_h1 < w[0].rel_h1, "{label} {}", spec.name());
                assert!(w[1].rel_h2 < w[0].rel_h2, "{label} {}", spec.name());
            }
            if label == "triangles" {
                let (ls, fp) = (t.least_squares.unwrap(), t.finest_pair().unwrap());
                assert!((ls.l2 - fp.l2).abs() <= 0.3);
                assert!((ls.h1 - fp.h1).abs() <= 0.3);
                assert!((ls.h2 - fp.h2).abs() <= 0.3);
            }
        }
    }
}

#[test]
fn interpolation_error_decays_at_the_energy_rate() {
    let case = manufactured_square(1.0);
    let meshes: Vec<PolygonalMesh> = [4, 8, 16].iter().map(|&n| build_uniform_triangle_mesh(n).unwrap()).collect();
    for spec in [ElementSpec::VEM31, ElementSpec::VEM32] {
        let e: Vec<f64> = meshes
            .iter()
            .map(|m| interpolation_errors(&case, m, spec, &Material::default()).unwrap().rel_h2)
            .collect();
        let slope = (e[1] / e[2]).log2();
        assert!(slope >= spec.k() as f64 - 1.2, "{}: {slope}", spec.name());
    }
}

#[test]
fn manufactured_data_is_clamped() {
    let case = manufactured_square(2.5);
    let mesh = build_voronoi_mesh(50, 4, 0).unwrap();
    for spec in [ElementSpec::VEM31, ElementSpec::VEM32] {
        let d = number_dofs(&mesh, spec);
        let wi = c1vem_core::interpolate(&case, &mesh, &d);
        for g in 0..d.n_dofs() {
            if d.is_constrained(g) {
                assert!(wi[g].abs() <= 1e-14);
            }
        }
    }
    assert_eq!(case.load(Point::new(0.5, 0.5)), 12.5);
}
