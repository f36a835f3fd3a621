//! Manufactured solutions, discrete error norms and convergence slopes.
//!
//! A virtual solution is never evaluated pointwise. Errors are measured
//! against the cellwise energy projection `Π^K_k w_h`, and the reference
//! norms of the exact solution go through the same quadrature.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{ComplexField, DVector, Matrix2, Vector2};

use crate::assembly::{
    assemble, cell_geometry, number_dofs, solve, AssemblyError, DofMap, SolveError, Solution,
};
use crate::element::{normal_moment, project_energy, ElementSpec, Material, PlateModel, SmoothField};
use crate::geometry::Point;
use crate::mesh::PolygonalMesh;
use crate::polyspace::{eval_poly, eval_poly_gradient, eval_poly_hessian, polygon_quadrature};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StudyError {
    #[error("mesh {mesh}: {source}")]
    Assembly { mesh: usize, source: AssemblyError },
    #[error("mesh {mesh}: {source}")]
    Solve { mesh: usize, source: SolveError },
}

/// An exact solution with its load `f = D Δ²w`.
pub struct ManufacturedCase {
    pub name: String,
    exact: Box<dyn SmoothField + Send + Sync>,
    load: Box<dyn Fn(Point) -> f64 + Send + Sync>,
}

impl core::fmt::Debug for ManufacturedCase {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ManufacturedCase").field("name", &self.name).finish_non_exhaustive()
    }
}

impl ManufacturedCase {
    pub fn new(
        name: impl Into<String>,
        exact: impl SmoothField + Send + Sync + 'static,
        load: impl Fn(Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { name: name.into(), exact: Box::new(exact), load: Box::new(load) }
    }

    pub fn exact(&self) -> &(dyn SmoothField + Send + Sync) {
        self.exact.as_ref()
    }

    pub fn load(&self, p: Point) -> f64 {
        (self.load)(p)
    }

    /// The same exact solution with the load replaced.
    pub fn with_load(self, load: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        Self { load: Box::new(load), ..self }
    }
}

/// `w = a(x) a(y)` with `a(t) = t²(t − 1)²`, clamped on the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampedSquareBubble;

impl ClampedSquareBubble {
    fn a(t: f64) -> [f64; 5] {
        // a, a', a'', a''', a''''
        let s = t * t - t;
        [s * s, 2.0 * s * (2.0 * t - 1.0), 12.0 * t * t - 12.0 * t + 2.0, 24.0 * t - 12.0, 24.0]
    }

    pub fn biharmonic(&self, p: Point) -> f64 {
        let (ax, ay) = (Self::a(p.x), Self::a(p.y));
        ax[4] * ay[0] + 2.0 * ax[2] * ay[2] + ax[0] * ay[4]
    }
}

impl SmoothField for ClampedSquareBubble {
    fn value(&self, p: Point) -> f64 {
        Self::a(p.x)[0] * Self::a(p.y)[0]
    }

    fn gradient(&self, p: Point) -> Vector2<f64> {
        let (ax, ay) = (Self::a(p.x), Self::a(p.y));
        Vector2::new(ax[1] * ay[0], ax[0] * ay[1])
    }

    fn hessian(&self, p: Point) -> Matrix2<f64> {
        let (ax, ay) = (Self::a(p.x), Self::a(p.y));
        let xy = ax[1] * ay[1];
        Matrix2::new(ax[2] * ay[0], xy, xy, ax[0] * ay[2])
    }
}

/// The clamped-square test problem for rigidity `rigidity`.
pub fn manufactured_square(rigidity: f64) -> ManufacturedCase {
    ManufacturedCase::new("clamped-square", ClampedSquareBubble, move |p| {
        rigidity * ClampedSquareBubble.biharmonic(p)
    })
}

/// Global dof vector of the interpolant: `g_i(w_I) = g_i(w)` for every dof.
pub fn interpolate(case: &ManufacturedCase, mesh: &PolygonalMesh, dofmap: &DofMap) -> Vec<f64> {
    interpolate_field(case.exact(), mesh, dofmap)
}

pub fn interpolate_field<W: SmoothField + ?Sized>(w: &W, mesh: &PolygonalMesh, dofmap: &DofMap) -> Vec<f64> {
    let mut out = alloc::vec![0.0; dofmap.n_dofs()];
    for (v, &p) in mesh.vertices().iter().enumerate() {
        let g = w.gradient(p);
        out[dofmap.vertex_dof(v, 0)] = w.value(p);
        out[dofmap.vertex_dof(v, 1)] = g.x;
        out[dofmap.vertex_dof(v, 2)] = g.y;
    }
    for (e, edge) in mesh.edges().iter().enumerate() {
        if let Some(d) = dofmap.edge_dof(e) {
            let [a, b] = edge.vertices;
            let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
            let t = (pb - pa).normalize();
            out[d] = normal_moment(w, pa, pb, Vector2::new(t.y, -t.x));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Largest cell diameter.
    pub h: f64,
    pub h_mean: f64,
    pub n_dofs: usize,
    pub rel_l2: f64,
    pub rel_h1: f64,
    pub rel_h2: f64,
    pub residual: f64,
}

/// Relative `L²`, `H¹`-seminorm and `H²`-seminorm errors of `Π^K_k w_h`
/// against the exact solution, with a rule of degree 2k + 4 on each cell.
pub fn compute_errors(
    case: &ManufacturedCase,
    mesh: &PolygonalMesh,
    spec: ElementSpec,
    material: &Material,
    solution: &Solution,
) -> Result<ErrorReport, AssemblyError> {
    compute_field_errors(case.exact(), mesh, spec, material, solution)
}

pub fn compute_field_errors<W: SmoothField + ?Sized>(
    w: &W,
    mesh: &PolygonalMesh,
    spec: ElementSpec,
    material: &Material,
    solution: &Solution,
) -> Result<ErrorReport, AssemblyError> {
    let dofmap = number_dofs(mesh, spec);
    let mut err = [0.0f64; 3];
    let mut reference = [0.0f64; 3];
    for cell in 0..mesh.n_cells() {
        let geom = cell_geometry(mesh, cell)?;
        let proj = project_energy(&geom, spec, material)
            .map_err(|source| AssemblyError::Element { cell, source })?;
        let local: DVector<f64> = dofmap.gather(mesh, cell, &solution.dofs);
        let coeffs = &proj.pi_star * local;
        let c = coeffs.as_slice();
        let quad = polygon_quadrature(&geom.vertices, 2 * spec.k() + 4)
            .map_err(|e| AssemblyError::Element { cell, source: e.into() })?;
        for (p, wt) in quad.iter() {
            let (u, gu, hu) = (w.value(p), w.gradient(p), w.hessian(p));
            let (v, gv, hv) = (
                eval_poly(&proj.basis, c, p),
                eval_poly_gradient(&proj.basis, c, p),
                eval_poly_hessian(&proj.basis, c, p),
            );
            err[0] += wt * (u - v) * (u - v);
            err[1] += wt * (gu - gv).norm_squared();
            err[2] += wt * (hu - hv).norm_squared();
            reference[0] += wt * u * u;
            reference[1] += wt * gu.norm_squared();
            reference[2] += wt * hu.norm_squared();
        }
    }
    let rel = |i: usize| ComplexField::sqrt(err[i]) / ComplexField::sqrt(reference[i]);
    Ok(ErrorReport {
        h: mesh.h_max(),
        h_mean: mesh.h_mean(),
        n_dofs: dofmap.n_dofs(),
        rel_l2: rel(0),
        rel_h1: rel(1),
        rel_h2: rel(2),
        residual: solution.residual,
    })
}

/// Errors of the interpolant `w_I` (through `Π^K_k w_I`).
pub fn interpolation_errors(
    case: &ManufacturedCase,
    mesh: &PolygonalMesh,
    spec: ElementSpec,
    material: &Material,
) -> Result<ErrorReport, AssemblyError> {
    let dofmap = number_dofs(mesh, spec);
    let solution = Solution { dofs: interpolate(case, mesh, &dofmap), residual: 0.0 };
    compute_errors(case, mesh, spec, material, &solution)
}

/// Assemble, solve and measure one mesh.
pub fn solve_case(
    case: &ManufacturedCase,
    mesh: &PolygonalMesh,
    spec: ElementSpec,
    material: &Material,
) -> Result<(Solution, ErrorReport), StudyError> {
    let model = PlateModel::new(*material, |p: Point| case.load(p));
    let system = assemble(mesh, spec, &model).map_err(|source| StudyError::Assembly { mesh: 0, source })?;
    let solution = solve(&system).map_err(|source| StudyError::Solve { mesh: 0, source })?;
    let report = compute_errors(case, mesh, spec, material, &solution)
        .map_err(|source| StudyError::Assembly { mesh: 0, source })?;
    Ok((solution, report))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slopes {
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
}

/// Error rows ordered by decreasing `h` with fitted log–log slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ErrorReport>,
    /// Slope between each pair of consecutive rows.
    pub pairwise: Vec<Slopes>,
    /// Least-squares slope over all rows; `None` with fewer than two rows.
    pub least_squares: Option<Slopes>,
}

fn lsq_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

impl ConvergenceTable {
    pub fn from_rows(rows: Vec<ErrorReport>) -> Self {
        Self::from_rows_with(rows, |r| r.h)
    }

    /// Fits against the mesh size `size(row)` instead of `row.h`.
    pub fn from_rows_with(mut rows: Vec<ErrorReport>, size: impl Fn(&ErrorReport) -> f64) -> Self {
        rows.sort_by(|a, b| size(b).partial_cmp(&size(a)).unwrap_or(core::cmp::Ordering::Equal));
        let ln = |x: f64| ComplexField::ln(x);
        let pairwise = rows
            .windows(2)
            .map(|w| {
                let dh = ln(size(&w[0]) / size(&w[1]));
                Slopes {
                    l2: ln(w[0].rel_l2 / w[1].rel_l2) / dh,
                    h1: ln(w[0].rel_h1 / w[1].rel_h1) / dh,
                    h2: ln(w[0].rel_h2 / w[1].rel_h2) / dh,
                }
            })
            .collect();
        let least_squares = (rows.len() >= 2).then(|| {
            let xs: Vec<f64> = rows.iter().map(|r| ln(size(r))).collect();
            let fit = |f: fn(&ErrorReport) -> f64| {
                let ys: Vec<f64> = rows.iter().map(|r| ln(f(r))).collect();
                lsq_slope(&xs, &ys)
            };
            Slopes { l2: fit(|r| r.rel_l2), h1: fit(|r| r.rel_h1), h2: fit(|r| r.rel_h2) }
        });
        Self { rows, pairwise, least_squares }
    }

    /// Slope between the two finest meshes.
    pub fn finest_pair(&self) -> Option<Slopes> {
        self.pairwise.last().copied()
    }
}

/// Solves every mesh in order and fits slopes.
pub fn convergence_study(
    case: &ManufacturedCase,
    meshes: &[PolygonalMesh],
    spec: ElementSpec,
    material: &Material,
) -> Result<ConvergenceTable, StudyError> {
    let rows = meshes
        .iter()
        .enumerate()
        .map(|(i, m)| {
            solve_case(case, m, spec, material).map(|(_, r)| r).map_err(|e| e.at_mesh(i))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ConvergenceTable::from_rows(rows))
}

impl StudyError {
    pub fn at_mesh(self, mesh: usize) -> Self {
        match self {
            Self::Assembly { source, .. } => Self::Assembly { mesh, source },
            Self::Solve { source, .. } => Self::Solve { mesh, source },
        }
    }
}
