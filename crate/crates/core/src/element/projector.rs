//! Energy projector, enhanced L² projector, stabilization and the local
//! stiffness and load.

use nalgebra::{DMatrix, DVector};

use super::traces::TraceRows;
use super::{
    dof_values_of, CellGeometry, DofKind, ElementError, ElementSpec, LocalPolynomial, Material,
};
use crate::geometry::Point;
use crate::polyspace::{gauss_legendre, gram_matrix, polygon_quadrature, poly_dim, ScaledMonomialBasis};

/// The energy projector onto `P_k` together with the matrices it is built from.
#[derive(Debug, Clone)]
pub struct EnergyProjection {
    /// Scaled monomials of degree k on the cell.
    pub basis: ScaledMonomialBasis,
    /// `dim P_k × n_dofs`: dof vector ↦ coefficients of `Π v`.
    pub pi_star: DMatrix<f64>,
    /// `n_dofs × dim P_k`: column α holds the dofs of `m_α`.
    pub dof_matrix: DMatrix<f64>,
    /// `a^K(m_α, m_β)`, evaluated with polygon quadrature.
    pub energy_gram: DMatrix<f64>,
    /// `dim P_k × n_dofs`: row α maps a dof vector to `a^K(m_α, v)` computed
    /// from the edge traces by integrating by parts twice.
    pub boundary_energy: DMatrix<f64>,
}

impl EnergyProjection {
    /// `a^K(p, v)` for `p = Σ c_α m_α` and the virtual function with dofs `dofs`.
    pub fn energy_against(&self, coeffs: &DVector<f64>, dofs: &DVector<f64>) -> f64 {
        coeffs.dot(&(&self.boundary_energy * dofs))
    }
}

/// Solves for `Π v ∈ P_k` with `a^K(Π v, q) = a^K(v, q)` for all `q ∈ P_k`,
/// `∫_∂K (Π v − v) = 0` and `∫_∂K ∇(Π v − v) = 0`.
///
/// The right-hand side `a^K(v, m_α)` comes from the traces alone:
/// `Σ_e ∫_e [M_nn(m_α) ∂v/∂n + M_nt(m_α) ∂v/∂t − D ∂_n Δm_α v]`, the volume
/// term `D Δ²m_α` vanishing for k ≤ 3. The singular part of the energy system
/// (on `P_1`) is closed by the three boundary constraints.
pub fn project_energy(
    cell: &CellGeometry,
    spec: ElementSpec,
    material: &Material,
) -> Result<EnergyProjection, ElementError> {
    let k = spec.k();
    let basis = cell.basis(k);
    let np = basis.dim();
    let layout = spec.layout(cell.n_vertices());
    let nd = layout.n_dofs();

    let mut energy_gram = DMatrix::zeros(np, np);
    let quad = polygon_quadrature(&cell.vertices, 2 * (k - 2))?;
    for (p, w) in quad.iter() {
        let hess = basis.hessians(p);
        for i in 0..np {
            let mi = material.moment(&hess[i]);
            for j in 0..np {
                energy_gram[(i, j)] += w * mi.component_mul(&hess[j]).sum();
            }
        }
    }

    let mut boundary_energy = DMatrix::zeros(np, nd);
    let mut constraint_dofs = DMatrix::zeros(3, nd);
    let mut constraint_poly = DMatrix::zeros(3, np);
    let gauss = gauss_legendre(spec.edge_gauss_points())?;
    for (j, edge) in cell.edges.iter().enumerate() {
        let (n, t) = (edge.normal, edge.tangent);
        for (s, ws) in gauss.unit_interval() {
            let w = ws * edge.length;
            let p = edge.point_at(s);
            let rows = TraceRows::at(&layout, j, edge, s);
            let vals = basis.eval(p);
            let grads = basis.gradients(p);
            let hess = basis.hessians(p);
            let third = basis.grad_laplacians(p);
            for a in 0..np {
                let m = material.moment(&hess[a]);
                let m_nn = n.dot(&(m * n));
                let m_nt = n.dot(&(m * t));
                let shear = material.rigidity * third[a].dot(&n);
                for i in 0..nd {
                    boundary_energy[(a, i)] += w
                        * (m_nn * rows.normal[i] + m_nt * rows.tangential[i] - shear * rows.value[i]);
                }

                constraint_poly[(0, a)] += w * vals[a];
                constraint_poly[(1, a)] += w * grads[a].x;
                constraint_poly[(2, a)] += w * grads[a].y;
            }
            for i in 0..nd {
                constraint_dofs[(0, i)] += w * rows.value[i];
                constraint_dofs[(1, i)] += w * (rows.normal[i] * n.x + rows.tangential[i] * t.x);
                constraint_dofs[(2, i)] += w * (rows.normal[i] * n.y + rows.tangential[i] * t.y);
            }
        }
    }

    // `a^K` vanishes on P_1 = span(m_0, m_1, m_2), so the energy equations
    // only fix the degree ≥ 2 coefficients and the boundary constraints then
    // fix the linear part.
    let high = np - 3;
    let g_high = energy_gram.view((3, 3), (high, high)).into_owned();
    let chol = g_high.cholesky().ok_or(ElementError::SingularProjector)?;
    let pi_high = chol.solve(&boundary_energy.rows(3, high).into_owned());
    let c_low = constraint_poly.columns(0, 3).into_owned();
    let c_rhs = &constraint_dofs - constraint_poly.columns(3, high) * &pi_high;
    let pi_low = c_low.lu().solve(&c_rhs).ok_or(ElementError::SingularProjector)?;
    let mut solution = DMatrix::zeros(np, nd);
    solution.rows_mut(0, 3).copy_from(&pi_low);
    solution.rows_mut(3, high).copy_from(&pi_high);
    let pi_star: DMatrix<f64> = solution.rows(0, np).into_owned();
    if !pi_star.iter().all(|x| x.is_finite()) {
        return Err(ElementError::SingularProjector);
    }

    let mut dof_matrix = DMatrix::zeros(nd, np);
    let mut unit = alloc::vec![0.0; np];
    for a in 0..np {
        unit[a] = 1.0;
        let field = LocalPolynomial { basis: &basis, coeffs: &unit };
        dof_matrix.set_column(a, &dof_values_of(&field, cell, spec));
        unit[a] = 0.0;
    }

    Ok(EnergyProjection { basis, pi_star, dof_matrix, energy_gram, boundary_energy })
}

/// `Π⁰_{k−2}`: dof vector ↦ coefficients (in the degree k − 2 prefix of the
/// basis) of the L² projection onto `P_{k−2}`. In the enhanced space the
/// moments of `v` against `P_{k−2}` equal those of `Π v`, so this is the L²
/// projection of `Π v`.
pub fn project_l2(
    cell: &CellGeometry,
    spec: ElementSpec,
    projection: &EnergyProjection,
) -> Result<DMatrix<f64>, ElementError> {
    let low = poly_dim(spec.k() - 2);
    let gram = gram_matrix(&cell.vertices, &projection.basis)?;
    let low_gram = gram.view((0, 0), (low, low)).into_owned();
    let mixed = gram.rows(0, low) * &projection.pi_star;
    let chol = low_gram.cholesky().ok_or(ElementError::SingularProjector)?;
    Ok(chol.solve(&mixed))
}

/// Scale that turns each dof into a displacement-like quantity:
/// 1 for values, `h_K` for gradients, `h_K / |e|` for normal moments.
fn dof_scale(cell: &CellGeometry, spec: ElementSpec) -> DVector<f64> {
    let layout = spec.layout(cell.n_vertices());
    let h = cell.diameter;
    DVector::from_iterator(
        layout.n_dofs(),
        layout.kinds().into_iter().map(|kind| match kind {
            DofKind::Value { .. } => 1.0,
            DofKind::DerivX { .. } | DofKind::DerivY { .. } => h,
            DofKind::NormalMoment { edge } => h / cell.edges[edge].length,
        }),
    )
}

/// `S = D h_K⁻² (I − DΠ)ᵀ Λ² (I − DΠ)`, the scaled Euclidean product of the
/// dofs of `v − Π v`.
pub fn stabilization(
    cell: &CellGeometry,
    spec: ElementSpec,
    material: &Material,
    projection: &EnergyProjection,
) -> DMatrix<f64> {
    let nd = projection.dof_matrix.nrows();
    let residual = DMatrix::identity(nd, nd) - &projection.dof_matrix * &projection.pi_star;
    let scale = dof_scale(cell, spec);
    let scaled = DMatrix::from_diagonal(&scale) * residual;
    let s = scaled.transpose() * scaled * (material.rigidity / (cell.diameter * cell.diameter));
    (&s + s.transpose()) * 0.5
}

/// `K = Πᵀ G Π + S`.
pub fn local_stiffness(
    cell: &CellGeometry,
    spec: ElementSpec,
    material: &Material,
    projection: &EnergyProjection,
) -> DMatrix<f64> {
    let pi = &projection.pi_star;
    let consistency = pi.transpose() * &projection.energy_gram * pi;
    let k = consistency + stabilization(cell, spec, material, projection);
    (&k + k.transpose()) * 0.5
}

/// `(f_loc)_i = ∫_K f Π⁰_{k−2} φ_i`, with a rule exact to degree 2k + 2.
pub fn local_load<F: Fn(Point) -> f64>(
    cell: &CellGeometry,
    spec: ElementSpec,
    load: &F,
    pi0: &DMatrix<f64>,
) -> Result<DVector<f64>, ElementError> {
    let low = cell.basis(spec.k() - 2);
    let quad = polygon_quadrature(&cell.vertices, 2 * spec.k() + 2)?;
    let mut moments = DVector::zeros(low.dim());
    for (p, w) in quad.iter() {
        let f = load(p);
        if f != 0.0 {
            moments.axpy(w * f, &DVector::from_vec(low.eval(p)), 1.0);
        }
    }
    Ok(pi0.transpose() * moments)
}

#[derive(Debug, Clone)]
pub struct LocalElementMatrices {
    pub projection: EnergyProjection,
    /// `Π⁰_{k−2}` on dof vectors.
    pub pi0: DMatrix<f64>,
    pub stabilization: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub load: DVector<f64>,
}

impl LocalElementMatrices {
    pub fn pi_star(&self) -> &DMatrix<f64> {
        &self.projection.pi_star
    }
}

pub fn compute_local_matrices<F: Fn(Point) -> f64>(
    cell: &CellGeometry,
    spec: ElementSpec,
    material: &Material,
    load: &F,
) -> Result<LocalElementMatrices, ElementError> {
    let projection = project_energy(cell, spec, material)?;
    let pi0 = project_l2(cell, spec, &projection)?;
    let stab = stabilization(cell, spec, material, &projection);
    let pi = &projection.pi_star;
    let stiffness = pi.transpose() * &projection.energy_gram * pi + &stab;
    let stiffness = (&stiffness + stiffness.transpose()) * 0.5;
    let load = local_load(cell, spec, load, &pi0)?;
    Ok(LocalElementMatrices { projection, pi0, stabilization: stab, stiffness, load })
}
