//! C¹-conforming virtual elements for the clamped Kirchhoff–Love plate.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure numerics:
//!
//! - [`mesh`]: polygonal meshes of the unit square (uniform right triangles,
//!   clipped random Voronoi tessellations) and a shape-regularity checker.
//! - [`polyspace`]: scaled monomials, Gauss–Legendre rules, polygon quadrature
//!   and polynomial L² projection.
//! - [`element`]: the local dof layout, Hermite edge traces, the energy
//!   projector, the enhanced L² projector, stabilization, stiffness and load.
//! - [`assembly`]: global dof numbering, clamped constraints, sparse assembly
//!   and an envelope Cholesky solver.
//! - [`analysis`]: manufactured solutions, error norms and convergence slopes.
//!
//! File formats, the command line and threading live in the `c1vem` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod assembly;
pub mod element;
pub mod geometry;
pub mod mesh;
pub mod polyspace;
pub mod sparse;

pub use analysis::{
    compute_errors, convergence_study, interpolate, manufactured_square, ConvergenceTable,
    ErrorReport, ManufacturedCase, Slopes, StudyError,
};
pub use assembly::{assemble, number_dofs, solve, DofMap, GlobalSystem, Solution};
pub use element::{ElementSpec, Material, PlateModel};
pub use geometry::Point;
pub use mesh::{PolygonalMesh, ShapeRegularityReport};
