//! Mesh families and a parallel convergence runner.
//!
//! Meshes are solved independently on a rayon pool. Rows come back in input
//! order whatever the completion order, and every solve is itself
//! deterministic, so the thread count never changes the numbers.

use std::num::NonZeroUsize;

use c1vem_core::analysis::{solve_case, StudyError};
use c1vem_core::mesh::{build_uniform_triangle_mesh, build_voronoi_mesh, MeshError};
use c1vem_core::{ConvergenceTable, ElementSpec, ErrorReport, ManufacturedCase, Material, PolygonalMesh};
use rayon::prelude::*;

pub const THREADS_ENV: &str = "C1VEM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFamily {
    /// Sizes are subdivisions N per side.
    Triangles,
    /// Sizes are cell counts.
    Voronoi { seed: u64, lloyd: usize },
}

impl MeshFamily {
    pub fn build(&self, size: usize) -> Result<PolygonalMesh, MeshError> {
        match *self {
            Self::Triangles => build_uniform_triangle_mesh(size),
            Self::Voronoi { seed, lloyd } => build_voronoi_mesh(size, seed, lloyd),
        }
    }

    /// File name stem for a generated mesh.
    pub fn stem(&self, size: usize) -> String {
        match *self {
            Self::Triangles => format!("triangles-N{size}"),
            Self::Voronoi { seed, lloyd: 0 } => format!("voronoi-{size}-s{seed}"),
            Self::Voronoi { seed, lloyd } => format!("voronoi-{size}-s{seed}-l{lloyd}"),
        }
    }
}

/// Worker count: 1 when `deterministic`, otherwise `C1VEM_THREADS` if set to
/// a positive integer, otherwise the available parallelism.
pub fn thread_count(deterministic: bool) -> usize {
    if deterministic {
        return 1;
    }
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<NonZeroUsize>().ok())
        .or_else(|| std::thread::available_parallelism().ok())
        .map_or(1, NonZeroUsize::get)
}

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

pub fn build_meshes(family: MeshFamily, sizes: &[usize], threads: usize) -> Result<Vec<PolygonalMesh>, MeshError> {
    with_pool(threads, || sizes.par_iter().map(|&s| family.build(s)).collect())
}

/// One error row per mesh, in input order. Errors carry the mesh index.
pub fn solve_all(
    case: &ManufacturedCase,
    meshes: &[PolygonalMesh],
    spec: ElementSpec,
    material: &Material,
    threads: usize,
) -> Result<Vec<ErrorReport>, StudyError> {
    with_pool(threads, || {
        meshes
            .par_iter()
            .enumerate()
            .map(|(i, m)| solve_case(case, m, spec, material).map(|(_, r)| r).map_err(|e| e.at_mesh(i)))
            .collect()
    })
}

pub fn run_convergence(
    case: &ManufacturedCase,
    meshes: &[PolygonalMesh],
    spec: ElementSpec,
    material: &Material,
    threads: usize,
) -> Result<ConvergenceTable, StudyError> {
    solve_all(case, meshes, spec, material, threads).map(ConvergenceTable::from_rows)
}
