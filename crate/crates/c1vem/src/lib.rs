//! File formats, a parallel convergence runner and the `c1vem` command line
//! around the numerical core in [`c1vem_core`].

pub mod cli;
pub mod meshio;
pub mod study;

pub use c1vem_core;
