//! The `c1vem` command line: `mesh`, `solve` and `convergence`.
//!
//! Exit codes: 0 success, 2 bad configuration, 3 mesh generation or file
//! I/O, 4 assembly or solver failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use c1vem_core::analysis::{compute_errors, StudyError};
use c1vem_core::mesh::check_shape_regularity;
use c1vem_core::{
    assemble, manufactured_square, solve, ConvergenceTable, ElementSpec, ErrorReport, ManufacturedCase, Material,
    PlateModel, Point, PolygonalMesh,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::meshio::{format_g17, read_mesh, write_mesh};
use crate::study::{build_meshes, run_convergence, thread_count, MeshFamily};

pub const CSV_HEADER: &str = "h,n_dofs,rel_L2,rel_H1,rel_H2,residual";
pub const SHAPE_HEADER: &str = "size,n_vertices,n_cells,rho_star,min_edge_ratio,h_max,h_mean,path";

#[derive(Debug, Parser)]
#[command(name = "c1vem", version, about = "C1 virtual elements for the clamped Kirchhoff plate on polygonal meshes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate meshes, write them and print their shape-regularity report.
    Mesh(MeshArgs),
    /// Solve the manufactured clamped-plate problem on one mesh.
    Solve(SolveArgs),
    /// Solve on a mesh sequence and fit convergence slopes.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Element {
    Vem31,
    Vem32,
}

impl Element {
    pub fn spec(self) -> ElementSpec {
        match self {
            Self::Vem31 => ElementSpec::VEM31,
            Self::Vem32 => ElementSpec::VEM32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeshType {
    Triangles,
    Voronoi,
}

#[derive(Debug, Args)]
pub struct MeshSelect {
    #[arg(long = "type", value_enum)]
    pub mesh_type: Option<MeshType>,
    /// Subdivisions per side for triangle meshes.
    #[arg(long = "N", value_delimiter = ',', value_name = "N,...")]
    pub n: Vec<usize>,
    /// Cell counts for Voronoi meshes.
    #[arg(long, value_delimiter = ',', value_name = "CELLS,...")]
    pub cells: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Lloyd relaxation sweeps applied to the Voronoi generators.
    #[arg(long, default_value_t = 0)]
    pub lloyd: usize,
}

#[derive(Debug, Args)]
pub struct MaterialArgs {
    /// Poisson ratio.
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub nu: f64,
    /// Bending rigidity.
    #[arg(long = "D", default_value_t = 1.0, allow_negative_numbers = true)]
    pub rigidity: f64,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[command(flatten)]
    pub select: MeshSelect,
    /// Output file for a single mesh, or directory for several.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub element: Element,
    /// Mesh file to solve on; alternatively generate one with --type.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[command(flatten)]
    pub select: MeshSelect,
    #[command(flatten)]
    pub material: MaterialArgs,
    /// Replace the manufactured load by f = 0.
    #[arg(long)]
    pub zero_load: bool,
    /// CSV output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the global dof vector, one value per line.
    #[arg(long)]
    pub solution: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long, value_enum)]
    pub element: Element,
    #[command(flatten)]
    pub select: MeshSelect,
    #[command(flatten)]
    pub material: MaterialArgs,
    /// CSV output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Single worker thread.
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Mesh(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Mesh(_) => 3,
            Self::Solver(_) => 4,
        }
    }
}

impl From<StudyError> for CliError {
    fn from(e: StudyError) -> Self {
        Self::Solver(e.to_string())
    }
}

impl MeshSelect {
    fn resolve(&self) -> Result<(MeshFamily, Vec<usize>), CliError> {
        let Some(kind) = self.mesh_type else {
            return Err(CliError::Config("--type triangles|voronoi is required".into()));
        };
        let (family, sizes, flag) = match kind {
            MeshType::Triangles => {
                if !self.cells.is_empty() {
                    return Err(CliError::Config("triangle meshes take --N, not --cells".into()));
                }
                (MeshFamily::Triangles, self.n.clone(), "--N")
            }
            MeshType::Voronoi => {
                if !self.n.is_empty() {
                    return Err(CliError::Config("Voronoi meshes take --cells, not --N".into()));
                }
                (MeshFamily::Voronoi { seed: self.seed, lloyd: self.lloyd }, self.cells.clone(), "--cells")
            }
        };
        if sizes.is_empty() {
            return Err(CliError::Config(format!("{flag} is required")));
        }
        if sizes.contains(&0) {
            return Err(CliError::Config(format!("{flag} values must be positive")));
        }
        Ok((family, sizes))
    }
}

impl MaterialArgs {
    fn material(&self) -> Result<Material, CliError> {
        Material::new(self.rigidity, self.nu).map_err(|e| CliError::Config(e.to_string()))
    }
}

pub fn csv_row(r: &ErrorReport) -> String {
    let g = format_g17;
    format!("{},{},{},{},{},{}", g(r.h), r.n_dofs, g(r.rel_l2), g(r.rel_h1), g(r.rel_h2), g(r.residual))
}

/// The table as CSV, with the finest-pair slopes in a trailing comment and
/// the least-squares slopes after it.
pub fn table_csv(table: &ConvergenceTable) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in &table.rows {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    if let Some(s) = table.finest_pair() {
        out.push_str(&format!("# slope_L2={:.4} slope_H1={:.4} slope_H2={:.4}\n", s.l2, s.h1, s.h2));
    }
    if let Some(s) = table.least_squares {
        out.push_str(&format!("# lsq_slope_L2={:.4} lsq_slope_H1={:.4} lsq_slope_H2={:.4}\n", s.l2, s.h1, s.h2));
    }
    out
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Mesh(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Mesh(format!("stdout: {e}"))),
    }
}

fn cmd_mesh(args: &MeshArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let (family, sizes) = args.select.resolve()?;
    let meshes = build_meshes(family, &sizes, thread_count(args.deterministic))
        .map_err(|e| CliError::Mesh(format!("mesh generation failed: {e}")))?;
    let paths: Vec<PathBuf> = match (&args.out, sizes.len()) {
        (Some(file), 1) => vec![file.clone()],
        (dir, _) => {
            let dir = dir.clone().unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir).map_err(|e| CliError::Mesh(format!("{}: {e}", dir.display())))?;
            sizes.iter().map(|&s| dir.join(format!("{}.mesh", family.stem(s)))).collect()
        }
    };
    let mut report = format!("{SHAPE_HEADER}\n");
    for ((mesh, path), size) in meshes.iter().zip(&paths).zip(&sizes) {
        write_mesh(mesh, path).map_err(|e| CliError::Mesh(e.to_string()))?;
        let r = check_shape_regularity(mesh);
        report.push_str(&format!(
            "{size},{},{},{},{},{},{},{}\n",
            mesh.n_vertices(),
            mesh.n_cells(),
            format_g17(r.rho_star),
            format_g17(r.min_edge_ratio),
            format_g17(r.h_max),
            format_g17(r.h_mean),
            path.display()
        ));
    }
    emit(None, &report, stdout)
}

fn load_case(material: &Material, zero_load: bool) -> ManufacturedCase {
    let case = manufactured_square(material.rigidity);
    if zero_load {
        case.with_load(|_: Point| 0.0)
    } else {
        case
    }
}

fn cmd_solve(args: &SolveArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let material = args.material.material()?;
    let mesh: PolygonalMesh = match (&args.mesh, args.select.mesh_type) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either --mesh or --type, not both".into())),
        (Some(path), None) => read_mesh(path).map_err(|e| CliError::Mesh(e.to_string()))?,
        (None, _) => {
            let (family, sizes) = args.select.resolve()?;
            let [size] = sizes.as_slice() else {
                return Err(CliError::Config("solve takes a single mesh size".into()));
            };
            family.build(*size).map_err(|e| CliError::Mesh(format!("mesh generation failed: {e}")))?
        }
    };
    let spec = args.element.spec();
    let case = load_case(&material, args.zero_load);
    let model = PlateModel::new(material, |p: Point| case.load(p));
    let system = assemble(&mesh, spec, &model).map_err(|e| CliError::Solver(format!("assembly failed: {e}")))?;
    let solution = solve(&system).map_err(|e| CliError::Solver(format!("solve failed: {e}")))?;
    let report = compute_errors(&case, &mesh, spec, &material, &solution)
        .map_err(|e| CliError::Solver(format!("error evaluation failed: {e}")))?;
    if let Some(path) = &args.solution {
        let text: String = solution.dofs.iter().map(|x| format!("{x}\n")).collect();
        fs::write(path, text).map_err(|e| CliError::Mesh(format!("{}: {e}", path.display())))?;
    }
    emit(args.out.as_deref(), &format!("{CSV_HEADER}\n{}\n", csv_row(&report)), stdout)
}

fn cmd_convergence(args: &ConvergenceArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let material = args.material.material()?;
    let (family, sizes) = args.select.resolve()?;
    if sizes.len() < 2 {
        return Err(CliError::Config("need ≥ 2 meshes".into()));
    }
    let threads = thread_count(args.deterministic);
    let meshes =
        build_meshes(family, &sizes, threads).map_err(|e| CliError::Mesh(format!("mesh generation failed: {e}")))?;
    let case = load_case(&material, false);
    let table = run_convergence(&case, &meshes, args.element.spec(), &material, threads).map_err(|e| {
        let (StudyError::Assembly { mesh, .. } | StudyError::Solve { mesh, .. }) = &e;
        CliError::Solver(format!("size {}: {e}", sizes[*mesh]))
    })?;
    emit(args.out.as_deref(), &table_csv(&table), stdout)
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Mesh(a) => cmd_mesh(a, stdout),
        Command::Solve(a) => cmd_solve(a, stdout),
        Command::Convergence(a) => cmd_convergence(a, stdout),
    }
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("c1vem: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
