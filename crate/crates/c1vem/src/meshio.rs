//! Line-oriented text format for polygonal meshes.
//!
//! ```text
//! c1vem-mesh 1
//! vertices 4
//! 0 0
//! 1 0
//! 1 1
//! 0 1
//! cells 1
//! 4 0 1 2 3
//! ```
//!
//! Coordinates carry 17 significant digits, so a write/read round trip is
//! bit-exact. Cells list 0-based vertex indices counter-clockwise. Edges and
//! boundary flags are rebuilt on load.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use c1vem_core::mesh::MeshError;
use c1vem_core::{Point, PolygonalMesh};

pub const HEADER: &str = "c1vem-mesh 1";

#[derive(Debug, thiserror::Error)]
pub enum MeshIoError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid mesh: {0}")]
    Invalid(#[from] MeshError),
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshIoError {
    MeshIoError::Parse { line, message: message.into() }
}

/// `x` the way C's `%.17g` prints it.
pub fn format_g17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..17).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{x:.*}", (16 - exp) as usize))
    }
}

pub fn mesh_to_string(mesh: &PolygonalMesh) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "vertices {}", mesh.n_vertices()).unwrap();
    for p in mesh.vertices() {
        writeln!(out, "{} {}", format_g17(p.x), format_g17(p.y)).unwrap();
    }
    writeln!(out, "cells {}", mesh.n_cells()).unwrap();
    for cell in mesh.cells() {
        write!(out, "{}", cell.len()).unwrap();
        for v in cell {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_mesh(mesh: &PolygonalMesh, path: impl AsRef<Path>) -> Result<(), MeshIoError> {
    let path = path.as_ref();
    fs::write(path, mesh_to_string(mesh))
        .map_err(|source| MeshIoError::Io { path: path.display().to_string(), source })
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<PolygonalMesh, MeshIoError> {
    let path = path.as_ref();
    let text =
        fs::read_to_string(path).map_err(|source| MeshIoError::Io { path: path.display().to_string(), source })?;
    parse_mesh(&text)
}

/// Blank lines are skipped; line numbers in errors are 1-based.
pub fn parse_mesh(text: &str) -> Result<PolygonalMesh, MeshIoError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let mut last = 0;
    let mut next = |what: &str| -> Result<(usize, &str), MeshIoError> {
        match lines.next() {
            Some((n, l)) => {
                last = n;
                Ok((n, l))
            }
            None => Err(parse_err(last + 1, format!("unexpected end of file, expected {what}"))),
        }
    };

    let (n, header) = next("header")?;
    if header != HEADER {
        return Err(parse_err(n, format!("expected header `{HEADER}`, found `{header}`")));
    }
    let count = |n: usize, line: &str, key: &str| -> Result<usize, MeshIoError> {
        match line.split_whitespace().collect::<Vec<_>>().as_slice() {
            [k, c] if *k == key => c.parse().map_err(|_| parse_err(n, format!("bad {key} count `{c}`"))),
            _ => Err(parse_err(n, format!("expected `{key} <count>`, found `{line}`"))),
        }
    };

    let (n, line) = next("vertex count")?;
    let nv = count(n, line, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for i in 0..nv {
        let (n, line) = next("vertex coordinates")?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [x, y] = fields.as_slice() else {
            return Err(parse_err(n, format!("vertex {i}: expected `x y`, found `{line}`")));
        };
        let coord = |s: &str| -> Result<f64, MeshIoError> {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(n, format!("vertex {i}: bad coordinate `{s}`")))
        };
        vertices.push(Point::new(coord(x)?, coord(y)?));
    }

    let (n, line) = next("cell count")?;
    let nc = count(n, line, "cells")?;
    if nc == 0 {
        return Err(parse_err(n, "mesh has no cells"));
    }
    let mut cells = Vec::with_capacity(nc);
    for c in 0..nc {
        let (n, line) = next("cell")?;
        let fields: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| parse_err(n, format!("cell {c}: bad index `{s}`"))))
            .collect::<Result<_, _>>()?;
        let Some((&len, ids)) = fields.split_first() else {
            return Err(parse_err(n, format!("cell {c}: empty line")));
        };
        if ids.len() != len {
            return Err(parse_err(n, format!("cell {c}: declares {len} vertices but lists {}", ids.len())));
        }
        if let Some(&v) = ids.iter().find(|&&v| v >= nv) {
            return Err(parse_err(n, format!("cell {c} references vertex {v}, but there are only {nv} vertices")));
        }
        cells.push(ids.to_vec());
    }
    if let Ok((n, line)) = next("end of file") {
        return Err(parse_err(n, format!("trailing content `{line}`")));
    }
    Ok(PolygonalMesh::new(vertices, cells)?)
}
