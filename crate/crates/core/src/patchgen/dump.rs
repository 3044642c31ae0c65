//! Plain-text mesh format.
//!
//! ```text
//! vertices:
//! 0 0 0
//! 1 0.5 0
//! ...
//! cells:
//! 0 quad 0 1 4 3 M
//! 1 tri 1 2 4 M'
//! ...
//! boundary:
//! 0 0
//! ...
//! ```
//!
//! Boundary lines are `cell local_edge`. Coordinates are written with the
//! shortest representation that parses back to the same `f64`.

use std::fmt::Write as _;

use super::mesh::{Cell, CellKind, Mesh, Region};
use super::MeshError;

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("vertices:\n");
    for (i, v) in mesh.vertices.iter().enumerate() {
        let _ = writeln!(out, "{i} {} {}", v[0], v[1]);
    }
    out.push_str("cells:\n");
    for (i, c) in mesh.cells.iter().enumerate() {
        let kind = match c.kind {
            CellKind::Quad => "quad",
            CellKind::Tri => "tri",
        };
        let _ = write!(out, "{i} {kind}");
        for v in &c.vertices {
            let _ = write!(out, " {v}");
        }
        let _ = writeln!(out, " {}", c.region);
    }
    out.push_str("boundary:\n");
    for (c, k) in &mesh.boundary_edges {
        let _ = writeln!(out, "{c} {k}");
    }
    out
}

/// Parses the format written by [`write_mesh`]. Strip (thin-cell) markers are
/// not part of the format and come back as `None`.
pub fn read_mesh(text: &str) -> Result<Mesh, MeshError> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Vertices,
        Cells,
        Boundary,
    }
    let bad = |line: usize, msg: &str| MeshError::Parse(format!("line {}: {msg}", line + 1));
    let mut section = Section::None;
    let mut vertices = Vec::new();
    let mut cells = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        match line {
            "vertices:" => section = Section::Vertices,
            "cells:" => section = Section::Cells,
            "boundary:" => section = Section::Boundary,
            _ => {
                let tok: Vec<&str> = line.split_whitespace().collect();
                match section {
                    Section::Vertices => {
                        if tok.len() != 3 {
                            return Err(bad(ln, "expected `index x y`"));
                        }
                        let x = tok[1].parse().map_err(|_| bad(ln, "bad x"))?;
                        let y = tok[2].parse().map_err(|_| bad(ln, "bad y"))?;
                        vertices.push([x, y]);
                    }
                    Section::Cells => {
                        let kind = match tok.get(1) {
                            Some(&"quad") => CellKind::Quad,
                            Some(&"tri") => CellKind::Tri,
                            _ => return Err(bad(ln, "unknown cell kind")),
                        };
                        let n = kind.vertex_count();
                        if tok.len() != n + 3 {
                            return Err(bad(ln, "wrong number of fields"));
                        }
                        let verts = tok[2..2 + n]
                            .iter()
                            .map(|t| t.parse::<usize>().map_err(|_| bad(ln, "bad vertex")))
                            .collect::<Result<Vec<_>, _>>()?;
                        if verts.iter().any(|&v| v >= vertices.len()) {
                            return Err(bad(ln, "vertex index out of range"));
                        }
                        let region =
                            Region::from_label(tok[n + 2]).ok_or_else(|| bad(ln, "bad region"))?;
                        cells.push(Cell {
                            kind,
                            vertices: verts,
                            region,
                            thin: None,
                        });
                    }
                    // recomputed from the cells
                    Section::Boundary => {}
                    Section::None => return Err(bad(ln, "data before a section header")),
                }
            }
        }
    }
    Mesh::new(vertices, cells)
}
