use std::fmt;

use super::mesh::{Mesh, Point};

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// A vertex lies strictly inside an edge of a cell it does not belong to.
    HangingNode { vertex: usize, at: Point, cell: usize },
    /// The interiors of two cells intersect.
    Overlap { first: usize, second: usize },
    /// The cell's affine map has non-positive determinant.
    InvertedMap { cell: usize, det: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::HangingNode { vertex, at, cell } => write!(
                f,
                "hanging node {vertex} at ({}, {}) on an edge of cell {cell}",
                at[0], at[1]
            ),
            Violation::Overlap { first, second } => {
                write!(f, "cells {first} and {second} overlap")
            }
            Violation::InvertedMap { cell, det } => {
                write!(f, "cell {cell} is inverted (det = {det})")
            }
        }
    }
}

/// Lists every conformity defect. An empty report means the mesh is a
/// conforming partition: cells meet in nothing, a vertex, or a full edge.
pub fn validate_conformity(mesh: &Mesh) -> Vec<Violation> {
    let mut report = Vec::new();

    for (c, map) in mesh.cell_maps.iter().enumerate() {
        let det = map.det();
        if det <= 0.0 {
            report.push(Violation::InvertedMap { cell: c, det });
        }
    }

    for (c, cell) in mesh.cells.iter().enumerate() {
        let n = cell.vertices.len();
        for k in 0..n {
            let a = mesh.vertices[cell.vertices[k]];
            let b = mesh.vertices[cell.vertices[(k + 1) % n]];
            for (vid, &p) in mesh.vertices.iter().enumerate() {
                if cell.vertices.contains(&vid) {
                    continue;
                }
                if strictly_inside_segment(p, a, b) {
                    report.push(Violation::HangingNode {
                        vertex: vid,
                        at: p,
                        cell: c,
                    });
                }
            }
        }
    }

    let polys: Vec<Vec<Point>> = mesh
        .cells
        .iter()
        .map(|cell| cell.vertices.iter().map(|&v| mesh.vertices[v]).collect())
        .collect();
    for i in 0..polys.len() {
        for j in i + 1..polys.len() {
            if interiors_intersect(&polys[i], &polys[j]) {
                report.push(Violation::Overlap {
                    first: i,
                    second: j,
                });
            }
        }
    }
    report
}

fn strictly_inside_segment(p: Point, a: Point, b: Point) -> bool {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let r = [p[0] - a[0], p[1] - a[1]];
    let cross = d[0] * r[1] - d[1] * r[0];
    if cross.abs() > 1e-10 * len2 {
        return false;
    }
    let t = (d[0] * r[0] + d[1] * r[1]) / len2;
    t > 1e-10 && t < 1.0 - 1e-10
}

/// Separating-axis test for convex polygons; touching boundaries do not count.
fn interiors_intersect(p: &[Point], q: &[Point]) -> bool {
    let scale = p
        .iter()
        .chain(q.iter())
        .flat_map(|v| [v[0].abs(), v[1].abs()])
        .fold(0.0_f64, f64::max)
        .max(1.0);
    for poly in [p, q] {
        let n = poly.len();
        for k in 0..n {
            let a = poly[k];
            let b = poly[(k + 1) % n];
            let normal = [b[1] - a[1], a[0] - b[0]];
            let len = normal[0].hypot(normal[1]);
            let proj = |v: &Point| (normal[0] * v[0] + normal[1] * v[1]) / len;
            let (pmin, pmax) = bounds(p.iter().map(proj));
            let (qmin, qmax) = bounds(q.iter().map(proj));
            let tol = 1e-13 * scale;
            if pmax <= qmin + tol || qmax <= pmin + tol {
                return false;
            }
        }
    }
    true
}

fn bounds(it: impl Iterator<Item = f64>) -> (f64, f64) {
    it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
        (lo.min(x), hi.max(x))
    })
}
