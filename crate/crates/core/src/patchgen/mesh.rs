//! Conforming 2D meshes made of parallelograms or triangles.
//!
//! Cells are stored counterclockwise. Quadrilaterals use the bilinear corner
//! order `(0,0) (1,0) (1,1) (0,1)` of the reference square, triangles the
//! order `(0,0) (1,0) (0,1)` of the reference triangle. Every cell is the
//! image of its reference cell under an affine map, so quadrilaterals must be
//! parallelograms.

use std::collections::BTreeMap;
use std::fmt;

use super::MeshError;

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CellKind {
    Quad,
    Tri,
}

impl CellKind {
    pub fn vertex_count(self) -> usize {
        match self {
            CellKind::Quad => 4,
            CellKind::Tri => 3,
        }
    }

    /// Measure of the reference cell.
    pub fn reference_measure(self) -> f64 {
        match self {
            CellKind::Quad => 1.0,
            CellKind::Tri => 0.5,
        }
    }
}

/// Patch-decomposition label of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    /// Flat part made of long, thin cells.
    Flat,
    /// Shape-regular part of an edge patch.
    Top,
    /// Small shape-regular corner region of a corner patch.
    Corner,
    /// Overlapped edge patch surrounding the corner region.
    EdgePart,
}

impl Region {
    pub fn label(self) -> &'static str {
        match self {
            Region::Flat => "M",
            Region::Top => "M'",
            Region::Corner => "omega_c",
            Region::EdgePart => "omega_E",
        }
    }

    pub fn from_label(s: &str) -> Option<Region> {
        match s {
            "M" => Some(Region::Flat),
            "M'" => Some(Region::Top),
            "omega_c" => Some(Region::Corner),
            "omega_E" => Some(Region::EdgePart),
            _ => None,
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Coordinate direction in which a thin cell is short.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub kind: CellKind,
    pub vertices: Vec<usize>,
    pub region: Region,
    /// Thin direction when the cell belongs to an anisotropic strip.
    pub thin: Option<Axis>,
}

/// `x = jacobian * xi + offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    pub jacobian: [[f64; 2]; 2],
    pub offset: Point,
}

impl AffineMap {
    pub fn det(&self) -> f64 {
        let j = &self.jacobian;
        j[0][0] * j[1][1] - j[0][1] * j[1][0]
    }

    pub fn apply(&self, xi: Point) -> Point {
        let j = &self.jacobian;
        [
            j[0][0] * xi[0] + j[0][1] * xi[1] + self.offset[0],
            j[1][0] * xi[0] + j[1][1] * xi[1] + self.offset[1],
        ]
    }

    /// Inverse transpose, used to push reference gradients forward.
    pub fn inverse_transpose(&self) -> [[f64; 2]; 2] {
        let j = &self.jacobian;
        let d = self.det();
        [[j[1][1] / d, -j[1][0] / d], [-j[0][1] / d, j[0][0] / d]]
    }

    pub fn inverse_apply(&self, x: Point) -> Point {
        let j = &self.jacobian;
        let d = self.det();
        let r = [x[0] - self.offset[0], x[1] - self.offset[1]];
        [
            (j[1][1] * r[0] - j[0][1] * r[1]) / d,
            (-j[1][0] * r[0] + j[0][0] * r[1]) / d,
        ]
    }

    /// Reference gradient to physical gradient.
    pub fn push_gradient(&self, g: Point) -> Point {
        let t = self.inverse_transpose();
        [t[0][0] * g[0] + t[0][1] * g[1], t[1][0] * g[0] + t[1][1] * g[1]]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub cells: Vec<Cell>,
    pub cell_maps: Vec<AffineMap>,
    /// Unique edges as sorted vertex pairs.
    pub edges: Vec<(usize, usize)>,
    /// For each cell and local edge, the global edge index.
    pub cell_edges: Vec<Vec<usize>>,
    /// `(cell, local edge)` pairs on the domain boundary.
    pub boundary_edges: Vec<(usize, usize)>,
}

/// Local edge `k` of a cell joins local vertices `k` and `k + 1 (mod n)`.
pub fn local_edge(kind: CellKind, k: usize) -> (usize, usize) {
    let n = kind.vertex_count();
    (k, (k + 1) % n)
}

impl Mesh {
    /// Builds the derived connectivity and the affine maps. Fails if a
    /// quadrilateral is not a parallelogram or a map is degenerate.
    pub fn new(vertices: Vec<Point>, cells: Vec<Cell>) -> Result<Mesh, MeshError> {
        let mut cell_maps = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            if cell.vertices.len() != cell.kind.vertex_count() {
                return Err(MeshError::DegenerateGeometry(format!(
                    "cell {c} has {} vertices",
                    cell.vertices.len()
                )));
            }
            cell_maps.push(cell_map(&vertices, cell).map_err(|msg| {
                MeshError::DegenerateGeometry(format!("cell {c}: {msg}"))
            })?);
        }

        let mut edge_ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut edges = Vec::new();
        let mut cell_edges = Vec::with_capacity(cells.len());
        let mut edge_use: Vec<Vec<(usize, usize)>> = Vec::new();
        for (c, cell) in cells.iter().enumerate() {
            let n = cell.kind.vertex_count();
            let mut local = Vec::with_capacity(n);
            for k in 0..n {
                let (a, b) = local_edge(cell.kind, k);
                let (va, vb) = (cell.vertices[a], cell.vertices[b]);
                let key = (va.min(vb), va.max(vb));
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_use.push(Vec::new());
                    edges.len() - 1
                });
                edge_use[id].push((c, k));
                local.push(id);
            }
            cell_edges.push(local);
        }
        let boundary_edges = edge_use
            .iter()
            .filter(|u| u.len() == 1)
            .map(|u| u[0])
            .collect();

        Ok(Mesh {
            vertices,
            cells,
            cell_maps,
            edges,
            cell_edges,
            boundary_edges,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn cell_area(&self, c: usize) -> f64 {
        self.cell_maps[c].det().abs() * self.cells[c].kind.reference_measure()
    }

    pub fn area(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_area(c)).sum()
    }

    pub fn region_area(&self, region: Region) -> f64 {
        (0..self.num_cells())
            .filter(|&c| self.cells[c].region == region)
            .map(|c| self.cell_area(c))
            .sum()
    }

    pub fn region_count(&self, region: Region) -> usize {
        self.cells.iter().filter(|c| c.region == region).count()
    }

    pub fn boundary_edge_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.edges.len()];
        for &(c, k) in &self.boundary_edges {
            flags[self.cell_edges[c][k]] = true;
        }
        flags
    }

    pub fn boundary_vertex_flags(&self) -> Vec<bool> {
        let mut flags = vec![false; self.vertices.len()];
        for (e, on_boundary) in self.boundary_edge_flags().into_iter().enumerate() {
            if on_boundary {
                let (a, b) = self.edges[e];
                flags[a] = true;
                flags[b] = true;
            }
        }
        flags
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        (lo, hi)
    }

    pub fn all_quads(&self) -> bool {
        self.cells.iter().all(|c| c.kind == CellKind::Quad)
    }

    pub fn all_tris(&self) -> bool {
        self.cells.iter().all(|c| c.kind == CellKind::Tri)
    }

    pub fn cell_centroid(&self, c: usize) -> Point {
        let cell = &self.cells[c];
        let n = cell.vertices.len() as f64;
        let mut p = [0.0; 2];
        for &v in &cell.vertices {
            p[0] += self.vertices[v][0] / n;
            p[1] += self.vertices[v][1] / n;
        }
        p
    }

    /// Applies `f` to every vertex and rebuilds the maps.
    pub fn transformed(&self, f: impl Fn(Point) -> Point) -> Result<Mesh, MeshError> {
        let vertices = self.vertices.iter().map(|&p| f(p)).collect();
        Mesh::new(vertices, self.cells.clone())
    }

    /// Locates the cell containing `x` and returns it with reference coordinates.
    pub fn locate(&self, x: Point) -> Option<(usize, Point)> {
        const TOL: f64 = 1e-12;
        for (c, map) in self.cell_maps.iter().enumerate() {
            let xi = map.inverse_apply(x);
            let inside = match self.cells[c].kind {
                CellKind::Quad => {
                    xi[0] >= -TOL && xi[0] <= 1.0 + TOL && xi[1] >= -TOL && xi[1] <= 1.0 + TOL
                }
                CellKind::Tri => xi[0] >= -TOL && xi[1] >= -TOL && xi[0] + xi[1] <= 1.0 + TOL,
            };
            if inside {
                return Some((c, xi));
            }
        }
        None
    }
}

fn cell_map(vertices: &[Point], cell: &Cell) -> Result<AffineMap, String> {
    let p = |i: usize| vertices[cell.vertices[i]];
    let (p0, p1) = (p(0), p(1));
    let e1 = [p1[0] - p0[0], p1[1] - p0[1]];
    let e2 = match cell.kind {
        CellKind::Quad => {
            let (p2, p3) = (p(2), p(3));
            let e2 = [p3[0] - p0[0], p3[1] - p0[1]];
            let scale = e1[0].abs() + e1[1].abs() + e2[0].abs() + e2[1].abs();
            let gap = [p0[0] + e1[0] + e2[0] - p2[0], p0[1] + e1[1] + e2[1] - p2[1]];
            if gap[0].abs() + gap[1].abs() > 1e-12 * scale {
                return Err("quadrilateral is not a parallelogram".into());
            }
            e2
        }
        CellKind::Tri => {
            let p2 = p(2);
            [p2[0] - p0[0], p2[1] - p0[1]]
        }
    };
    let map = AffineMap {
        jacobian: [[e1[0], e2[0]], [e1[1], e2[1]]],
        offset: p0,
    };
    if map.det() == 0.0 {
        return Err("zero-area cell".into());
    }
    Ok(map)
}
