//! Axis-aligned rectangle layouts, the intermediate form used to build and
//! refine the patch registry.
//!
//! Vertices are merged by exact coordinate equality. Every split point is
//! computed from the same two endpoints on both sides of a shared edge, so
//! neighbouring rectangles produce bitwise-identical coordinates.

use std::collections::HashMap;

use super::mesh::{Axis, Cell, CellKind, Mesh, Point, Region};
use super::MeshError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub region: Region,
    pub thin: Option<Axis>,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64, region: Region) -> Rect {
        Rect {
            x: [x0, x1],
            y: [y0, y1],
            region,
            thin: None,
        }
    }

    pub fn thin(mut self, axis: Axis) -> Rect {
        self.thin = Some(axis);
        self
    }

    pub fn in_region(mut self, region: Region) -> Rect {
        self.region = region;
        self
    }

    /// Splits into two halves across `axis` (the cut is orthogonal to it).
    pub fn bisect(&self, axis: Axis) -> [Rect; 2] {
        let mut a = *self;
        let mut b = *self;
        match axis {
            Axis::X => {
                let m = 0.5 * (self.x[0] + self.x[1]);
                a.x[1] = m;
                b.x[0] = m;
            }
            Axis::Y => {
                let m = 0.5 * (self.y[0] + self.y[1]);
                a.y[1] = m;
                b.y[0] = m;
            }
        }
        [a, b]
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            [self.x[0], self.y[0]],
            [self.x[1], self.y[0]],
            [self.x[1], self.y[1]],
            [self.x[0], self.y[1]],
        ]
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Layout {
    pub rects: Vec<Rect>,
}

impl Layout {
    pub fn new(rects: Vec<Rect>) -> Layout {
        Layout { rects }
    }

    pub fn push(&mut self, r: Rect) {
        self.rects.push(r);
    }

    /// Reflects every rectangle through `x -> -x` and/or `y -> -y`.
    pub fn reflected(&self, flip_x: bool, flip_y: bool) -> Layout {
        let rects = self
            .rects
            .iter()
            .map(|r| {
                let mut q = *r;
                if flip_x {
                    q.x = [-r.x[1], -r.x[0]];
                }
                if flip_y {
                    q.y = [-r.y[1], -r.y[0]];
                }
                q
            })
            .collect();
        Layout { rects }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Layout {
        let rects = self
            .rects
            .iter()
            .map(|r| {
                let mut q = *r;
                q.x = [r.x[0] + dx, r.x[1] + dx];
                q.y = [r.y[0] + dy, r.y[1] + dy];
                q
            })
            .collect();
        Layout { rects }
    }

    pub fn extend(&mut self, other: Layout) {
        self.rects.extend(other.rects);
    }

    pub fn to_mesh(&self) -> Result<Mesh, MeshError> {
        let mut index: HashMap<(u64, u64), usize> = HashMap::new();
        let mut vertices: Vec<Point> = Vec::new();
        let mut cells = Vec::with_capacity(self.rects.len());
        for r in &self.rects {
            if !(r.x[0] < r.x[1] && r.y[0] < r.y[1]) {
                return Err(MeshError::DegenerateGeometry(format!(
                    "empty rectangle [{}, {}] x [{}, {}]",
                    r.x[0], r.x[1], r.y[0], r.y[1]
                )));
            }
            let ids = r
                .corners()
                .iter()
                .map(|p| {
                    // +0.0 folds -0.0 into the same key
                    let key = ((p[0] + 0.0).to_bits(), (p[1] + 0.0).to_bits());
                    *index.entry(key).or_insert_with(|| {
                        vertices.push(*p);
                        vertices.len() - 1
                    })
                })
                .collect();
            cells.push(Cell {
                kind: CellKind::Quad,
                vertices: ids,
                region: r.region,
                thin: r.thin,
            });
        }
        Mesh::new(vertices, cells)
    }

    /// Recovers the rectangles of an all-quad, axis-aligned mesh.
    pub fn from_mesh(mesh: &Mesh) -> Result<Layout, MeshError> {
        let mut rects = Vec::with_capacity(mesh.num_cells());
        for (c, cell) in mesh.cells.iter().enumerate() {
            if cell.kind != CellKind::Quad {
                return Err(MeshError::AlreadyTriangulated);
            }
            let p: Vec<Point> = cell.vertices.iter().map(|&v| mesh.vertices[v]).collect();
            let aligned = p[0][1] == p[1][1]
                && p[1][0] == p[2][0]
                && p[2][1] == p[3][1]
                && p[3][0] == p[0][0]
                && p[0][0] < p[1][0]
                && p[0][1] < p[3][1];
            if !aligned {
                return Err(MeshError::DegenerateGeometry(format!(
                    "cell {c} is not a counterclockwise axis-aligned rectangle"
                )));
            }
            rects.push(Rect {
                x: [p[0][0], p[1][0]],
                y: [p[0][1], p[3][1]],
                region: cell.region,
                thin: cell.thin,
            });
        }
        Ok(Layout { rects })
    }
}
