//! Lagrange reference elements on the unit square `[0,1]^2` and the unit
//! triangle `{x, y >= 0, x + y <= 1}`, with quadrature rules.
//!
//! Node orderings:
//!
//! ```text
//!  Q1/Q2                     P1/P2
//!  3----6----2               2
//!  |         |               | \
//!  7    8    5               5   4
//!  |         |               |     \
//!  0----4----1               0---3---1
//! ```
//!
//! Q2 is the full nine-node biquadratic element.

mod quadrature;

pub use quadrature::{gauss_line, gauss_rule, midpoint_rule_triangle, QuadratureRule};

use crate::patchgen::{CellKind, Point};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ElementError {
    #[error("point ({0}, {1}) lies outside the reference cell")]
    OutOfCell(f64, f64),
    #[error("no quadrature rule of degree {0} on this cell")]
    UnsupportedDegree(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Q1,
    Q2,
    P1,
    P2,
}

const SQUARE_NODES: [Point; 9] = [
    [0.0, 0.0],
    [1.0, 0.0],
    [1.0, 1.0],
    [0.0, 1.0],
    [0.5, 0.0],
    [1.0, 0.5],
    [0.5, 1.0],
    [0.0, 0.5],
    [0.5, 0.5],
];

const TRIANGLE_NODES: [Point; 6] = [
    [0.0, 0.0],
    [1.0, 0.0],
    [0.0, 1.0],
    [0.5, 0.0],
    [0.5, 0.5],
    [0.0, 0.5],
];

// 1D quadratic Lagrange index of each Q2 node along x and y (0 -> t=0, 1 -> t=1, 2 -> t=1/2)
const Q2_INDEX: [(usize, usize); 9] = [
    (0, 0),
    (1, 0),
    (1, 1),
    (0, 1),
    (2, 0),
    (1, 2),
    (2, 1),
    (0, 2),
    (2, 2),
];

fn lagrange2(t: f64) -> [f64; 3] {
    [(2.0 * t - 1.0) * (t - 1.0), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)]
}

fn lagrange2_deriv(t: f64) -> [f64; 3] {
    [4.0 * t - 3.0, 4.0 * t - 1.0, 4.0 - 8.0 * t]
}

/// A nodal Lagrange element on its reference cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ReferenceElement {
    pub kind: ElementKind,
}

impl ReferenceElement {
    pub const fn new(kind: ElementKind) -> ReferenceElement {
        ReferenceElement { kind }
    }

    /// The velocity element matching a cell shape.
    pub fn quadratic(cell: CellKind) -> ReferenceElement {
        match cell {
            CellKind::Quad => ReferenceElement::new(ElementKind::Q2),
            CellKind::Tri => ReferenceElement::new(ElementKind::P2),
        }
    }

    /// The pressure element matching a cell shape.
    pub fn linear(cell: CellKind) -> ReferenceElement {
        match cell {
            CellKind::Quad => ReferenceElement::new(ElementKind::Q1),
            CellKind::Tri => ReferenceElement::new(ElementKind::P1),
        }
    }

    pub fn cell(&self) -> CellKind {
        match self.kind {
            ElementKind::Q1 | ElementKind::Q2 => CellKind::Quad,
            ElementKind::P1 | ElementKind::P2 => CellKind::Tri,
        }
    }

    pub fn node_count(&self) -> usize {
        match self.kind {
            ElementKind::Q1 => 4,
            ElementKind::Q2 => 9,
            ElementKind::P1 => 3,
            ElementKind::P2 => 6,
        }
    }

    pub fn degree(&self) -> u32 {
        match self.kind {
            ElementKind::Q1 | ElementKind::P1 => 1,
            ElementKind::Q2 | ElementKind::P2 => 2,
        }
    }

    pub fn nodes(&self) -> &'static [Point] {
        match self.kind {
            ElementKind::Q1 => &SQUARE_NODES[..4],
            ElementKind::Q2 => &SQUARE_NODES,
            ElementKind::P1 => &TRIANGLE_NODES[..3],
            ElementKind::P2 => &TRIANGLE_NODES,
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        const TOL: f64 = 1e-14;
        match self.cell() {
            CellKind::Quad => {
                p[0] >= -TOL && p[0] <= 1.0 + TOL && p[1] >= -TOL && p[1] <= 1.0 + TOL
            }
            CellKind::Tri => p[0] >= -TOL && p[1] >= -TOL && p[0] + p[1] <= 1.0 + TOL,
        }
    }

    /// Like [`shape_values`](Self::shape_values) but rejects points outside the cell.
    pub fn shape_values_strict(&self, p: Point) -> Result<Vec<f64>, ElementError> {
        if !self.contains(p) {
            return Err(ElementError::OutOfCell(p[0], p[1]));
        }
        Ok(self.shape_values(p))
    }

    pub fn shape_gradients_strict(&self, p: Point) -> Result<Vec<Point>, ElementError> {
        if !self.contains(p) {
            return Err(ElementError::OutOfCell(p[0], p[1]));
        }
        Ok(self.shape_gradients(p))
    }

    pub fn shape_values(&self, p: Point) -> Vec<f64> {
        let [x, y] = p;
        match self.kind {
            ElementKind::Q1 => vec![(1.0 - x) * (1.0 - y), x * (1.0 - y), x * y, (1.0 - x) * y],
            ElementKind::Q2 => {
                let (lx, ly) = (lagrange2(x), lagrange2(y));
                Q2_INDEX.iter().map(|&(i, j)| lx[i] * ly[j]).collect()
            }
            ElementKind::P1 => vec![1.0 - x - y, x, y],
            ElementKind::P2 => {
                let l = [1.0 - x - y, x, y];
                vec![
                    l[0] * (2.0 * l[0] - 1.0),
                    l[1] * (2.0 * l[1] - 1.0),
                    l[2] * (2.0 * l[2] - 1.0),
                    4.0 * l[0] * l[1],
                    4.0 * l[1] * l[2],
                    4.0 * l[2] * l[0],
                ]
            }
        }
    }

    /// Gradients with respect to the reference coordinates, one row per node.
    pub fn shape_gradients(&self, p: Point) -> Vec<Point> {
        let [x, y] = p;
        match self.kind {
            ElementKind::Q1 => vec![
                [-(1.0 - y), -(1.0 - x)],
                [1.0 - y, -x],
                [y, x],
                [-y, 1.0 - x],
            ],
            ElementKind::Q2 => {
                let (lx, ly) = (lagrange2(x), lagrange2(y));
                let (dx, dy) = (lagrange2_deriv(x), lagrange2_deriv(y));
                Q2_INDEX
                    .iter()
                    .map(|&(i, j)| [dx[i] * ly[j], lx[i] * dy[j]])
                    .collect()
            }
            ElementKind::P1 => vec![[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]],
            ElementKind::P2 => {
                let l = [1.0 - x - y, x, y];
                let g: [Point; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];
                let vertex = |i: usize| {
                    let s = 4.0 * l[i] - 1.0;
                    [s * g[i][0], s * g[i][1]]
                };
                let edge = |i: usize, j: usize| {
                    [
                        4.0 * (g[i][0] * l[j] + l[i] * g[j][0]),
                        4.0 * (g[i][1] * l[j] + l[i] * g[j][1]),
                    ]
                };
                vec![
                    vertex(0),
                    vertex(1),
                    vertex(2),
                    edge(0, 1),
                    edge(1, 2),
                    edge(2, 0),
                ]
            }
        }
    }

    /// Local node indices lying on local edge `k` (endpoints first, then the
    /// midpoint for quadratic elements).
    pub fn edge_nodes(&self, k: usize) -> Vec<usize> {
        match self.kind {
            ElementKind::Q1 => vec![k, (k + 1) % 4],
            ElementKind::Q2 => vec![k, (k + 1) % 4, 4 + k],
            ElementKind::P1 => vec![k, (k + 1) % 3],
            ElementKind::P2 => vec![k, (k + 1) % 3, 3 + k],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const ALL: [ElementKind; 4] = [ElementKind::Q1, ElementKind::Q2, ElementKind::P1, ElementKind::P2];

    fn random_points(elem: &ReferenceElement, n: usize) -> Vec<Point> {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut out = Vec::new();
        while out.len() < n {
            let p = [rng.gen::<f64>(), rng.gen::<f64>()];
            if elem.contains(p) {
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn kronecker_property() {
        for kind in ALL {
            let e = ReferenceElement::new(kind);
            for (j, &node) in e.nodes().iter().enumerate() {
                let vals = e.shape_values(node);
                for (i, v) in vals.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((v - want).abs() < 1e-14, "{kind:?} N{i}(node {j}) = {v}");
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_and_zero_gradient_sum() {
        for kind in ALL {
            let e = ReferenceElement::new(kind);
            for p in random_points(&e, 20) {
                let s: f64 = e.shape_values(p).iter().sum();
                assert!((s - 1.0).abs() < 1e-13);
                let g = e.shape_gradients(p);
                let gx: f64 = g.iter().map(|r| r[0]).sum();
                let gy: f64 = g.iter().map(|r| r[1]).sum();
                assert!(gx.abs() < 1e-13 && gy.abs() < 1e-13, "{kind:?}: {gx} {gy}");
            }
        }
    }

    #[test]
    fn q2_node_five_is_unit_vector() {
        let e = ReferenceElement::new(ElementKind::Q2);
        let v = e.shape_values(e.nodes()[5]);
        for (i, x) in v.iter().enumerate() {
            assert_eq!(*x, if i == 5 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn symmetric_points() {
        let p1 = ReferenceElement::new(ElementKind::P1);
        for v in p1.shape_values([1.0 / 3.0, 1.0 / 3.0]) {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        let q1 = ReferenceElement::new(ElementKind::Q1);
        assert_eq!(q1.shape_values([0.5, 0.5]), vec![0.25; 4]);
    }

    #[test]
    fn p1_gradients_are_constant() {
        let e = ReferenceElement::new(ElementKind::P1);
        for p in random_points(&e, 5) {
            assert_eq!(e.shape_gradients(p), vec![[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]]);
        }
    }

    #[test]
    fn gradients_match_central_differences() {
        let step = 1e-6;
        for kind in ALL {
            let e = ReferenceElement::new(kind);
            for p in random_points(&e, 10) {
                let g = e.shape_gradients(p);
                for d in 0..2 {
                    let mut a = p;
                    let mut b = p;
                    a[d] += step;
                    b[d] -= step;
                    let (va, vb) = (e.shape_values(a), e.shape_values(b));
                    for i in 0..e.node_count() {
                        let fd = (va[i] - vb[i]) / (2.0 * step);
                        assert!((fd - g[i][d]).abs() < 1e-8, "{kind:?} node {i} dir {d}");
                    }
                }
            }
        }
    }

    #[test]
    fn strict_mode_rejects_outside_points() {
        let e = ReferenceElement::new(ElementKind::P2);
        assert_eq!(
            e.shape_values_strict([0.8, 0.8]),
            Err(ElementError::OutOfCell(0.8, 0.8))
        );
        assert!(e.shape_gradients_strict([0.2, 0.2]).is_ok());
    }
}
