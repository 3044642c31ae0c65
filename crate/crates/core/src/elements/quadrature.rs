use super::ElementError;
use crate::patchgen::{CellKind, Point};

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    /// Highest total degree integrated exactly (per-variable degree on squares).
    pub degree: u32,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Gauss-Legendre points and weights on `[0, 1]`.
fn gauss_legendre_01(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w): (Vec<f64>, Vec<f64>) = match n {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let a = 1.0 / 3.0_f64.sqrt();
            (vec![-a, a], vec![1.0, 1.0])
        }
        3 => {
            let a = (3.0_f64 / 5.0).sqrt();
            (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let r = 2.0 / 7.0 * (6.0_f64 / 5.0).sqrt();
            let a = (3.0 / 7.0 - r).sqrt();
            let b = (3.0 / 7.0 + r).sqrt();
            let s = 30.0_f64.sqrt();
            let wa = (18.0 + s) / 36.0;
            let wb = (18.0 - s) / 36.0;
            (vec![-b, -a, a, b], vec![wb, wa, wa, wb])
        }
        _ => unreachable!("at most four points per direction are needed"),
    };
    (
        x.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        w.iter().map(|v| 0.5 * v).collect(),
    )
}

/// Gauss rule with `n` points on `[0, 1]`; exact up to degree `2n - 1`.
pub fn gauss_line(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_legendre_01(n)
}

/// Quadrature exact for polynomials of the given degree: tensor Gauss on the
/// square (degree counted per variable), symmetric rules on the triangle.
pub fn gauss_rule(cell: CellKind, degree: u32) -> Result<QuadratureRule, ElementError> {
    if degree > 6 {
        return Err(ElementError::UnsupportedDegree(degree));
    }
    match cell {
        CellKind::Quad => {
            let n = (degree as usize + 2) / 2;
            let (x, w) = gauss_legendre_01(n.max(1));
            let mut points = Vec::with_capacity(n * n);
            let mut weights = Vec::with_capacity(n * n);
            for j in 0..x.len() {
                for i in 0..x.len() {
                    points.push([x[i], x[j]]);
                    weights.push(w[i] * w[j]);
                }
            }
            Ok(QuadratureRule {
                points,
                weights,
                degree: 2 * x.len() as u32 - 1,
            })
        }
        CellKind::Tri => Ok(match degree {
            0 | 1 => QuadratureRule {
                points: vec![[1.0 / 3.0, 1.0 / 3.0]],
                weights: vec![0.5],
                degree: 1,
            },
            2 => {
                let (a, b) = (1.0 / 6.0, 2.0 / 3.0);
                QuadratureRule {
                    points: vec![[a, a], [b, a], [a, b]],
                    weights: vec![1.0 / 6.0; 3],
                    degree: 2,
                }
            }
            3..=5 => radon_seven_point(),
            _ => dunavant_twelve_point(),
        }),
    }
}

/// Seven-point rule of degree 5 with closed-form nodes.
fn radon_seven_point() -> QuadratureRule {
    let s15 = 15.0_f64.sqrt();
    let a1 = (6.0 - s15) / 21.0;
    let a2 = (6.0 + s15) / 21.0;
    let w1 = (155.0 - s15) / 1200.0;
    let w2 = (155.0 + s15) / 1200.0;
    let mut points = vec![[1.0 / 3.0, 1.0 / 3.0]];
    let mut weights = vec![9.0 / 40.0];
    for (a, w) in [(a1, w1), (a2, w2)] {
        let b = 1.0 - 2.0 * a;
        points.extend([[a, a], [b, a], [a, b]]);
        weights.extend([w; 3]);
    }
    QuadratureRule {
        points,
        weights: weights.into_iter().map(|w| 0.5 * w).collect(),
        degree: 5,
    }
}

/// Twelve-point symmetric rule of degree 6.
fn dunavant_twelve_point() -> QuadratureRule {
    let orbits3 = [
        (0.063089014491502228340, 0.050844906370206816921),
        (0.249286745170910421292, 0.116786275726379366030),
    ];
    let orbit6 = (
        0.053145049844816947353,
        0.310352451033784405416,
        0.082851075618373575194,
    );
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (a, w) in orbits3 {
        let b = 1.0 - 2.0 * a;
        points.extend([[a, a], [b, a], [a, b]]);
        weights.extend([w; 3]);
    }
    let (a, b, w) = orbit6;
    let c = 1.0 - a - b;
    points.extend([[a, b], [b, a], [a, c], [c, a], [b, c], [c, b]]);
    weights.extend([w; 6]);
    QuadratureRule {
        points,
        weights: weights.into_iter().map(|w| 0.5 * w).collect(),
        degree: 6,
    }
}

/// Edge-midpoint rule on the reference triangle, weights `|K|/3`. Exact for
/// quadratics only.
pub fn midpoint_rule_triangle() -> QuadratureRule {
    QuadratureRule {
        points: vec![[0.5, 0.0], [0.5, 0.5], [0.0, 0.5]],
        weights: vec![1.0 / 6.0; 3],
        degree: 2,
    }
}
