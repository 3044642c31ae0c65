//! Shape functions of the reference elements: partition of unity, nodal
//! interpolation and the exactness of the Gauss rules.

use infsup::elements::{gauss_rule, ReferenceElement};
use infsup::patchgen::CellKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for cell in [CellKind::Quad, CellKind::Tri] {
        for element in [ReferenceElement::quadratic(cell), ReferenceElement::linear(cell)] {
            let n = element.node_count();
            let mut kronecker = 0.0f64;
            for (i, &p) in element.nodes().iter().enumerate() {
                let values = element.shape_values(p);
                for (j, v) in values.iter().enumerate() {
                    let e = if i == j { 1.0 } else { 0.0 };
                    kronecker = kronecker.max((v - e).abs());
                }
            }
            let probe = match cell {
                CellKind::Quad => [0.3, 0.7],
                CellKind::Tri => [0.2, 0.5],
            };
            let sum: f64 = element.shape_values(probe).iter().sum();
            let grad = element
                .shape_gradients(probe)
                .iter()
                .fold([0.0, 0.0], |a, g| [a[0] + g[0], a[1] + g[1]]);
            println!(
                "{cell:?} degree {} with {n} nodes: nodal error {kronecker:.1e}, sum {sum:.15}, gradient sum ({:.1e}, {:.1e})",
                element.degree(),
                grad[0],
                grad[1]
            );
        }
    }

    for cell in [CellKind::Quad, CellKind::Tri] {
        for order in 1..=4 {
            let rule = gauss_rule(cell, order)?;
            let weight: f64 = rule.weights.iter().sum();
            println!("{cell:?} rule of degree {order}: {} points, weight sum {weight:.15}", rule.weights.len());
        }
    }
    Ok(())
}
