//! Inf-sup constants of edge patches as the thin cells shrink, with the
//! fitted decay exponent of each family.
//!
//! cargo run --release --example edge_decay -- [family ...]

use infsup::assemble::assemble_mesh;
use infsup::patchgen::{build_patch, Family, PatchSpec};
use infsup::spectra::{compute_infsup, fit_decay};

const HS: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut families: Vec<Family> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    if families.is_empty() {
        families = vec![Family::EdgeA, Family::EdgeD, Family::EdgeF];
    }
    for family in families {
        let mut betas = Vec::new();
        print!("{:<14}", family.name());
        for h in HS {
            let mesh = build_patch(&PatchSpec::new(family, h))?;
            let (_, saddle) = assemble_mesh(&mesh)?;
            let result = compute_infsup(&saddle, 3)?;
            print!(" {:.3e}", result.beta);
            betas.push(result.beta);
        }
        println!("   exponent {:.2}", fit_decay(&HS, &betas)?);
    }
    Ok(())
}
