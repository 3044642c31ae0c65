//! P2 x P1 on triangulated patches: how the diagonal pattern of the thin
//! cells decides whether the constant survives anisotropy.
//!
//! cargo run --release --example triangulated_patches

use infsup::assemble::assemble_mesh;
use infsup::lemmalab::{check_triangle_pairings, FlatMacro, Split};
use infsup::patchgen::{build_patch, Family, PatchSpec};
use infsup::spectra::compute_infsup;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for family in [Family::TriEdge, Family::TriEdgeBad] {
        print!("{:<12}", family.name());
        for h in [1e-1, 1e-2, 1e-3, 1e-4] {
            let mesh = build_patch(&PatchSpec::new(family, h))?;
            let (_, saddle) = assemble_mesh(&mesh)?;
            print!(" {:.3e}", compute_infsup(&saddle, 3)?.beta);
        }
        println!();
    }

    // the sign-pattern pressures of a mirrored two-cell split
    let pairings = check_triangle_pairings(&FlatMacro::new(0.5, 1e-3, Split::Two))?;
    for line in &pairings.lines {
        println!("{line}");
    }
    Ok(())
}
