//! Builds one mesh of every patch family, checks conformity and writes one
//! of them in the plain-text mesh format.
//!
//! cargo run --example patch_meshes -- [h] [out.mesh]

use infsup::patchgen::{build_patch, read_mesh, validate_conformity, write_mesh, Family, PatchSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let h: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1e-2);
    let out = args.next();

    println!("{:<22} {:>8} {:>6} {:>10} {:>10}", "family", "vertices", "cells", "area", "conforming");
    for family in Family::ALL {
        let mesh = build_patch(&PatchSpec::new(family, h))?;
        let ok = validate_conformity(&mesh).is_empty();
        println!(
            "{:<22} {:>8} {:>6} {:>10.6} {:>10}",
            family.name(),
            mesh.num_vertices(),
            mesh.num_cells(),
            mesh.area(),
            ok
        );
    }

    let mesh = build_patch(&PatchSpec::new(Family::CornerB, h))?;
    let text = write_mesh(&mesh);
    let back = read_mesh(&text)?;
    assert_eq!(back.num_cells(), mesh.num_cells());
    if let Some(path) = out {
        std::fs::write(&path, text)?;
        println!("wrote CornerB to {path}");
    }
    Ok(())
}
