//! Assembles the saddle-point matrices of one patch and writes them in
//! coordinate format.
//!
//! cargo run --example assemble_patch -- [family] [h] [dir]

use infsup::assemble::assemble_mesh;
use infsup::patchgen::{build_patch, Family, PatchSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let family: Family = args.next().as_deref().unwrap_or("EdgeD").parse()?;
    let h: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1e-2);
    let dir = args.next();

    let mesh = build_patch(&PatchSpec::new(family, h))?;
    let (dofs, saddle) = assemble_mesh(&mesh)?;
    println!("{family} h={h:e} pair {:?}", dofs.pair);
    println!("  velocity unknowns {}, pressure unknowns {}", saddle.n_v(), saddle.n_p());

    // B annihilates the constant pressure and Mp integrates it to the area
    let bt1 = saddle.b.tr_mul_vec(&saddle.one_p);
    let defect = bt1.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mass = saddle.mp.inner(&saddle.one_p, &saddle.one_p);
    println!("  |B^T 1|_max = {defect:.2e}");
    println!("  1^T Mp 1 = {mass:.12}, area = {:.12}", mesh.area());

    if let Some(dir) = dir {
        saddle.dump(std::path::Path::new(&dir))?;
        println!("  wrote A.txt, B.txt, Mp.txt to {dir}");
    }
    Ok(())
}
