//! The two-subspace decomposition on an edge patch: the constant on the
//! bubble pressures, the constant on the complement, their composition and
//! the constant of the whole patch.
//!
//! cargo run --release --example verfuerth_split

use infsup::lemmalab::{measure_verfuerth, verfuerth_compose};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>8} {:>9} {:>9} {:>9} {:>10} {:>9} {:>9}", "h", "beta1", "beta2", "compose", "broken", "full", "defect");
    for h in [1e-1, 1e-2, 1e-3, 1e-4] {
        let v = measure_verfuerth(h)?;
        println!(
            "{:>8.0e} {:>9.4} {:>9.4} {:>9.4} {:>10.4} {:>9.4} {:>9.1e}",
            h,
            v.beta1,
            v.beta2,
            verfuerth_compose(v.beta1, v.beta2)?,
            v.beta_broken,
            v.beta_full,
            v.projection_defect
        );
    }
    Ok(())
}
