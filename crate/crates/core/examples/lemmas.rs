//! Runs every closed-form identity check and prints one line per identity.
//!
//! ```text
//! cargo run --release --example lemmas
//! ```

use std::time::Instant;

use infsup::lemmalab::{run_all, Status, DEFAULT_H};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let start = Instant::now();
    let lines = run_all(&DEFAULT_H)?;
    for l in &lines {
        println!("{l}");
    }
    let failed = lines.iter().filter(|l| l.status == Status::Fail).count();
    let info = lines.iter().filter(|l| l.status == Status::Info).count();
    println!(
        "{} checks, {} failed, {} reported only, {:.2} s",
        lines.len(),
        failed,
        info,
        start.elapsed().as_secs_f64()
    );
    Ok(())
}
