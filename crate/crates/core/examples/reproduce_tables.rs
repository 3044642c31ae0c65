//! Runs a table preset, prints it as Markdown and compares it against the
//! shipped reference values.
//!
//! cargo run --release --example reproduce_tables -- [table]

use infsup::bench::{compare_to_reference, run_experiment, ExperimentConfig, Reference, TableId, Verdict};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let table: TableId = std::env::args().nth(1).as_deref().unwrap_or("table1").parse()?;
    let cfg = ExperimentConfig::for_table(table);
    let result = run_experiment(&cfg)?;
    println!("{}", result.to_markdown());

    let Some(reference) = Reference::builtin(table) else {
        return Ok(());
    };
    let report = compare_to_reference(&result, &reference)?;
    for row in &report.rows {
        println!("{row}");
    }
    let count = |v: Verdict| report.rows.iter().filter(|r| r.verdict == v).count();
    println!(
        "{} pass, {} fail, {} reported only",
        count(Verdict::Pass),
        count(Verdict::Fail),
        count(Verdict::Info)
    );
    Ok(())
}
