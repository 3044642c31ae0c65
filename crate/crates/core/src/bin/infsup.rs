use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use infsup::assemble::assemble_mesh;
use infsup::bench::{compare_to_reference, run_experiment, ExperimentConfig, Reference};
use infsup::lemmalab::{run_all, Status, DEFAULT_H};
use infsup::patchgen::{build_patch, validate_conformity, write_mesh, Family, PatchSpec};

#[derive(Parser)]
#[command(name = "infsup", version, about = "Discrete inf-sup constants of Taylor-Hood pairs on anisotropic patches")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a table of inf-sup constants.
    Run(RunArgs),
    /// Check the closed-form identities, one line per identity.
    Lemmas(LemmaArgs),
    /// Build one patch mesh, validate it and optionally write it out.
    Mesh(MeshArgs),
}

#[derive(Args)]
struct RunArgs {
    /// key=value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// table1, table2, lshape, table4, tri_good, tri_bad or custom.
    #[arg(long)]
    table: Option<String>,
    /// Families to run (comma separated); implies a custom table unless --table is given.
    #[arg(long)]
    family: Option<String>,
    /// Mesh sizes, comma separated.
    #[arg(long)]
    h: Option<String>,
    /// Refinement levels, comma separated.
    #[arg(long)]
    r: Option<String>,
    /// q2q1 or p2p1.
    #[arg(long)]
    pair: Option<String>,
    /// csv or markdown.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of eigenvalues per cell.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Reference CSV to compare against; defaults to the shipped one of the table.
    #[arg(long)]
    reference: Option<PathBuf>,
}

#[derive(Args)]
struct LemmaArgs {
    /// Run every check (the default).
    #[arg(long)]
    all: bool,
    /// Thin-cell sizes, comma separated.
    #[arg(long)]
    h: Option<String>,
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    h: f64,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    triangulated: bool,
    /// Write the mesh in the plain-text format to this path.
    #[arg(long)]
    dump_mesh: Option<PathBuf>,
    /// Assemble and write A, B and Mp in coordinate format into this directory.
    #[arg(long)]
    dump_matrices: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
        Command::Lemmas(args) => lemmas(args),
        Command::Mesh(args) => mesh(args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type Outcome = Result<bool, Box<dyn std::error::Error>>;

fn run(args: RunArgs) -> Outcome {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_kv(&std::fs::read_to_string(path)?)?,
        None => ExperimentConfig::from_kv("")?,
    };
    let mut overrides: Vec<(&str, String)> = Vec::new();
    if let Some(v) = &args.table {
        overrides.push(("table", v.clone()));
    }
    for (key, value) in [
        ("family", &args.family),
        ("h", &args.h),
        ("r", &args.r),
        ("pair", &args.pair),
        ("format", &args.format),
    ] {
        if let Some(v) = value {
            overrides.push((key, v.clone()));
        }
    }
    if let Some(v) = &args.out {
        overrides.push(("out", v.display().to_string()));
    }
    if let Some(v) = args.k {
        overrides.push(("k", v.to_string()));
    }
    if let Some(v) = args.seed {
        overrides.push(("seed", v.to_string()));
    }
    for (key, value) in overrides {
        cfg.set(key, &value)?;
    }

    let table = run_experiment(&cfg)?;
    let text = table.render(cfg.format)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &text)?,
        None => print!("{text}"),
    }

    let mut ok = table.rows.iter().all(|row| row.ok());
    for row in table.rows.iter().filter(|row| !row.ok()) {
        eprintln!("FAIL {} h={:e} r={}: {}", row.family, row.h, row.r, row.note);
    }
    let reference = match &args.reference {
        Some(path) => Some(Reference::load(path)?),
        None => Reference::builtin(cfg.table),
    };
    if let Some(reference) = reference {
        match compare_to_reference(&table, &reference) {
            Ok(report) => {
                for row in &report.rows {
                    eprintln!("{row}");
                }
                ok &= report.passed();
            }
            // a custom grid need not overlap the reference
            Err(e) if args.reference.is_none() => eprintln!("no reference comparison: {e}"),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(ok)
}

fn lemmas(args: LemmaArgs) -> Outcome {
    let _ = args.all;
    let hs: Vec<f64> = match &args.h {
        Some(list) => list.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>()?,
        None => DEFAULT_H.to_vec(),
    };
    let lines = run_all(&hs)?;
    for line in &lines {
        println!("{line}");
    }
    let failed = lines.iter().filter(|l| l.status == Status::Fail).count();
    eprintln!("{} checks, {} failed", lines.len(), failed);
    Ok(failed == 0)
}

fn mesh(args: MeshArgs) -> Outcome {
    let family: Family = args.family.parse()?;
    let mut spec = PatchSpec::new(family, args.h);
    if let Some(r) = args.r {
        spec = spec.with_refinement(r);
    }
    if args.triangulated {
        spec = spec.with_triangulation(true);
    }
    let mesh = build_patch(&spec)?;
    let violations = validate_conformity(&mesh);
    println!(
        "{family} h={:e} r={}: {} vertices, {} cells, area {}",
        spec.h,
        spec.r,
        mesh.num_vertices(),
        mesh.num_cells(),
        mesh.area()
    );
    for v in &violations {
        println!("FAIL {v}");
    }
    if let Some(path) = &args.dump_mesh {
        std::fs::write(path, write_mesh(&mesh))?;
    }
    if let Some(dir) = &args.dump_matrices {
        let (_, saddle) = assemble_mesh(&mesh)?;
        saddle.dump(dir)?;
        println!("{} velocity and {} pressure unknowns", saddle.n_v(), saddle.n_p());
    }
    Ok(violations.is_empty())
}
