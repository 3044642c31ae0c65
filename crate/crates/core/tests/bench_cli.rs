use std::process::Command;

use infsup::bench::{run_experiment, ExperimentConfig, TableId};
use infsup::patchgen::{read_mesh, validate_conformity};

fn infsup(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_infsup")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn csv_is_reproducible() {
    let cfg = ExperimentConfig::for_table(TableId::Table2);
    let first = run_experiment(&cfg).unwrap().to_csv().unwrap();
    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run_experiment(&cfg).unwrap().to_csv().unwrap());
    assert_eq!(first, serial);

    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(first.as_bytes());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), ["family", "h", "r", "pair", "beta", "residual", "note"]);
    assert_eq!(reader.records().count(), 15);
    assert_eq!(first.lines().filter(|l| l.starts_with('#')).count(), 3);
}

#[test]
fn run_writes_the_table_and_compares() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("lshape.csv");
    let (code, _, stderr) = infsup(&["run", "--table", "lshape", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stderr}");
    let written = std::fs::read_to_string(&out).unwrap();
    let expected = run_experiment(&ExperimentConfig::for_table(TableId::LShape)).unwrap().to_csv().unwrap();
    assert_eq!(written, expected);
    assert_eq!(stderr.lines().filter(|l| l.ends_with("PASS")).count(), 5);
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "family = EdgeD, EdgeF\nh = 1e-2\nformat = markdown\n").unwrap();
    let (code, stdout, _) = infsup(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.contains("| h | EdgeD | EdgeF |"), "{stdout}");
    let (code, stdout, _) = infsup(&["run", "--config", cfg.to_str().unwrap(), "--format", "csv", "--h", "1e-2,1e-3"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().filter(|l| !l.starts_with('#')).count(), 5);
}

#[test]
fn exit_codes() {
    let (code, _, stderr) = infsup(&["run", "--family", "EdgeD", "--h", "0.9"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("FAIL EdgeD"));

    let dir = tempfile::tempdir().unwrap();
    let tampered = dir.path().join("tampered.csv");
    std::fs::write(&tampered, "source,family,h,r,pair,beta,class\nx,EdgeD,1e-2,0,q2q1,0.35,exact-geometry\n").unwrap();
    let (code, _, stderr) = infsup(&["run", "--family", "EdgeD", "--h", "1e-2", "--reference", tampered.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("FAIL"));

    let (code, _, stderr) = infsup(&["run", "--table", "table9"]);
    assert_eq!(code, 2);
    assert!(stderr.starts_with("error:"));
}

#[test]
fn lemmas_pass() {
    let (code, stdout, stderr) = infsup(&["lemmas", "--h", "1e-3"]);
    assert_eq!(code, 0, "{stderr}");
    assert!(!stdout.lines().any(|l| l.ends_with("FAIL")));
    assert!(stderr.contains("0 failed"));
}

#[test]
fn mesh_dump_is_readable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corner.mesh");
    let (code, stdout, _) =
        infsup(&["mesh", "--family", "CornerC", "--h", "1e-3", "--triangulated", "--dump-mesh", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("CornerC"));
    let mesh = read_mesh(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(mesh.all_tris());
    assert!(validate_conformity(&mesh).is_empty());
}

#[test]
fn matrix_dump() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) =
        infsup(&["mesh", "--family", "EdgeD", "--h", "1e-2", "--dump-matrices", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    for name in ["A.txt", "B.txt", "Mp.txt"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.lines().count() > 1, "{name}");
    }
}
