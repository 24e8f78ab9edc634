//! End-to-end tests against the compiled binary: exit codes, artifact
//! determinism, weight normalization, and a few value spot checks.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conemeans"))
}

fn write_mat(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn koenigs_prints_the_natural_log_for_the_geometric_mean() {
    let out = run(&["koenigs", "--mean", "power:t=0.5,q=0", "--x", "2"]);
    assert!(out.status.success());
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!((v - std::f64::consts::LN_2).abs() < 1e-6, "got {v}");
}

#[test]
fn mean2_writes_the_geometric_mean_of_scalars() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_mat(dir.path(), "a.mat", "1\n4\n");
    let b = write_mat(dir.path(), "b.mat", "1\n9\n");
    let out = run(&[
        "mean2",
        "--mean",
        "power:t=0.5,q=0",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value: f64 = text.lines().nth(1).unwrap().trim().parse().unwrap();
    assert!((value - 6.0).abs() < 1e-12, "got {value}");
}

#[test]
fn malformed_descriptor_exits_2() {
    let out = run(&["koenigs", "--mean", "power:t=2,q=0", "--x", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_positive_definite_input_exits_2_and_names_the_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_mat(dir.path(), "a.mat", "2\n1 5\n5 1\n");
    let b = write_mat(dir.path(), "b.mat", "2\n1 0\n0 1\n");
    let out = run(&[
        "mean2",
        "--mean",
        "power:t=0.5,q=0",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("eigenvalue"), "stderr: {err}");
}

#[test]
fn unnormalized_weights_warn_and_normalize() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_mat(dir.path(), "a.mat", "1\n2\n");
    let b = write_mat(dir.path(), "b.mat", "1\n8\n");
    // The schedule's total cost scales like 1/tol_lambda; 1e-5 keeps this a
    // sub-second run on the wide-spread pair while still pinning the value.
    let out = run(&[
        "karcher",
        "--weights",
        "1,1",
        "--tol-lambda",
        "1e-5",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains("normalizing"), "stderr: {err}");
    // Equal weights: the Karcher mean of scalars is the geometric mean 4.
    let report = stdout(&out);
    let first = report.lines().nth(1).unwrap().trim();
    let value: f64 = first.parse().unwrap();
    assert!((value - 4.0).abs() < 1e-3, "got {value}");
}

#[test]
fn identical_command_gives_byte_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_mat(dir.path(), "a.mat", "2\n1.05 0.01\n0.01 0.98\n");
    let b = write_mat(dir.path(), "b.mat", "2\n0.97 0.02,0.01\n0.02,-0.01 1.03\n");
    let run_once = |tag: &str| {
        let out_path = dir.path().join(format!("x{tag}.mat"));
        let csv_path = dir.path().join(format!("x{tag}.csv"));
        let out = run(&[
            "induced",
            "--mean",
            "mixture:(0.2,0.5);(0.8,0.5)",
            a.to_str().unwrap(),
            b.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
            "--csv",
            csv_path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        (
            stdout(&out),
            std::fs::read(out_path).unwrap(),
            std::fs::read(csv_path).unwrap(),
        )
    };
    let (r1, m1, c1) = run_once("1");
    let (r2, m2, c2) = run_once("2");
    assert_eq!(r1, r2);
    assert_eq!(m1, m2);
    assert_eq!(c1, c2);
    assert!(r1.contains("iterations="));
    assert!(r1.contains("residual="));
    assert!(c1.starts_with(b"step,distance\n"));
}

#[test]
fn exhausted_schedule_exits_3_with_artifacts_written() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_mat(dir.path(), "a.mat", "1\n2\n");
    let b = write_mat(dir.path(), "b.mat", "1\n8\n");
    let out_path = dir.path().join("x.mat");
    let out = run(&[
        "karcher",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--tol-lambda",
        "1e-9",
        "--max-iter",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let report = stdout(&out);
    assert!(report.contains("iterations="), "report: {report}");
    assert!(report.contains("t_l="), "report: {report}");
    assert!(out_path.exists(), "last iterate not written");
}

#[test]
fn residual_is_small_at_the_karcher_mean_and_large_away_from_it() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_mat(dir.path(), "a.mat", "1\n2\n");
    let b = write_mat(dir.path(), "b.mat", "1\n8\n");
    let x = write_mat(dir.path(), "x.mat", "1\n4\n");
    let out = run(&[
        "residual",
        "--logpair",
        "logpair:power:q=0",
        x.to_str().unwrap(),
        a.to_str().unwrap(),
        b.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let at_mean: f64 = stdout(&out).trim().parse().unwrap();
    assert!(at_mean < 1e-12, "got {at_mean}");

    let y = write_mat(dir.path(), "y.mat", "1\n2\n");
    let out = run(&[
        "residual",
        "--logpair",
        "logpair:power:q=0",
        y.to_str().unwrap(),
        a.to_str().unwrap(),
        b.to_str().unwrap(),
    ]);
    let away: f64 = stdout(&out).trim().parse().unwrap();
    assert!(away > 0.1, "got {away}");
}

#[test]
fn props_needs_exactly_one_subject() {
    let out = run(&["props"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn props_table_lists_all_rows_for_a_mean() {
    let out = run(&["props", "--mean", "power:t=0.5,q=0.5", "--instances", "3"]);
    assert!(out.status.success());
    let table = stdout(&out);
    for row in [
        "idempotency",
        "permutation-invariance",
        "monotonicity",
        "congruence-invariance",
        "nonexpansiveness",
        "agh-bounds",
    ] {
        assert!(table.contains(row), "missing row {row} in:\n{table}");
    }
    assert!(table.contains("all properties passed"), "table: {table}");
}

#[test]
fn contraction_prints_the_closed_form() {
    let out = run(&["contraction", "--r", "1"]);
    assert!(out.status.success());
    let line = stdout(&out);
    let v: f64 = line.trim().strip_prefix("rho=").unwrap().parse().unwrap();
    assert!((v - 0.867_662_832_027_759_6).abs() < 1e-12, "got {v}");
}
