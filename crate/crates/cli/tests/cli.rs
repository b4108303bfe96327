//! Exit codes, report files and reproducibility of the `glpq` binary.

use std::process::{Command, Output};

use glpq::report::ExperimentReport;

fn glpq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glpq")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn hausdorff_su3_prints_flag() {
    let o = glpq(&["hausdorff", "--builtin", "su3", "--generators", "1,2,3,4,5,6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "dims=(6,8) kappa=2 Q=10\n");
}

#[test]
fn jacobi_violating_algebra_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    // [X1,X2] = X3, [X1,X3] = X1, [X2,X3] = 0 breaks the Jacobi identity.
    std::fs::write(
        &path,
        r#"{"dim":3,"basis":["X1","X2","X3"],"brackets":[
            {"i":1,"j":2,"k":3,"c":"1"},{"i":2,"j":1,"k":3,"c":"-1"},
            {"i":1,"j":3,"k":1,"c":"1"},{"i":3,"j":1,"k":1,"c":"-1"}]}"#,
    )
    .unwrap();
    let o = glpq(&["hausdorff", "--algebra", path.to_str().unwrap(), "--generators", "1,2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Jacobi"));
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("schema.json");
    std::fs::write(&path, r#"{"dim":2,"basis":["A","B"],"brackets":[],"extra":1}"#).unwrap();
    for args in [
        vec!["hausdorff", "--algebra", path.to_str().unwrap()],
        vec!["hausdorff", "--builtin", "su2", "--generators", "1"],
        vec!["frobnicate"],
        vec!["heat-decay", "--op", "sublaplacian:1,9", "--tmin", "1e-3", "--tmax", "1e-2"],
        vec!["bessel-sharpness", "--p", "4", "--q", "2", "--a", "1", "--op", "laplacian"],
    ] {
        assert_eq!(glpq(&args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(glpq(&["--help"]).status.code(), Some(0));
}

#[test]
fn truncation_and_io_failures_exit_two() {
    let fixed = glpq(&[
        "heat-decay", "--op", "sublaplacian:1,2", "--tmin", "1e-3", "--tmax", "1e-2", "--lmax", "60", "--fixed-lmax",
    ]);
    assert_eq!(fixed.status.code(), Some(2));
    let io = glpq(&[
        "heat-decay", "--op", "laplacian", "--tmin", "1e-2", "--tmax", "1e-1", "--out", "/nonexistent/dir/r.csv",
    ]);
    assert_eq!(io.status.code(), Some(2));
}

#[test]
fn written_report_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("heat.csv");
    let o = glpq(&[
        "heat-decay", "--op", "laplacian", "--tmin", "1e-2", "--tmax", "1e-1", "--points", "5", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().nth(1) == Some("t,value"));
    let r = ExperimentReport::parse(&text).unwrap();
    assert_eq!(r.experiment, "heat-decay");
    assert_eq!(r.rows.len(), 5);
    assert_eq!(r.verdict.as_deref(), Some("consistent"));
    assert_eq!(r.to_text(), text);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["fourier-selftest", "--lmax", "3", "--functions", "10", "--seed", "11"];
    let run = |threads: &str| Command::new(env!("CARGO_BIN_EXE_glpq")).args(args).env("GLPQ_THREADS", threads).output().unwrap();
    let (one, four) = (run("1"), run("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
}
