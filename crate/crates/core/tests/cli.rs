use std::path::Path;

use shrinkage_cs::cli::run;
use shrinkage_cs::io::{read_vector_csv, write_vector_csv};
use shrinkage_cs::p_shrink;

fn shrinkcs(args: &[&str]) -> i32 {
    run(std::iter::once("shrinkcs").chain(args.iter().copied()))
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn shrink_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let x = [4.0, -1.5, 0.3, 0.0, 12.0];
    write_vector_csv(&dir.path().join("x.csv"), &x).unwrap();
    let code = shrinkcs(&[
        "shrink",
        "--family",
        "pshrink",
        "--lambda",
        "1",
        "--p",
        "0.5",
        "--in",
        &path(dir.path(), "x.csv"),
        "--out",
        &path(dir.path(), "y.csv"),
    ]);
    assert_eq!(code, 0);
    let y = read_vector_csv(&dir.path().join("y.csv")).unwrap();
    assert_eq!(y, p_shrink(&x, 1.0, 0.5).unwrap());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(shrinkcs(&[]), 1);
    assert_eq!(shrinkcs(&["bogus"]), 1);
    assert_eq!(shrinkcs(&["shrink", "--lambda", "1"]), 1);
    assert_eq!(shrinkcs(&["--help"]), 0);
}

#[test]
fn certify_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("prob.csv"), "# 1,3\n0.6,0.8,1\n").unwrap();
    std::fs::write(
        dir.path().join("firm.json"),
        r#"{"family":"firm","lambda":0.5,"mu":1.5}"#,
    )
    .unwrap();
    let code = shrinkcs(&[
        "certify",
        "--problem",
        &path(dir.path(), "prob.csv"),
        "--penalty",
        &path(dir.path(), "firm.json"),
        "--k",
        "1",
        "--out",
        &path(dir.path(), "cert.json"),
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("cert.json")).unwrap())
            .unwrap();
    assert_eq!(v["certificate"]["alpha"], 1.25);
    assert_eq!(v["certificate"]["passes"], false);
    assert_eq!(v["provenance"]["c"], 1.0);
}

#[test]
fn numeric_failures_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("prob.csv"), "0.6,0.8,1\n").unwrap();
    std::fs::write(dir.path().join("x.csv"), "0\n1.25\n").unwrap();
    // epsilon beyond the admissible noise radius
    let code = shrinkcs(&[
        "certify",
        "--problem",
        &path(dir.path(), "prob.csv"),
        "--family",
        "soft",
        "--lambda",
        "1",
        "--x",
        &path(dir.path(), "x.csv"),
        "--k",
        "1",
        "--epsilon",
        "1.5",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn solve_admm_recovers_sparse_solution() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("prob.csv"), "0.6,0.8,1\n").unwrap();
    let out = path(dir.path(), "r.json");
    assert_eq!(
        shrinkcs(&[
            "solve-admm",
            "--problem",
            &path(dir.path(), "prob.csv"),
            "--family",
            "soft",
            "--lambda",
            "1",
            "--out",
            &out
        ]),
        0
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let x: Vec<f64> = serde_json::from_value(v["result"]["x_final"].clone()).unwrap();
    assert!(x[0].abs() < 1e-9 && (x[1] - 1.25).abs() < 1e-9);
}

#[test]
fn phase_diagram_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"kind":"phase_diagram","grid":{"n":12,"m":[6],"k":[0,1,6],
        "penalties":[{"label":"l1","spec":{"family":"soft","lambda":0.5}}]},
        "trials":4,"seed":5,"solver":{"max_iters":20000,"step_tol":1e-10}}"#;
    std::fs::write(dir.path().join("cfg.json"), cfg).unwrap();
    let c = path(dir.path(), "cfg.json");
    assert_eq!(
        shrinkcs(&[
            "phase-diagram",
            "--config",
            &c,
            "--out",
            &path(dir.path(), "a.csv")
        ]),
        0
    );
    assert_eq!(
        shrinkcs(&[
            "phase-diagram",
            "--config",
            &c,
            "--out",
            &path(dir.path(), "b.csv")
        ]),
        0
    );
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.csv")).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(",1.0"));
    assert!(dir.path().join("a.csv.json").exists());
}

#[test]
fn single_phantom_reconstruction() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "ph");
    assert_eq!(
        shrinkcs(&[
            "phantom",
            "--size",
            "32",
            "--lines",
            "32",
            "--family",
            "soft",
            "--lambda",
            "0.1",
            "--max-iters",
            "20",
            "--out",
            &out
        ]),
        0
    );
    for f in [
        "phantom.pgm",
        "reconstruction.pgm",
        "reconstruction.csv",
        "mask.csv",
        "summary.json",
    ] {
        assert!(dir.path().join("ph").join(f).exists(), "{f}");
    }
}
