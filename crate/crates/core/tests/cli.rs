use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrc")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_triangle_fixture() {
    let out = mrc(&["solve", &fixture("triangle.mrc")]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema"], "mrc-report/1");
    assert_eq!(r["status"], "ok");
    assert!((r["lp"]["objective"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(r["cut"]["cost"].as_f64(), Some(1.0));
    assert!((r["ratio"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(r["oracle"]["status"], "optimal");
    assert_eq!(r["oracle"]["cost"].as_f64(), Some(1.0));
    assert_eq!(r["verification"]["feasible"], true);
    assert!(r["timings"]["total_ms"].is_number());
}

#[test]
fn no_timings_output_is_byte_identical() {
    let a = mrc(&["solve", &fixture("triangle.mrc"), "--no-timings"]);
    let b = mrc(&["solve", &fixture("triangle.mrc"), "--no-timings"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a).get("timings").is_none());
}

#[test]
fn corrupt_input_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "bad.mrc", "p mrc 3 1 1\nvariant edge edge\ne 0 x 1\nq 0 1 1\n");
    let out = mrc(&["solve", &path]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert_eq!(mrc(&["solve", "/nonexistent/file.mrc"]).status.code(), Some(3));
}

#[test]
fn config_errors_exit_three() {
    let f = fixture("triangle.mrc");
    assert_eq!(mrc(&["solve", &f, "--mode", "bicriteria"]).status.code(), Some(3));
    assert_eq!(mrc(&["solve", &f, "--mode", "bicriteria", "--beta", "0.5"]).status.code(), Some(3));
    assert_eq!(mrc(&["solve", &f, "--beta", "2"]).status.code(), Some(3));
    assert_eq!(mrc(&["solve", &f, "--tol-sep", "2"]).status.code(), Some(3));
    assert_eq!(mrc(&["solve", &f, "--no-such-flag"]).status.code(), Some(3));
    assert_eq!(mrc(&["--help"]).status.code(), Some(0));
}

#[test]
fn bicriteria_on_threshold_four() {
    let dir = tempfile::tempdir().unwrap();
    // K5 with doubled edges: every pair has edge connectivity 8
    let mut text = String::from("p mrc 5 20 1\nvariant edge edge\n");
    for a in 0..5 {
        for b in a + 1..5 {
            text += &format!("e {a} {b} {}\ne {a} {b} 1\n", 1 + (a + b) % 3);
        }
    }
    text += "q 0 1 4\n";
    let path = write(dir.path(), "k5.mrc", &text);
    let exact = json(&mrc(&["solve", &path, "--oracle-cap", "0"]));
    let relaxed_out = mrc(&["solve", &path, "--mode", "bicriteria", "--beta", "2", "--oracle-cap", "0"]);
    assert_eq!(relaxed_out.status.code(), Some(0));
    let relaxed = json(&relaxed_out);
    assert_eq!(relaxed["cut"]["thresholds"][0], 8);
    assert_eq!(relaxed["verification"]["pairs"][0]["threshold"], 8);
    assert!(relaxed["cut"]["cost"].as_f64().unwrap() <= exact["cut"]["cost"].as_f64().unwrap());
}

#[test]
fn infeasible_vertex_instance_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "adj.mrc",
        "p mrc 3 2 1\nvariant vertex vertex\ne 0 1\ne 1 2\nv 0 1\nv 1 1\nv 2 1\nq 0 1 1\n",
    );
    let out = mrc(&["solve", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "infeasible");
    assert_eq!(mrc(&["oracle", &path]).status.code(), Some(2));
}

#[test]
fn row_cap_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let text =
        "p mrc 4 6 2\nvariant edge edge\ne 0 1 1\ne 0 2 1\ne 0 3 1\ne 1 2 1\ne 1 3 1\ne 2 3 1\nq 0 1 1\nq 2 3 1\n";
    let path = write(dir.path(), "k4.mrc", text);
    let out = mrc(&["solve", &path, "--row-cap", "2"]);
    assert_eq!(out.status.code(), Some(4));
    let r = json(&out);
    assert_eq!(r["status"], "lp_non_converged");
    assert_eq!(r["lp"]["status"], "non_converged");
    // the cut is still produced and verified
    assert_eq!(r["verification"]["feasible"], true);
}

#[test]
fn verify_and_oracle_commands() {
    let f = fixture("triangle.mrc");
    let good = mrc(&["verify", &f, "--cut", "1"]);
    assert_eq!(good.status.code(), Some(0));
    assert_eq!(json(&good)["feasible"], true);
    let bad = mrc(&["verify", &f]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(json(&bad)["pairs"][0]["achieved"], 2);
    assert_eq!(mrc(&["verify", &f, "--cut", "9"]).status.code(), Some(3));
    let relaxed = mrc(&["verify", &f, "--mode", "bicriteria", "--beta", "1.5"]);
    assert_eq!(relaxed.status.code(), Some(0));

    let oracle = mrc(&["oracle", &f]);
    assert_eq!(oracle.status.code(), Some(0));
    let o = json(&oracle);
    assert_eq!(o["cost"].as_f64(), Some(1.0));
    assert_eq!(o["optimal_count"], 2);
    assert_eq!(mrc(&["oracle", &f, "--oracle-cap", "2"]).status.code(), Some(3));
}

#[test]
fn gen_is_seed_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mrc");
    let b = dir.path().join("b.mrc");
    for path in [&a, &b] {
        let out = mrc(&[
            "gen",
            "--model",
            "grid",
            "--rows",
            "3",
            "--cols",
            "3",
            "--k-min",
            "2",
            "--seed",
            "42",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let solved = mrc(&["solve", a.to_str().unwrap()]);
    assert_eq!(solved.status.code(), Some(0));

    let none = mrc(&["gen", "--model", "gnp", "--n", "6", "--p", "0"]);
    assert_eq!(none.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&none.stderr).contains("no unused vertex pair"));
}

#[test]
fn gen_vertex_variant_round_trips_through_solve() {
    let out = mrc(&[
        "gen",
        "--model",
        "gnp",
        "--n",
        "7",
        "--p",
        "0.6",
        "--removal",
        "vertex",
        "--semantics",
        "vertex",
        "--k-min",
        "2",
        "--k-max",
        "2",
        "--seed",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "v.mrc", &String::from_utf8(out.stdout).unwrap());
    let r = mrc(&["solve", &path]);
    let code = r.status.code();
    assert!(code == Some(0) || code == Some(2));
    let report = json(&r);
    if code == Some(0) {
        assert_eq!(report["verification"]["feasible"], true);
        assert!(report["oracle"]["cost"].as_f64().unwrap() <= report["cut"]["cost"].as_f64().unwrap());
    }
}

#[test]
fn bench_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("bench.md");
    let out = mrc(&["bench", "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let table = std::fs::read_to_string(&out_path).unwrap();
    for suite in ["sandwich", "two-route", "tradeoff", "multicut", "vertex"] {
        assert!(table.contains(&format!("| {suite} |")), "{suite} row missing");
    }
    let as_json = mrc(&["bench", "--format", "json"]);
    assert_eq!(json(&as_json)["rows"].as_array().unwrap().len(), 7);
}
