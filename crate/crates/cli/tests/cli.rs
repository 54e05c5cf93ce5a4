use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn screenkit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_screenkit"))
        .args(args)
        .current_dir(dir)
        .env_remove("SCREENKIT_SEED")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str], dir: &Path) -> Value {
    let out = screenkit(args, dir);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'), "{} has CR line endings", path.display());
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn write_y(path: &Path, y: &[f64]) {
    let mut s = String::from("y\n");
    for v in y {
        s.push_str(&format!("{v}\n"));
    }
    fs::write(path, s).unwrap();
}

#[test]
fn regular_fraction_with_alias_sidecar() {
    let tmp = tempfile::tempdir().unwrap();
    let v = ok_json(&["design", "factorial", "--kind", "regular", "--d", "4", "--words", "1234", "-o", "t1.csv"], tmp.path());
    assert_eq!(v["resolution"], 4);
    let (header, rows) = read_csv(&tmp.path().join("t1.csv"));
    assert_eq!(header, ["x1", "x2", "x3", "x4"]);
    assert_eq!(rows.len(), 8);
    for r in &rows {
        assert_eq!(r.iter().product::<f64>(), 1.0);
    }
    let aliases: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("t1.alias.json")).unwrap()).unwrap();
    assert_eq!(aliases["defining_relation"][0], "+x1x2x3x4");
}

#[test]
fn morris_plan_round_trips_through_ee_analysis() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok_json(&["design", "morris", "--d", "3", "--r", "4", "--seed", "3", "-o", "plan.csv"], dir);
    let (_, rows) = read_csv(&dir.join("plan.csv"));
    assert_eq!(rows.len(), 16);
    // linear output: every elementary effect equals the slope
    let slopes = [2.0, -1.0, 0.0];
    let y: Vec<f64> = rows.iter().map(|r| r.iter().zip(&slopes).map(|(x, b)| x * b).sum()).collect();
    write_y(&dir.join("y.csv"), &y);
    let v = ok_json(
        &["analyze", "ee", "--plan", "plan.csv", "--meta", "plan.json", "--y", "y.csv", "--scatter", "ee.csv"],
        dir,
    );
    for (i, b) in slopes.iter().enumerate() {
        assert!((v["mu"][i].as_f64().unwrap() - b).abs() < 1e-9);
        assert!(v["sigma"][i].as_f64().unwrap().abs() < 1e-9);
    }
    let (header, scatter) = read_csv_mixed(&dir.join("ee.csv"));
    assert_eq!(header, ["variable", "mu_star", "sigma"]);
    assert_eq!(scatter.len(), 3);
}

fn read_csv_mixed(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    (header, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

#[test]
fn cotter_indices_of_additive_output() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok_json(&["design", "factorial", "--kind", "sfrd", "--d", "4", "-o", "s.csv"], dir);
    let (_, rows) = read_csv(&dir.join("s.csv"));
    let b = [4.0, 0.0, -3.0, 0.02];
    let y: Vec<f64> = rows.iter().map(|r| r.iter().zip(&b).map(|(x, c)| x * c).sum()).collect();
    write_y(&dir.join("y.csv"), &y);
    let v = ok_json(&["analyze", "cotter", "--y", "y.csv", "--d", "4", "--threshold", "0.01"], dir);
    // C_o(i) = b_i and C_e(i) = 0, so S(i) = |b_i| / Σ|b|
    let total: f64 = b.iter().map(|c| c.abs()).sum();
    for (i, c) in b.iter().enumerate() {
        assert!((v["indices"]["s"][i].as_f64().unwrap() - c.abs() / total).abs() < 1e-12);
    }
    let selected: Vec<u64> = v["outcome"]["selected"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(selected, [0, 2]);
}

#[test]
fn dantzig_recovers_sparse_linear_model() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok_json(&["design", "factorial", "--kind", "pb", "--n", "12", "-o", "pb.csv"], dir);
    let (_, rows) = read_csv(&dir.join("pb.csv"));
    let wiggle = [0.03, -0.01, 0.02, -0.04, 0.0, 0.01, -0.02, 0.04, -0.03, 0.01, 0.02, -0.03];
    let y: Vec<f64> = rows.iter().zip(wiggle).map(|(r, e)| 1.0 + 3.0 * r[0] - 2.0 * r[4] + e).collect();
    write_y(&dir.join("y.csv"), &y);
    let v = ok_json(&["analyze", "dantzig", "--design", "pb.csv", "--y", "y.csv", "--t", "0.5", "--path", "path.csv"], dir);
    let selected: Vec<u64> = v["outcome"]["selected"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(selected, [0, 4]);
    let (header, path) = read_csv(&dir.join("path.csv"));
    assert_eq!(header[0], "s");
    assert_eq!(header.len(), 12);
    assert!(!path.is_empty());
}

#[test]
fn seed_from_environment_matches_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok_json(&["design", "lhs", "--n", "6", "--d", "2", "--seed", "5", "-o", "flag.csv"], dir);
    let out = Command::new(env!("CARGO_BIN_EXE_screenkit"))
        .args(["design", "lhs", "--n", "6", "--d", "2", "-o", "env.csv"])
        .current_dir(dir)
        .env("SCREENKIT_SEED", "5")
        .output()
        .unwrap();
    assert!(out.status.success());
    ok_json(&["design", "lhs", "--n", "6", "--d", "2", "-o", "default.csv"], dir);
    let flag = fs::read_to_string(dir.join("flag.csv")).unwrap();
    assert_eq!(flag, fs::read_to_string(dir.join("env.csv")).unwrap());
    assert_ne!(flag, fs::read_to_string(dir.join("default.csv")).unwrap());
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let bad_n = screenkit(&["bench", "--method", "sfrd", "--example", "1", "--n", "41", "--out", "o"], dir);
    assert_eq!(bad_n.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_n.stderr).contains("valid grid"));
    let unknown = screenkit(&["bench", "--method", "lasso", "--example", "1", "--n", "42", "--out", "o"], dir);
    assert_eq!(unknown.status.code(), Some(2));
    let missing = screenkit(&["design", "factorial", "--kind", "regular", "--d", "4", "-o", "x.csv"], dir);
    assert_eq!(missing.status.code(), Some(2));
    let no_file = screenkit(&["analyze", "cotter", "--y", "absent.csv", "--d", "3"], dir);
    assert_eq!(no_file.status.code(), Some(2));
}

#[test]
fn bench_writes_report_and_plot_data() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let v = ok_json(&["bench", "--method", "sfrd", "--example", "1", "--n", "42", "--out", "run"], dir);
    assert_eq!(v["benchmark"]["oracle_calls"], 42);
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.join("run/report.json")).unwrap()).unwrap();
    assert_eq!(report["report"]["metrics"]["sensitivity"], 1.0);
    assert_eq!(report["report"]["metrics"]["type_one"], 0.0);
    for f in ["design.csv", "response.csv", "metrics.csv", "sfrd_indices.csv", "sfrd_indices.svg"] {
        let text = fs::read_to_string(dir.join("run").join(f)).unwrap();
        assert!(!text.contains('\r'), "{f}");
    }
}

#[test]
fn sequential_bifurcation_on_builtin_oracle() {
    let tmp = tempfile::tempdir().unwrap();
    let v = ok_json(&["screen", "sb", "--oracle", "builtin:welch", "--delta", "0.5", "--foldover"], tmp.path());
    assert_eq!(v["runs"], v["oracle_calls"]);
    assert!(v["trace"].as_array().is_some_and(|t| !t.is_empty()));
}
