use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn yorkl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_yorkl")).args(args).env_remove("YORKL_OUT_DIR").output().expect("binary runs")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("yorkl-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn eval_spectral_point() {
    let out = yorkl(&["eval", "--target", "yor_spectral", "--r", "1", "--t", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let rec = &records(&out)[0];
    let v = rec["value"].as_f64().unwrap();
    assert!((v - 0.739_076_531_303_231_9).abs() < 1e-9);
    assert_eq!(rec["method"], "spectral");
    assert!(String::from_utf8_lossy(&out.stderr).contains("wall_time_s"));
}

#[test]
fn eval_polynomial() {
    let out = yorkl(&["eval", "--target", "poly_eval", "--n", "3", "--x", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(records(&out)[0]["value"].as_f64(), Some(-62.0));
}

#[test]
fn small_time_is_a_usage_error() {
    let out = yorkl(&["eval", "--target", "yor_direct", "--r", "1", "--t", "0.05"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("window"));
}

#[test]
fn malformed_grid_is_a_usage_error() {
    for grid in ["5:0.5:10", "0.5:5:1", "a:b:c"] {
        let out = yorkl(&["table", "--target", "yor", "--r", grid, "--t", "1"]);
        assert_eq!(out.status.code(), Some(2), "grid {grid}");
    }
}

#[test]
fn yor_table_rows() {
    let out = yorkl(&["table", "--target", "yor", "--r", "0.5:5:10", "--t", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = records(&out);
    assert_eq!(rows.len(), 10);
    let r: Vec<f64> = rows.iter().map(|v| v["r"].as_f64().unwrap()).collect();
    assert!(r.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(r[0], 0.5);
    assert_eq!(r[9], 5.0);
}

#[test]
fn coefficient_tables() {
    let out = yorkl(&["--format", "csv", "table", "--target", "coeffs", "--nmax", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().next(), Some("n,k,coefficient"));
    assert!(text.lines().any(|l| l == "3,3,-15"));
    let out = yorkl(&["table", "--target", "coeffs", "--nmax", "12"]);
    let top = records(&out).into_iter().find(|v| v["n"] == 12 && v["k"] == 12).unwrap();
    assert_eq!(top["coefficient"], "316234143225");
}

#[test]
fn polys_suite_passes_and_writes_sidecar() {
    let dir = scratch("suite");
    let path = dir.join("polys.jsonl");
    let out = yorkl(&["--output", path.to_str().unwrap(), "suite", "--name", "polys", "--nmax", "20"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let body = fs::read_to_string(&path).unwrap();
    for line in body.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        for key in ["context", "lhs", "rhs", "rel_diff", "tolerance", "passed"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["passed"], true, "{line}");
    }
    let meta: Value = serde_json::from_str(&fs::read_to_string(dir.join("polys.jsonl.meta.json")).unwrap()).unwrap();
    assert!(meta["wall_time_s"].as_f64().is_some());
    assert_eq!(meta["exit_code"], 0);
    fs::remove_dir_all(dir).ok();
}

#[test]
fn failing_check_exits_one() {
    let out = yorkl(&["--tolerance", "1e-30", "crosscheck", "--r", "0.5", "--t", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_directory_from_environment() {
    let dir = scratch("env");
    let out = Command::new(env!("CARGO_BIN_EXE_yorkl"))
        .args(["--format", "csv", "eval", "--target", "bessel_k_imag", "--tau", "1", "--x", "1"])
        .env("YORKL_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let files: Vec<String> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    assert!(files.iter().any(|f| f.ends_with(".csv")), "{files:?}");
    fs::remove_dir_all(dir).ok();
}

#[test]
fn config_file_fills_missing_keys() {
    let dir = scratch("config");
    let cfg = dir.join("run.conf");
    fs::write(&cfg, "# point\ntarget = poly_eval\nn = 2\nx = 1\n").unwrap();
    let out = yorkl(&["--config", cfg.to_str().unwrap(), "eval", "--x", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    // p_2(2) = 3*4 - 2
    assert_eq!(records(&out)[0]["value"].as_f64(), Some(10.0));
    fs::remove_dir_all(dir).ok();
}

#[test]
fn csv_and_json_payloads_agree() {
    let json = yorkl(&["table", "--target", "yor", "--r", "1,2", "--t", "1"]);
    let csv = yorkl(&["--format", "csv", "table", "--target", "yor", "--r", "1,2", "--t", "1"]);
    let rows = records(&json);
    let text = String::from_utf8_lossy(&csv.stdout);
    for (row, line) in rows.iter().zip(text.lines().skip(1)) {
        let value: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(row["value"].as_f64().unwrap(), value);
    }
}
