use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(task: &str, config: &str, extra: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, config).unwrap();
    run_at(task, &path, extra)
}

fn run_at(task: &str, path: &Path, extra: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcmc-certify"))
        .arg(task)
        .arg("--config")
        .arg(path)
        .args(extra)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_out(o: &Output) -> Value {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(o));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn hier_t_bound() {
    let o = run("bound", r#"{"model": {"hier_t": {"t": 50, "a": 4.3}}, "n": [1000]}"#, &[]);
    let v = json_out(&o);
    let s = v["sigma_as"].as_f64().unwrap();
    assert!((s - 2.38).abs() < 0.005, "{s}");
    assert_eq!(v["policy"], "known_pi_v");
    let b = v["rmse_bounds"][0]["rmse_bound"].as_f64().unwrap();
    assert!(b > s / 1000f64.sqrt());
}

#[test]
fn drift_only_policy_is_looser() {
    let cfg = r#"{"model": {"hier_t": {"t": 50, "a": 3.9146}}, "policy": {"drift_only": "drift_bound"}}"#;
    let s = json_out(&run("bound", cfg, &[]))["sigma_as"].as_f64().unwrap();
    assert!((s - 2.68).abs() < 0.005, "{s}");
}

#[test]
fn geometric_constants_only() {
    let cfg = r#"{"model": {"geometric": {"lambda": 0.46, "K": 3.3, "beta": 0.14}},
                  "policy": {"drift_only": "drift_bound"}, "moments": {"start_V": 1.0, "f_norm": 1.0}}"#;
    let v = json_out(&run("bound", cfg, &[]));
    assert!(v["sigma_as"].as_f64().unwrap().is_finite());
}

#[test]
fn malformed_json_exits_2_without_output() {
    let o = run("bound", "{\"model\": ", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!stderr(&o).is_empty());
}

#[test]
fn unknown_field_names_its_path() {
    let o = run("bound", r#"{"model": {"hier_t": {"t": 50, "a": 4.3, "b": 1}}}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("model.hier_t.b"), "{}", stderr(&o));
}

#[test]
fn missing_config_file_exits_2() {
    let o = run_at("bound", Path::new("/nonexistent/run.json"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn inadmissible_parameters_exit_2() {
    let o = run("bound", r#"{"model": {"hier_t": {"t": 50, "a": 0.5}}}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run("bound", r#"{"model": {"contracting_normals": {"c": 0.5, "d": 1.0}}}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn task_mismatch_exits_2() {
    let o = run("bound", r#"{"task": "table", "table": 1}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runtime_failure_exits_3() {
    // too few tours to estimate anything
    let cfg = r#"{"model": {"hier_t": {"t": 50, "a": 4.3}}, "tours": 10, "chains": 1}"#;
    let o = run("constants", cfg, &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn zero_threads_exit_2() {
    let o = run("table", r#"{"table": 1}"#, &["--threads", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic() {
    let cfg = r#"{"model": {"contracting_normals": {"c": 0.5, "d": 1.5}}, "n": [500], "x0": 2.0}"#;
    let a = run("simulate", cfg, &["--seed", "7"]);
    let b = run("simulate", cfg, &["--seed", "7", "--threads", "3"]);
    let c = run("simulate", cfg, &["--seed", "8"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("index,state,bell,block_id\n"));
    assert!(text.lines().count() > 501);
}

#[test]
fn constants_are_deterministic_across_threads() {
    let cfg = r#"{"model": {"hier_t": {"t": 50, "a": 4.3}}, "tours": 4000, "chains": 4,
                  "replicates": 200, "n_for_c2": 200, "n": [100]}"#;
    let a = run("constants", cfg, &["--threads", "1"]);
    let b = run("constants", cfg, &["--threads", "4"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn pump_constants_use_plug_in_mean() {
    let cfg = r#"{"model": {"pump": {}}, "tours": 2000, "chains": 2, "replicates": 100, "n_for_c2": 100}"#;
    let v = json_out(&run("constants", cfg, &[]));
    assert_eq!(v["constants"]["theta_is_plug_in"], true);
}

#[test]
fn pump_data_override_is_checked() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("pumps.csv");
    std::fs::write(&data, "pump,y,t\n1,5,94.3\n").unwrap();
    let cfgp = dir.path().join("run.json");
    std::fs::write(&cfgp, r#"{"model": {"pump": {}}, "n": [10]}"#).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_mcmc-certify"))
        .args(["simulate", "--config"])
        .arg(&cfgp)
        .env("MCMC_CERTIFY_DATA", &data)
        .output()
        .unwrap();
    assert_ne!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
}

#[test]
fn confidence_plans_for_gaussian_chain() {
    let cfg = r#"{"model": {"contracting_normals": {"c": 0.5, "d": 1.7875}},
                  "confidence": {"epsilon": 0.1, "alpha": 0.1}, "x0": 0.0}"#;
    let v = json_out(&run("confidence", cfg, &[]));
    assert_eq!(v["n_min_exact"], 809);
    assert!(v["n_min_bound"].as_u64().unwrap() > 809);
    let stationary = cfg.replace(r#", "x0": 0.0"#, "");
    assert_eq!(json_out(&run("confidence", &stationary, &[]))["n_min_exact"], 811);
}

#[test]
fn confidence_needs_its_block() {
    let o = run("confidence", r#"{"model": {"hier_t": {"t": 50, "a": 4.3}}}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
}

fn sweep_rows(out: &str) -> Vec<(f64, f64)> {
    out.lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect()
}

#[test]
fn sweep_finds_known_pi_v_optimum() {
    let cfg = r#"{"model": {"hier_t": {"t": 50, "a": 4.3}},
                  "sweep": {"param": "a", "lo": 3.0, "hi": 8.0, "points": 101,
                            "objective": "sigma_bound_known_pi_v"}}"#;
    let o = run("sweep", cfg, &["--format", "json"]);
    let v = json_out(&o);
    let at = v["minimum"]["at"].as_f64().unwrap();
    let val = v["minimum"]["value"].as_f64().unwrap();
    assert!((at - 4.30).abs() < 0.01, "{at}");
    assert!((val - 2.38).abs() < 0.005, "{val}");
    assert_eq!(v["rows"].as_array().unwrap().len(), 101);
}

#[test]
fn sweep_finds_drift_only_optimum() {
    let cfg = r#"{"model": {"hier_t": {"t": 50, "a": 4.3}},
                  "sweep": {"param": "a", "lo": 3.0, "hi": 8.0, "points": 101,
                            "objective": "sigma_bound_drift_only"}}"#;
    let o = run("sweep", cfg, &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("minimum: a=3.91"), "{}", stderr(&o));
    let rows = sweep_rows(&stdout(&o));
    assert_eq!(rows.len(), 101);
    let best = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    assert!((best - 2.68).abs() < 0.01, "{best}");
}

#[test]
fn sweep_marks_inadmissible_points() {
    let cfg = r#"{"model": {"hier_t": {"t": 50, "a": 4.3}},
                  "sweep": {"param": "a", "lo": 0.5, "hi": 5.0, "points": 10,
                            "objective": "sigma_bound_known_pi_v"}}"#;
    let o = run("sweep", cfg, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = sweep_rows(&stdout(&o));
    assert!(rows[0].1.is_infinite());
    assert!(rows[9].1.is_finite());
}

#[test]
fn sweep_empty_range_exits_2() {
    let cfg = r#"{"model": {"hier_t": {"t": 50, "a": 4.3}},
                  "sweep": {"param": "a", "lo": 5.0, "hi": 4.0, "objective": "sigma_bound_known_pi_v"}}"#;
    let o = run("sweep", cfg, &[]);
    assert_eq!(o.status.code(), Some(2));
    let cfg = r#"{"model": {"hier_t": {"t": 50, "a": 4.3}},
                  "sweep": {"param": "a", "lo": 4.0, "hi": 5.0, "points": 0, "objective": "sigma_bound_known_pi_v"}}"#;
    assert_eq!(run("sweep", cfg, &[]).status.code(), Some(2));
}

#[test]
fn sweep_single_point_gives_one_row() {
    let cfg = r#"{"model": {"hier_t": {"t": 50, "a": 4.3}},
                  "sweep": {"param": "a", "lo": 4.3, "hi": 4.3, "objective": "sigma_bound_known_pi_v"}}"#;
    let o = run("sweep", cfg, &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(sweep_rows(&stdout(&o)).len(), 1);
}

#[test]
fn sweep_unknown_param_exits_2() {
    let cfg = r#"{"model": {"hier_t": {"t": 50, "a": 4.3}},
                  "sweep": {"param": "t", "lo": 5.0, "hi": 50.0, "objective": "sigma_bound_known_pi_v"}}"#;
    assert_eq!(run("sweep", cfg, &[]).status.code(), Some(2));
}

#[test]
fn table1_text() {
    let o = run("table", r#"{"table": 1}"#, &[]);
    assert_eq!(o.status.code(), Some(0));
    let t = stdout(&o);
    let rows: Vec<Vec<&str>> = t.lines().skip(1).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows[0], ["5", "1.581", "6.403", "11.89"]);
    assert_eq!(rows[1], ["50", "1.031", "2.379", "2.681"]);
    assert_eq!(rows[2][0], "500");
}

#[test]
fn table4_has_separators() {
    let o = run("table", r#"{"table": 4}"#, &[]);
    assert!(stdout(&o).contains("811"));
    let v = json_out(&run("table", r#"{"table": 4}"#, &["--format", "json"]));
    assert_eq!(v["reality"], 811);
    let t = stdout(&o);
    assert!(t.lines().nth(1).unwrap().contains(','));
}

#[test]
fn table_number_out_of_range_exits_2() {
    assert_eq!(run("table", r#"{"table": 9}"#, &[]).status.code(), Some(2));
    assert_eq!(run("table", "{}", &[]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = run("table", r#"{"table": 1}"#, &["--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("t,sigma_as,"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn drift_models_cannot_be_simulated() {
    let cfg = r#"{"model": {"geometric": {"lambda": 0.5, "K": 2.0, "beta": 0.2}}, "n": [10]}"#;
    assert_eq!(run("simulate", cfg, &[]).status.code(), Some(2));
}
