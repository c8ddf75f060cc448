use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn paramine(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paramine"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, value: &Value) -> String {
    let path = dir.join(name);
    fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn ramp_two_param(extra: Value) -> Value {
    let mut base = json!({
        "schema_version": 1,
        "system": { "name": "ramp" },
        "formula": "[] y <= a /\\ [] 2*y <= b",
        "parameters": [
            { "name": "a", "min": 0, "max": 20 },
            { "name": "b", "min": 0, "max": 40 }
        ],
        "optimizer": { "budget": 300 }
    });
    for (k, v) in extra.as_object().unwrap() {
        base[k] = v.clone();
    }
    base
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect()];
    rows.extend(
        r.records()
            .map(|rec| rec.unwrap().iter().map(String::from).collect::<Vec<_>>()),
    );
    rows
}

fn robustness_on_trace(dir: &Path, formula: &str) -> Output {
    let cfg = write_config(
        dir,
        "rob.json",
        &json!({ "schema_version": 1, "formula": formula }),
    );
    let trace = configs().join("ramp_trace.csv");
    let out = dir.join("out");
    paramine(&[
        "robustness",
        "--config",
        &cfg,
        "--trace",
        trace.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn robustness_of_bounded_ramp_is_negative() {
    let tmp = TempDir::new().unwrap();
    let o = robustness_on_trace(tmp.path(), "[] y <= 5");
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "robustness -5");
    let result: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/result.json")).unwrap())
            .unwrap();
    assert_eq!(result["robustness"], json!(-5.0));
    assert_eq!(result["schema_version"], json!(1));
}

#[test]
fn true_prints_inf_and_exits_zero() {
    let tmp = TempDir::new().unwrap();
    let o = robustness_on_trace(tmp.path(), "true");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "robustness inf");
    let result: Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("out/result.json")).unwrap())
            .unwrap();
    assert_eq!(result["robustness"], json!("inf"));
}

#[test]
fn missing_channel_is_an_error_naming_it() {
    let tmp = TempDir::new().unwrap();
    let o = robustness_on_trace(tmp.path(), "[] omega <= 3000");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("omega"), "{}", stderr(&o));
}

#[test]
fn series_prints_every_sample() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs().join("robustness_trace.json");
    let out = tmp.path().join("o");
    let o = paramine(&[
        "robustness",
        "--config",
        cfg.to_str().unwrap(),
        "--series",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    assert_eq!(lines[1], "0 -5");
    assert_eq!(lines[11], "10 -5");
}

#[test]
fn parametric_robustness_needs_theta() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        &json!({
            "schema_version": 1,
            "system": { "name": "ramp" },
            "formula": "[] y <= a",
            "parameters": [{ "name": "a", "min": 0, "max": 20 }]
        }),
    );
    let out = tmp.path().join("o");
    let o = paramine(&[
        "robustness",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("theta"));
}

#[test]
fn mine_is_deterministic_for_a_fixed_seed() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs().join("ramp_mine.json");
    let run = |name: &str, jobs: &str| {
        let out = tmp.path().join(name);
        let o = paramine(&[
            "mine",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "7",
            "--jobs",
            jobs,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        out
    };
    let (a, b) = (run("a", "1"), run("b", "3"));
    assert_eq!(
        fs::read(a.join("anchors.csv")).unwrap(),
        fs::read(b.join("anchors.csv")).unwrap()
    );
    assert_eq!(
        fs::read(a.join("runlog.csv")).unwrap(),
        fs::read(b.join("runlog.csv")).unwrap()
    );
}

#[test]
fn runlog_has_one_row_per_simulation() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs().join("ramp_mine.json");
    let out = tmp.path().join("o");
    let o = paramine(&[
        "mine",
        "--config",
        cfg.to_str().unwrap(),
        "--budget",
        "123",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_csv(&out.join("runlog.csv"));
    assert_eq!(rows[0], ["iteration", "a", "robustness", "cost"]);
    assert_eq!(rows.len() - 1, 123);
}

#[test]
fn rgda_with_no_iterations_writes_header_only() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        &ramp_two_param(json!({ "rgda": { "iterations": 0 } })),
    );
    let out = tmp.path().join("o");
    let o = paramine(&["rgda", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(out.join("anchors.csv")).unwrap();
    assert_eq!(text, "a,b,a_norm,b_norm,robustness,seed,iteration\n");
}

#[test]
fn sda_anchors_include_the_pareto_corner() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs().join("ramp_sda.json");
    let out = tmp.path().join("o");
    let o = paramine(&[
        "sda",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_csv(&out.join("anchors.csv"));
    let near = rows[1..].iter().any(|r| {
        let a: f64 = r[0].parse().unwrap();
        let b: f64 = r[1].parse().unwrap();
        ((a - 10.0).powi(2) + (b - 20.0).powi(2)).sqrt() <= 0.2
    });
    assert!(near, "{rows:?}");
}

#[test]
fn sweep_brackets_the_ramp_boundary() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs().join("ramp_sweep.json");
    let out = tmp.path().join("o");
    let o = paramine(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_csv(&out.join("sweep.csv"));
    assert_eq!(rows[0], ["a", "robustness"]);
    assert_eq!(rows.len(), 22);
    let pts: Vec<(f64, f64)> = rows[1..]
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap()))
        .collect();
    let change = pts
        .windows(2)
        .find(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0))
        .expect("sign change");
    assert!(change[0].0 >= 9.0 && change[1].0 <= 11.0, "{change:?}");
}

#[test]
fn one_point_sweep_has_one_row() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        &json!({
            "schema_version": 1,
            "system": { "name": "ramp" },
            "formula": "[] y <= a",
            "parameters": [{ "name": "a", "min": 0, "max": 20 }],
            "sweep": { "theta_counts": [1] }
        }),
    );
    let out = tmp.path().join("o");
    let o = paramine(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(read_csv(&out.join("sweep.csv")).len(), 2);
}

#[test]
fn unknown_monotonicity_needs_an_assumption() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        &ramp_two_param(json!({
            "formula": "[] y <= a /\\ <> y >= b",
            "optimizer": { "budget": 50 }
        })),
    );
    let out = tmp.path().join("o");
    let o = paramine(&["mine", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--assume-monotone"), "{}", stderr(&o));

    let o = paramine(&[
        "mine",
        "--config",
        &cfg,
        "--assume-monotone",
        "-1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let result: Value =
        serde_json::from_str(&fs::read_to_string(out.join("result.json")).unwrap()).unwrap();
    assert_eq!(result["monotonicity"]["overall"], json!("decreasing"));
    assert_eq!(result["monotonicity"]["assumed"], json!(true));
}

#[test]
fn run_dispatches_on_algorithm() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs().join("ramp_sweep.json");
    let out = tmp.path().join("o");
    let o = paramine(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("sweep.csv").exists());

    let cfg = write_config(tmp.path(), "c.json", &ramp_two_param(json!({})));
    let o = paramine(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("algorithm"));
}

#[test]
fn bad_configs_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();
    for (name, cfg) in [
        ("version", ramp_two_param(json!({ "schema_version": 2 }))),
        ("unknown", ramp_two_param(json!({ "sed": 3 }))),
        (
            "system",
            ramp_two_param(json!({ "system": { "name": "boiler" } })),
        ),
        ("channel", ramp_two_param(json!({ "formula": "[] z <= a" }))),
        (
            "budget",
            ramp_two_param(json!({ "optimizer": { "budget": 0 } })),
        ),
    ] {
        let path = write_config(tmp.path(), &format!("{name}.json"), &cfg);
        let o = paramine(&["mine", "--config", &path, "--out", out]);
        assert_eq!(o.status.code(), Some(2), "{name}: {}", stdout(&o));
        assert!(stderr(&o).starts_with("error:"), "{name}");
    }
    let o = paramine(&["mine", "--config", "/nonexistent.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn replay_system_mines_recorded_traces() {
    let tmp = TempDir::new().unwrap();
    let cfg = configs().join("replay_mine.json");
    let out = tmp.path().join("o");
    let o = paramine(&[
        "mine",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = read_csv(&out.join("anchors.csv"));
    assert_eq!(
        rows[0],
        ["a", "a_norm", "robustness", "seed", "iteration", "lambda_1"]
    );
    assert_eq!(rows.len(), 2);
    let a: f64 = rows[1][0].parse().unwrap();
    assert!(a < 15.0);
}
