//! Result files: `result.json`, `anchors.csv`, `runlog.csv`, `sweep.csv`.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use paramine_core::mining::{Anchor, SimRecord, SweepRow};
use serde_json::{json, Map, Value};

/// Prints a line to stdout, ignoring a closed pipe.
#[macro_export]
macro_rules! say {
    ($($arg:tt)*) => {
        $crate::report::say_line(format_args!($($arg)*))
    };
}

pub fn say_line(args: std::fmt::Arguments<'_>) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_fmt(args).and_then(|()| out.write_all(b"\n"));
}

/// A number for JSON output; infinities become `"inf"` / `"-inf"`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Plain-text rendering matching the JSON convention.
pub fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        x.to_string()
    }
}

pub fn anchor_json(a: &Anchor) -> Value {
    json!({
        "theta_raw": nums(&a.theta_raw),
        "theta_norm": nums(&a.theta_norm),
        "robustness": num(a.witness.robustness),
        "witness": {
            "x0": nums(&a.witness.x0),
            "lambda": nums(&a.witness.lambda),
            "seed": a.witness.seed,
            "iteration": a.witness.iteration,
        },
    })
}

/// RFC 3339 UTC time of the run; the only field that differs between
/// otherwise identical runs.
pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn write_json(dir: &Path, name: &str, value: &Map<String, Value>) -> Result<()> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}

/// Column names for an `[x₀, λ]` point.
pub fn input_columns(x0_dim: usize, lambda_dim: usize) -> Vec<String> {
    (1..=x0_dim)
        .map(|i| format!("x0_{i}"))
        .chain((1..=lambda_dim).map(|i| format!("lambda_{i}")))
        .collect()
}

fn csv_writer(dir: &Path, name: &str) -> Result<csv::Writer<fs::File>> {
    let path = dir.join(name);
    csv::Writer::from_path(&path).with_context(|| format!("creating {}", path.display()))
}

fn cells(xs: &[f64]) -> impl Iterator<Item = String> + '_ {
    xs.iter().map(|&x| fmt(x))
}

/// One row per anchor; the header is written even when there are none.
pub fn write_anchors(
    dir: &Path,
    param_names: &[String],
    x0_dim: usize,
    lambda_dim: usize,
    anchors: &[Anchor],
) -> Result<()> {
    let mut w = csv_writer(dir, "anchors.csv")?;
    let mut header: Vec<String> = param_names.to_vec();
    header.extend(param_names.iter().map(|n| format!("{n}_norm")));
    header.extend(["robustness", "seed", "iteration"].map(String::from));
    header.extend(input_columns(x0_dim, lambda_dim));
    w.write_record(&header)?;
    for a in anchors {
        let mut row: Vec<String> = cells(&a.theta_raw).collect();
        row.extend(cells(&a.theta_norm));
        row.push(fmt(a.witness.robustness));
        row.push(a.witness.seed.to_string());
        row.push(a.witness.iteration.to_string());
        row.extend(cells(&a.witness.x0));
        row.extend(cells(&a.witness.lambda));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Every simulation of every search, in order.
pub fn write_runlog<'a>(
    dir: &Path,
    param_names: &[String],
    x0_dim: usize,
    lambda_dim: usize,
    records: impl IntoIterator<Item = &'a SimRecord>,
) -> Result<usize> {
    let mut w = csv_writer(dir, "runlog.csv")?;
    let mut header = vec!["iteration".to_string()];
    header.extend(input_columns(x0_dim, lambda_dim));
    header.extend(param_names.iter().cloned());
    header.extend(["robustness", "cost"].map(String::from));
    w.write_record(&header)?;
    let mut n = 0;
    for r in records {
        let mut row = vec![r.iteration.to_string()];
        row.extend(cells(&r.x0));
        row.extend(cells(&r.lambda));
        row.extend(cells(&r.theta_raw));
        row.push(fmt(r.robustness));
        row.push(fmt(r.cost));
        w.write_record(&row)?;
        n += 1;
    }
    w.flush()?;
    Ok(n)
}

pub fn write_sweep(
    dir: &Path,
    param_names: &[String],
    x0_dim: usize,
    lambda_dim: usize,
    rows: &[SweepRow],
) -> Result<()> {
    let mut w = csv_writer(dir, "sweep.csv")?;
    let mut header: Vec<String> = param_names.to_vec();
    header.extend(input_columns(x0_dim, lambda_dim));
    header.push("robustness".into());
    w.write_record(&header)?;
    for r in rows {
        let mut row: Vec<String> = cells(&r.theta).collect();
        row.extend(cells(&r.x0));
        row.extend(cells(&r.lambda));
        row.push(fmt(r.robustness));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
