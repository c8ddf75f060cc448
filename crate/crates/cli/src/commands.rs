//! One function per command. Each writes its files under the output
//! directory and returns the process exit code.

use std::fs;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use log::{info, warn};
use paramine_core::mining::{
    mine, rgda, sda, sweep, FalsificationDomain, MineResult, Problem, SdaConfig, SweepSpec,
    Termination,
};
use paramine_core::mtl::{robustness_series_with, robustness_with, Formula, TimedStateSequence};
use paramine_core::pmtl::{instantiate, monotonicity, Direction, Monotonicity, ParamSpace};
use paramine_core::sysmodel::{SearchSpace, SystemModel};
use serde_json::{json, Map, Value};

use crate::config::{Command, Loaded, SCHEMA_VERSION};
use crate::report::{self, anchor_json, fmt, num, nums};
use crate::say;

pub fn execute(command: Command, loaded: &Loaded) -> Result<u8> {
    let out = &loaded.config.output.dir;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    match command {
        Command::Robustness => robustness(loaded, out),
        Command::Mine => cmd_mine(loaded, out),
        Command::Rgda => cmd_rgda(loaded, out),
        Command::Sda => cmd_sda(loaded, out),
        Command::Sweep => cmd_sweep(loaded, out),
    }
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::Increasing => "increasing",
        Direction::Decreasing => "decreasing",
        Direction::Unknown => "unknown",
    }
}

fn centre(bounds: &[(f64, f64)]) -> Vec<f64> {
    bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
}

/// Fields shared by every `result.json`.
fn header(loaded: &Loaded, command: Command, formula: &Formula) -> Map<String, Value> {
    let names = loaded.param_names();
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command.name()));
    m.insert("generated_at".into(), json!(report::timestamp()));
    m.insert("formula".into(), json!(loaded.config.formula));
    m.insert(
        "formula_nnf".into(),
        json!(formula.display(&names).to_string()),
    );
    m.insert("param_names".into(), json!(names));
    m.insert(
        "theta_min".into(),
        nums(
            &loaded
                .config
                .parameters
                .iter()
                .map(|p| p.min)
                .collect::<Vec<_>>(),
        ),
    );
    m.insert(
        "theta_max".into(),
        nums(
            &loaded
                .config
                .parameters
                .iter()
                .map(|p| p.max)
                .collect::<Vec<_>>(),
        ),
    );
    m
}

/// The system, formula and parameter space of a mining command.
struct Setup {
    system: Box<dyn SystemModel>,
    search: SearchSpace,
    formula: Formula,
    space: ParamSpace,
}

impl Setup {
    fn load(loaded: &Loaded) -> Result<Self> {
        let system = loaded.system()?;
        let search = system.search_space();
        let formula = loaded.formula(Some(&system.output_channels()))?;
        let Some(space) = loaded.param_space()? else {
            bail!("this command needs at least one declared parameter");
        };
        Ok(Self {
            system,
            search,
            formula,
            space,
        })
    }

    fn problem(&self, loaded: &Loaded) -> Result<(Problem<'_>, Monotonicity)> {
        let analysed = monotonicity(&self.formula, self.space.dim());
        let assumed = loaded.assumed();
        if let Some(d) = assumed {
            warn!(
                "assuming {} monotonicity (analyzer says {})",
                direction_name(d),
                direction_name(analysed.overall)
            );
        }
        let mut problem = Problem::new(
            self.system.as_ref(),
            &self.formula,
            &self.space,
            &self.search,
            assumed,
        )
        .with_context(|| {
            format!(
                "formula `{}` (use --assume-monotone to override the analyzer)",
                loaded.config.formula
            )
        })?;
        problem.semantics = loaded.semantics()?;
        let mono = match assumed {
            Some(d) => Monotonicity::assumed(d, self.space.dim()),
            None => analysed,
        };
        Ok((problem, mono))
    }

    fn header(&self, loaded: &Loaded, command: Command, mono: &Monotonicity) -> Map<String, Value> {
        let mut m = header(loaded, command, &self.formula);
        m.insert("system".into(), json!(self.system.name()));
        m.insert(
            "monotonicity".into(),
            json!({
                "overall": direction_name(mono.overall),
                "per_param": mono.per_param.iter().map(|&d| direction_name(d)).collect::<Vec<_>>(),
                "assumed": loaded.assumed().is_some(),
            }),
        );
        m.insert("seed".into(), json!(loaded.config.optimizer.seed));
        m.insert(
            "optimizer".into(),
            serde_json::to_value(&loaded.config.optimizer).expect("optimizer config serializes"),
        );
        m
    }

    /// Writes `anchors.csv` and `runlog.csv` and adds the domain to `result`.
    fn finish<'r>(
        &self,
        loaded: &Loaded,
        out: &Path,
        mut result: Map<String, Value>,
        domain: &FalsificationDomain,
        runs: impl IntoIterator<Item = &'r MineResult>,
    ) -> Result<()> {
        let (nx, nl) = (self.search.x0_dim(), self.search.lambda_dim());
        let names = loaded.param_names();
        report::write_anchors(out, &names, nx, nl, domain.anchors())?;
        let records = report::write_runlog(
            out,
            &names,
            nx,
            nl,
            runs.into_iter().flat_map(|r| &r.records),
        )?;
        let volume = domain.volume(
            loaded.config.output.volume_samples,
            loaded.config.optimizer.seed,
        );
        result.insert("simulations".into(), json!(records));
        result.insert(
            "anchors".into(),
            Value::Array(domain.anchors().iter().map(anchor_json).collect()),
        );
        result.insert("volume_estimate".into(), num(volume));
        report::write_json(out, "result.json", &result)?;
        info!(
            "{} anchors, volume {:.4}, {records} simulations; wrote {}",
            domain.anchors().len(),
            volume,
            out.display()
        );
        say!("anchors {}", domain.anchors().len());
        say!("volume {}", fmt(volume));
        Ok(())
    }
}

fn mine_json(res: &MineResult) -> Value {
    json!({
        "theta_raw": nums(&res.theta_raw),
        "theta_norm": nums(&res.theta_norm),
        "robustness": num(res.robustness),
        "cost": num(res.cost),
        "x0": nums(&res.x0),
        "lambda": nums(&res.lambda),
        "falsified": res.falsified(),
    })
}

fn cmd_mine(loaded: &Loaded, out: &Path) -> Result<u8> {
    let setup = Setup::load(loaded)?;
    let (problem, mono) = setup.problem(loaded)?;
    let cfg = &loaded.config.optimizer;
    let priority = &loaded.config.mine.priority;
    let res = mine(&problem, priority, cfg)?;
    let mut domain = FalsificationDomain::new(problem.direction, problem.dim())?;
    if res.falsified() {
        domain.insert(res.anchor(cfg.seed, 0))?;
    }
    say!("robustness {}", fmt(res.robustness));
    say!(
        "theta {}",
        res.theta_raw
            .iter()
            .map(|&x| fmt(x))
            .collect::<Vec<_>>()
            .join(" ")
    );
    let mut result = setup.header(loaded, Command::Mine, &mono);
    result.insert("priority".into(), serde_json::to_value(priority)?);
    result.insert("best".into(), mine_json(&res));
    setup.finish(loaded, out, result, &domain, [&res])?;
    Ok(0)
}

fn cmd_rgda(loaded: &Loaded, out: &Path) -> Result<u8> {
    let setup = Setup::load(loaded)?;
    let (problem, mono) = setup.problem(loaded)?;
    let iterations = loaded.config.rgda.iterations;
    let outcome = rgda(&problem, iterations, &loaded.config.optimizer)?;
    let mut result = setup.header(loaded, Command::Rgda, &mono);
    result.insert("iterations".into(), json!(iterations));
    result.insert(
        "runs".into(),
        Value::Array(
            outcome
                .runs
                .iter()
                .map(|(w, r)| json!({ "weights": nums(w), "best": mine_json(r) }))
                .collect(),
        ),
    );
    setup.finish(
        loaded,
        out,
        result,
        &outcome.domain,
        outcome.runs.iter().map(|(_, r)| r),
    )?;
    Ok(0)
}

fn cmd_sda(loaded: &Loaded, out: &Path) -> Result<u8> {
    let setup = Setup::load(loaded)?;
    let (problem, mono) = setup.problem(loaded)?;
    let spec = loaded
        .config
        .sda
        .as_ref()
        .context("the `sda` section (bias, epsilon) is required")?;
    let settings = SdaConfig {
        bias: spec.bias.clone(),
        epsilon: spec.epsilon,
        max_iterations: spec.max_iterations,
    };
    let outcome = sda(&problem, &settings, &loaded.config.optimizer)?;
    let markers_raw = outcome
        .markers
        .iter()
        .map(|m| setup.space.denormalize(m).map(|r| nums(&r)))
        .collect::<Result<Vec<_>, _>>()?;
    let termination = match outcome.termination {
        Termination::Exhausted => "exhausted",
        Termination::Converged => "converged",
        Termination::IterationCap => "iteration_cap",
    };
    let mut result = setup.header(loaded, Command::Sda, &mono);
    result.insert(
        "sda".into(),
        json!({ "bias": nums(&spec.bias), "epsilon": num(spec.epsilon), "max_iterations": spec.max_iterations }),
    );
    result.insert("markers_raw".into(), Value::Array(markers_raw));
    result.insert(
        "markers_norm".into(),
        Value::Array(outcome.markers.iter().map(|m| nums(m)).collect()),
    );
    result.insert(
        "runs".into(),
        Value::Array(
            outcome
                .runs
                .iter()
                .map(|(s, r)| json!({ "start": nums(s), "best": mine_json(r) }))
                .collect(),
        ),
    );
    result.insert("waves".into(), json!(outcome.waves));
    result.insert("termination".into(), json!(termination));
    say!("termination {termination} after {} waves", outcome.waves);
    setup.finish(
        loaded,
        out,
        result,
        &outcome.domain,
        outcome.runs.iter().map(|(_, r)| r),
    )?;
    Ok(0)
}

fn cmd_sweep(loaded: &Loaded, out: &Path) -> Result<u8> {
    let setup = Setup::load(loaded)?;
    let cfg = loaded
        .config
        .sweep
        .as_ref()
        .context("the `sweep` section (theta_counts) is required")?;
    let spec = SweepSpec {
        theta_counts: cfg.theta_counts.clone(),
        input_counts: cfg.input_counts.clone(),
        x0: cfg.x0.clone(),
        lambda: cfg.lambda.clone(),
        max_points: cfg.max_points,
    };
    let semantics = loaded.semantics()?;
    let rows = sweep(
        setup.system.as_ref(),
        &setup.formula,
        &setup.space,
        &setup.search,
        &spec,
        &semantics,
    )?;
    let names = loaded.param_names();
    report::write_sweep(
        out,
        &names,
        setup.search.x0_dim(),
        setup.search.lambda_dim(),
        &rows,
    )?;
    let falsified = rows.iter().filter(|r| r.robustness <= 0.0).count();
    let min = rows
        .iter()
        .map(|r| r.robustness)
        .fold(f64::INFINITY, f64::min);
    let max = rows
        .iter()
        .map(|r| r.robustness)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut result = header(loaded, Command::Sweep, &setup.formula);
    result.insert("system".into(), json!(setup.system.name()));
    result.insert("theta_counts".into(), json!(cfg.theta_counts));
    result.insert("input_counts".into(), json!(cfg.input_counts));
    result.insert("rows".into(), json!(rows.len()));
    result.insert("falsified_rows".into(), json!(falsified));
    result.insert("robustness_min".into(), num(min));
    result.insert("robustness_max".into(), num(max));
    report::write_json(out, "result.json", &result)?;
    say!("rows {} falsified {falsified}", rows.len());
    Ok(0)
}

fn robustness(loaded: &Loaded, out: &Path) -> Result<u8> {
    let spec = &loaded.config.robustness;
    let mut result;
    let (trace, formula) = match &spec.trace {
        Some(path) => {
            let trace = TimedStateSequence::from_csv_path(path)
                .with_context(|| format!("reading trace {}", path.display()))?;
            let formula = loaded.formula(None)?;
            result = header(loaded, Command::Robustness, &formula);
            result.insert("trace".into(), json!(path.display().to_string()));
            (trace, formula)
        }
        None => {
            let system = loaded
                .system()
                .context("no trace given (--trace or robustness.trace); simulating the system")?;
            let search = system.search_space();
            let formula = loaded.formula(Some(&system.output_channels()))?;
            let bounds = search.bounds();
            let (cx0, cl) = bounds.split_at(search.x0_dim());
            let x0 = spec.x0.clone().unwrap_or_else(|| centre(cx0));
            let lambda = spec.lambda.clone().unwrap_or_else(|| centre(cl));
            let trace = system
                .simulate(&x0, &lambda)
                .with_context(|| format!("simulating {}", system.name()))?;
            result = header(loaded, Command::Robustness, &formula);
            result.insert("system".into(), json!(system.name()));
            result.insert("x0".into(), nums(&x0));
            result.insert("lambda".into(), nums(&lambda));
            (trace, formula)
        }
    };
    let n = loaded.config.parameters.len();
    let ground = match (&spec.theta, n) {
        (_, 0) => formula,
        (Some(theta), _) => {
            ensure!(
                theta.len() == n,
                "robustness.theta has {} values for {n} parameters",
                theta.len()
            );
            result.insert("theta".into(), nums(theta));
            instantiate(&formula, theta)?
        }
        (None, _) => bail!("the formula has parameters; set robustness.theta"),
    };
    let sem = loaded.semantics()?;
    let rob = robustness_with(&ground, &trace, 0, &sem)
        .with_context(|| format!("evaluating `{}`", loaded.config.formula))?;
    say!("robustness {}", fmt(rob));
    result.insert("robustness".into(), num(rob));
    if spec.series {
        let series = robustness_series_with(&ground, &trace, &sem)?;
        for (t, r) in trace.times().iter().zip(&series) {
            say!("{} {}", fmt(*t), fmt(*r));
        }
        result.insert("series".into(), nums(&series));
    }
    report::write_json(out, "result.json", &result)?;
    Ok(if rob > 0.0 { 0 } else { 1 })
}
