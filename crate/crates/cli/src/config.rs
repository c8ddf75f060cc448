//! The JSON run configuration.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use paramine_core::mtl::{Formula, Parser, Semantics};
use paramine_core::optimize::{OptimizerConfig, Priority};
use paramine_core::pmtl::{Direction, ParamSpace};
use paramine_core::sysmodel::{
    system_by_name, HsSystem, InputSignal, Interpolation, RampSystem, SurrogateAt, SystemModel,
    TraceReplay,
};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    /// Required by every command except `robustness` on a trace file.
    #[serde(default)]
    pub system: SystemSpec,
    pub formula: String,
    #[serde(default)]
    pub parameters: Vec<ParamDecl>,
    /// Top-level seed; when present it replaces `optimizer.seed`.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    /// Command run by `paramine run`.
    #[serde(default)]
    pub algorithm: Option<Command>,
    #[serde(default)]
    pub assume_monotonicity: Option<Monotone>,
    #[serde(default)]
    pub bool_magnitude: Option<f64>,
    #[serde(default)]
    pub robustness: RobustnessSpec,
    #[serde(default)]
    pub mine: MineSpec,
    #[serde(default)]
    pub rgda: RgdaSpec,
    #[serde(default)]
    pub sda: Option<SdaSpec>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Robustness,
    Mine,
    Rgda,
    Sda,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Robustness => "robustness",
            Command::Mine => "mine",
            Command::Rgda => "rgda",
            Command::Sda => "sda",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Monotone {
    Increasing,
    Decreasing,
}

impl From<Monotone> for Direction {
    fn from(m: Monotone) -> Self {
        match m {
            Monotone::Increasing => Direction::Increasing,
            Monotone::Decreasing => Direction::Decreasing,
        }
    }
}

/// A built-in system (with optional overrides) or a trace-replay manifest.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub name: Option<String>,
    /// Manifest path, relative to the config file.
    pub replay: Option<PathBuf>,
    pub horizon: Option<f64>,
    pub step: Option<f64>,
    /// Initial-condition box (hs only).
    pub initial: Option<Vec<(f64, f64)>>,
    /// Throttle control times (surrogate_at only).
    pub throttle_times: Option<Vec<f64>>,
    pub throttle_range: Option<(f64, f64)>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamDecl {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RobustnessSpec {
    /// Raw parameter values; required when the formula has parameters.
    pub theta: Option<Vec<f64>>,
    /// Trace CSV to evaluate instead of simulating, relative to the config.
    pub trace: Option<PathBuf>,
    pub x0: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    #[serde(default)]
    pub series: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MineSpec {
    #[serde(default = "default_priority")]
    pub priority: Priority,
}

impl Default for MineSpec {
    fn default() -> Self {
        Self {
            priority: default_priority(),
        }
    }
}

fn default_priority() -> Priority {
    Priority::Norm
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RgdaSpec {
    #[serde(default = "default_iterations")]
    pub iterations: usize,
}

impl Default for RgdaSpec {
    fn default() -> Self {
        Self {
            iterations: default_iterations(),
        }
    }
}

fn default_iterations() -> usize {
    20
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdaSpec {
    pub bias: Vec<f64>,
    pub epsilon: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

fn default_max_iterations() -> usize {
    100
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub theta_counts: Vec<usize>,
    pub input_counts: Option<Vec<usize>>,
    pub x0: Option<Vec<f64>>,
    pub lambda: Option<Vec<f64>>,
    #[serde(default = "default_max_points")]
    pub max_points: usize,
}

fn default_max_points() -> usize {
    1_000_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory, relative to the working directory.
    #[serde(default = "default_out")]
    pub dir: PathBuf,
    /// Monte Carlo samples for the reported domain volume.
    #[serde(default = "default_volume_samples")]
    pub volume_samples: usize,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: default_out(),
            volume_samples: default_volume_samples(),
        }
    }
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_volume_samples() -> usize {
    100_000
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    pub out: Option<PathBuf>,
    pub assume: Option<Monotone>,
    pub trace: Option<PathBuf>,
}

/// A loaded configuration with paths resolved and overrides applied.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub base: PathBuf,
}

impl Loaded {
    pub fn read(path: &Path, overrides: &Overrides) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut config: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        ensure!(
            config.schema_version == SCHEMA_VERSION,
            "config {}: unsupported schema_version {} (expected {SCHEMA_VERSION})",
            path.display(),
            config.schema_version
        );
        if let Some(seed) = config.seed {
            config.optimizer.seed = seed;
        }
        if let Some(seed) = overrides.seed {
            config.optimizer.seed = seed;
        }
        if let Some(budget) = overrides.budget {
            config.optimizer.budget = budget;
        }
        if let Some(out) = &overrides.out {
            config.output.dir = out.clone();
        }
        if let Some(a) = overrides.assume {
            config.assume_monotonicity = Some(a);
        }
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        if let Some(trace) = &overrides.trace {
            config.robustness.trace = Some(trace.clone());
        } else if let Some(trace) = &config.robustness.trace {
            config.robustness.trace = Some(base.join(trace));
        }
        config
            .optimizer
            .validate()
            .with_context(|| format!("config {}: optimizer", path.display()))?;
        Ok(Self { config, base })
    }

    pub fn system(&self) -> Result<Box<dyn SystemModel>> {
        build_system(&self.config.system, &self.base)
    }

    pub fn param_names(&self) -> Vec<String> {
        self.config
            .parameters
            .iter()
            .map(|p| p.name.clone())
            .collect()
    }

    /// `None` when the formula declares no parameters.
    pub fn param_space(&self) -> Result<Option<ParamSpace>> {
        let p = &self.config.parameters;
        if p.is_empty() {
            return Ok(None);
        }
        let space = ParamSpace::new(
            self.param_names(),
            p.iter().map(|d| d.min).collect(),
            p.iter().map(|d| d.max).collect(),
        )
        .context("parameter declarations")?;
        Ok(Some(space))
    }

    /// Parses the formula; atoms must name channels in `channels` when given.
    pub fn formula(&self, channels: Option<&[String]>) -> Result<Formula> {
        let names = self.param_names();
        let mut parser = Parser::new(&names);
        if let Some(ch) = channels {
            parser = parser.channels(ch);
        }
        parser
            .parse(&self.config.formula)
            .with_context(|| format!("formula `{}`", self.config.formula))
    }

    pub fn semantics(&self) -> Result<Semantics> {
        let mut sem = Semantics::default();
        if let Some(m) = self.config.bool_magnitude {
            ensure!(m > 0.0 && m.is_finite(), "bool_magnitude must be positive");
            sem.bool_magnitude = m;
        }
        Ok(sem)
    }

    pub fn assumed(&self) -> Option<Direction> {
        self.config.assume_monotonicity.map(Direction::from)
    }
}

fn build_system(spec: &SystemSpec, base: &Path) -> Result<Box<dyn SystemModel>> {
    for (what, v) in [("horizon", spec.horizon), ("step", spec.step)] {
        if let Some(v) = v {
            ensure!(
                v.is_finite() && v > 0.0,
                "system.{what} must be positive, got {v}"
            );
        }
    }
    match (&spec.name, &spec.replay) {
        (Some(_), Some(_)) => bail!("system: give either `name` or `replay`, not both"),
        (None, None) => bail!("system: one of `name` or `replay` is required"),
        (None, Some(manifest)) => {
            ensure!(
                spec.horizon.is_none()
                    && spec.step.is_none()
                    && spec.initial.is_none()
                    && spec.throttle_times.is_none()
                    && spec.throttle_range.is_none(),
                "system: overrides do not apply to trace replay"
            );
            let path = base.join(manifest);
            let replay = TraceReplay::load(&path)
                .with_context(|| format!("loading replay manifest {}", path.display()))?;
            Ok(Box::new(replay))
        }
        (Some(name), None) => match name.as_str() {
            "hs" => {
                let mut sys = HsSystem::default();
                if let Some(h) = spec.horizon {
                    sys.horizon = h;
                }
                if let Some(h) = spec.step {
                    sys.step = h;
                }
                if let Some(init) = &spec.initial {
                    ensure!(init.len() == 2, "system.initial: hs has 2 states");
                    sys.initial = [init[0], init[1]];
                }
                ensure!(
                    spec.throttle_times.is_none() && spec.throttle_range.is_none(),
                    "system: throttle settings apply only to surrogate_at"
                );
                Ok(Box::new(sys))
            }
            "ramp" => {
                let mut sys = RampSystem::default();
                if let Some(h) = spec.horizon {
                    sys.horizon = h;
                }
                if let Some(h) = spec.step {
                    sys.step = h;
                }
                ensure!(
                    spec.initial.is_none()
                        && spec.throttle_times.is_none()
                        && spec.throttle_range.is_none(),
                    "system: ramp takes no initial box or inputs"
                );
                Ok(Box::new(sys))
            }
            "surrogate_at" => {
                let mut sys = SurrogateAt::default();
                if let Some(h) = spec.horizon {
                    sys.horizon = h;
                }
                if let Some(h) = spec.step {
                    sys.step = h;
                }
                if let Some(t) = &spec.throttle_times {
                    sys.throttle_times = t.clone();
                }
                if let Some(r) = spec.throttle_range {
                    sys.throttle_range = r;
                }
                InputSignal::uniform(
                    "throttle",
                    sys.throttle_times.clone(),
                    sys.throttle_range,
                    Interpolation::PiecewiseConstant,
                )
                .context("system: throttle parameterization")?;
                ensure!(
                    spec.initial.is_none(),
                    "system: surrogate_at starts at rest; no initial box"
                );
                Ok(Box::new(sys))
            }
            other => Ok(system_by_name(other)?),
        },
    }
}
