//! Externally simulated systems: a manifest maps `(x₀, λ)` points to CSV
//! trace files, and a query returns the trace of the nearest listed point.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{
    InputParameterization, InputSignal, Interpolation, SearchSpace, SimError, SystemModel,
};
use crate::mtl::TimedStateSequence;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayEntry {
    #[serde(default)]
    pub x0: Vec<f64>,
    #[serde(default)]
    pub lambda: Vec<f64>,
    /// Trace CSV, relative to the manifest's directory.
    pub file: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayManifest {
    #[serde(default = "default_name")]
    pub name: String,
    /// Initial-condition box searched over.
    #[serde(default)]
    pub initial: Vec<(f64, f64)>,
    /// Range of each input parameter.
    #[serde(default)]
    pub lambda_bounds: Vec<(f64, f64)>,
    pub entries: Vec<ReplayEntry>,
}

fn default_name() -> String {
    "replay".into()
}

/// A system backed by pre-computed traces.
#[derive(Debug, Clone)]
pub struct TraceReplay {
    manifest: ReplayManifest,
    traces: Vec<TimedStateSequence>,
    channels: Vec<String>,
}

impl TraceReplay {
    /// Loads the manifest at `path` and every trace it lists.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::Replay(format!("{}: {e}", path.display())))?;
        let manifest: ReplayManifest = serde_json::from_str(&text)
            .map_err(|e| SimError::Replay(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_manifest(manifest, base)
    }

    pub fn from_manifest(manifest: ReplayManifest, base: &Path) -> Result<Self, SimError> {
        if manifest.entries.is_empty() {
            return Err(SimError::Replay("manifest lists no traces".into()));
        }
        let mut traces = Vec::with_capacity(manifest.entries.len());
        for e in &manifest.entries {
            if e.x0.len() != manifest.initial.len()
                || e.lambda.len() != manifest.lambda_bounds.len()
            {
                return Err(SimError::Replay(format!(
                    "entry {} does not match the declared dimensions",
                    e.file.display()
                )));
            }
            let file = base.join(&e.file);
            let tss = TimedStateSequence::from_csv_path(&file)
                .map_err(|err| SimError::Replay(format!("{}: {err}", file.display())))?;
            traces.push(tss);
        }
        let channels = traces[0].channels().to_vec();
        if traces.iter().any(|t| t.channels() != channels.as_slice()) {
            return Err(SimError::Replay(
                "traces do not share the same channels".into(),
            ));
        }
        SearchSpace::new(manifest.initial.clone(), InputParameterization::none())?;
        Ok(Self {
            manifest,
            traces,
            channels,
        })
    }

    fn nearest(&self, x0: &[f64], lambda: &[f64]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (k, e) in self.manifest.entries.iter().enumerate() {
            let d: f64 =
                e.x0.iter()
                    .chain(&e.lambda)
                    .zip(x0.iter().chain(lambda))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
            if d < best.0 {
                best = (d, k);
            }
        }
        best.1
    }
}

impl SystemModel for TraceReplay {
    fn name(&self) -> &str {
        &self.manifest.name
    }

    fn output_channels(&self) -> Vec<String> {
        self.channels.clone()
    }

    fn search_space(&self) -> SearchSpace {
        let signals = if self.manifest.lambda_bounds.is_empty() {
            Vec::new()
        } else {
            let times = (0..self.manifest.lambda_bounds.len())
                .map(|k| k as f64)
                .collect();
            vec![InputSignal {
                name: "lambda".into(),
                control_times: times,
                bounds: self.manifest.lambda_bounds.clone(),
                interpolation: Interpolation::PiecewiseConstant,
            }]
        };
        SearchSpace {
            initial: self.manifest.initial.clone(),
            inputs: InputParameterization { signals },
        }
    }

    fn simulate(&self, x0: &[f64], lambda: &[f64]) -> Result<TimedStateSequence, SimError> {
        if x0.len() != self.manifest.initial.len() {
            return Err(SimError::DimensionMismatch {
                what: "initial condition",
                expected: self.manifest.initial.len(),
                got: x0.len(),
            });
        }
        if lambda.len() != self.manifest.lambda_bounds.len() {
            return Err(SimError::DimensionMismatch {
                what: "input parameters",
                expected: self.manifest.lambda_bounds.len(),
                got: lambda.len(),
            });
        }
        Ok(self.traces[self.nearest(x0, lambda)].clone())
    }
}
