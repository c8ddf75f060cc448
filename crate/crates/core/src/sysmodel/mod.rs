//! Deterministic system models mapping an initial condition and input
//! parameters to a timed state sequence.

mod hs;
mod input;
mod integrate;
mod ramp;
mod replay;
mod surrogate_at;

use thiserror::Error;

use crate::mtl::{TimedStateSequence, TraceError};

pub use hs::HsSystem;
pub use input::{
    interpolate_input, InputParameterization, InputSignal, Interpolation, SearchSpace,
};
pub use integrate::{integrate_rk4, sample_count, HybridDynamics, Trajectory};
pub use ramp::RampSystem;
pub use replay::{ReplayEntry, ReplayManifest, TraceReplay};
pub use surrogate_at::SurrogateAt;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{what}: expected {expected} values, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("component {index} of the initial condition is {value}, outside [{lower}, {upper}]")]
    InitialOutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("invalid integration step h={h} over horizon {horizon}")]
    InvalidStep { h: f64, horizon: f64 },
    #[error("state became non-finite at t={time}")]
    NonFinite { time: f64 },
    #[error("invalid input parameterization: {0}")]
    InvalidInput(String),
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("trace replay: {0}")]
    Replay(String),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// A deterministic simulator: identical arguments give identical traces.
pub trait SystemModel: Send + Sync {
    fn name(&self) -> &str;

    fn output_channels(&self) -> Vec<String>;

    /// Default initial-condition box and input parameterization.
    fn search_space(&self) -> SearchSpace;

    fn simulate(&self, x0: &[f64], lambda: &[f64]) -> Result<TimedStateSequence, SimError>;
}

/// Names accepted by [`system_by_name`].
pub const BUILTIN_SYSTEMS: &[&str] = &["hs", "ramp", "surrogate_at"];

pub fn system_by_name(name: &str) -> Result<Box<dyn SystemModel>, SimError> {
    match name {
        "hs" => Ok(Box::new(HsSystem::default())),
        "ramp" => Ok(Box::new(RampSystem::default())),
        "surrogate_at" => Ok(Box::new(SurrogateAt::default())),
        other => Err(SimError::UnknownSystem(other.to_string())),
    }
}

pub(crate) fn check_initial(x0: &[f64], bounds: &[(f64, f64)]) -> Result<(), SimError> {
    if x0.len() != bounds.len() {
        return Err(SimError::DimensionMismatch {
            what: "initial condition",
            expected: bounds.len(),
            got: x0.len(),
        });
    }
    for (index, (&value, &(lower, upper))) in x0.iter().zip(bounds).enumerate() {
        if !(lower <= value && value <= upper) {
            return Err(SimError::InitialOutOfBounds {
                index,
                value,
                lower,
                upper,
            });
        }
    }
    Ok(())
}

pub(crate) fn trajectory_to_trace(
    tr: Trajectory,
    channels: Vec<String>,
    outputs: &[usize],
) -> Result<TimedStateSequence, SimError> {
    let columns = outputs.iter().map(|&k| tr.component(k)).collect();
    Ok(TimedStateSequence::new(tr.times, channels, columns)?)
}
