//! Closed-form verification system: a single output `y(t) = t`.

use super::{sample_count, InputParameterization, SearchSpace, SimError, SystemModel};
use crate::mtl::TimedStateSequence;

#[derive(Debug, Clone, PartialEq)]
pub struct RampSystem {
    pub horizon: f64,
    pub step: f64,
}

impl Default for RampSystem {
    fn default() -> Self {
        Self {
            horizon: 10.0,
            step: 0.05,
        }
    }
}

impl SystemModel for RampSystem {
    fn name(&self) -> &str {
        "ramp"
    }

    fn output_channels(&self) -> Vec<String> {
        vec!["y".into()]
    }

    fn search_space(&self) -> SearchSpace {
        SearchSpace {
            initial: Vec::new(),
            inputs: InputParameterization::none(),
        }
    }

    fn simulate(&self, x0: &[f64], lambda: &[f64]) -> Result<TimedStateSequence, SimError> {
        if !x0.is_empty() || !lambda.is_empty() {
            return Err(SimError::DimensionMismatch {
                what: "ramp takes no initial condition or inputs; values",
                expected: 0,
                got: x0.len() + lambda.len(),
            });
        }
        let times: Vec<f64> = (0..sample_count(self.horizon, self.step))
            .map(|i| i as f64 * self.step)
            .collect();
        let y = times.clone();
        Ok(TimedStateSequence::new(
            times,
            self.output_channels(),
            vec![y],
        )?)
    }
}
