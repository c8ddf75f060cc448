//! Two-mode nonlinear hybrid benchmark.
//!
//! Mode `S0`:
//! `ẋ₁ = x₁ − x₂ + 0.1t`, `ẋ₂ = −x₁ sin(2πx₁) + x₂ cos(2πx₂) + 0.1t`.
//! Mode `S1`: `ẋ₁ = x₁`, `ẋ₂ = −x₁ + x₂`.
//!
//! The run switches from `S0` to `S1` once the state lies in the closed box
//! `[0.85, 0.95]²` and never switches back.

use std::f64::consts::PI;

use super::{
    check_initial, integrate_rk4, trajectory_to_trace, HybridDynamics, InputParameterization,
    SearchSpace, SimError, SystemModel, Trajectory,
};
use crate::mtl::TimedStateSequence;

pub const MODE_S0: usize = 0;
pub const MODE_S1: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct HsSystem {
    pub horizon: f64,
    pub step: f64,
    pub guard: [(f64, f64); 2],
    pub initial: [(f64, f64); 2],
}

impl Default for HsSystem {
    fn default() -> Self {
        Self {
            horizon: 5.0,
            step: 0.01,
            guard: [(0.85, 0.95), (0.85, 0.95)],
            initial: [(-1.0, 1.0), (-1.0, 1.0)],
        }
    }
}

impl HsSystem {
    fn in_guard(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.guard)
            .all(|(&v, &(lo, hi))| lo <= v && v <= hi)
    }

    /// Full trajectory including the discrete mode at each sample.
    pub fn trajectory(&self, x0: &[f64]) -> Result<Trajectory, SimError> {
        check_initial(x0, &self.initial)?;
        integrate_rk4(self, x0, 0.0, self.horizon, self.step)
    }
}

impl HybridDynamics for HsSystem {
    fn state_dim(&self) -> usize {
        2
    }

    fn initial_mode(&self, x0: &[f64]) -> usize {
        if self.in_guard(x0) {
            MODE_S1
        } else {
            MODE_S0
        }
    }

    fn derivative(&self, mode: usize, t: f64, x: &[f64], dx: &mut [f64]) {
        let (x1, x2) = (x[0], x[1]);
        if mode == MODE_S0 {
            dx[0] = x1 - x2 + 0.1 * t;
            dx[1] = -x1 * (2.0 * PI * x1).sin() + x2 * (2.0 * PI * x2).cos() + 0.1 * t;
        } else {
            dx[0] = x1;
            dx[1] = -x1 + x2;
        }
    }

    fn next_mode(&self, mode: usize, _t: f64, x: &[f64]) -> usize {
        if mode == MODE_S0 && self.in_guard(x) {
            MODE_S1
        } else {
            mode
        }
    }
}

impl SystemModel for HsSystem {
    fn name(&self) -> &str {
        "hs"
    }

    fn output_channels(&self) -> Vec<String> {
        vec!["x1".into(), "x2".into()]
    }

    fn search_space(&self) -> SearchSpace {
        SearchSpace {
            initial: self.initial.to_vec(),
            inputs: InputParameterization::none(),
        }
    }

    fn simulate(&self, x0: &[f64], lambda: &[f64]) -> Result<TimedStateSequence, SimError> {
        if !lambda.is_empty() {
            return Err(SimError::DimensionMismatch {
                what: "input parameters",
                expected: 0,
                got: lambda.len(),
            });
        }
        let tr = self.trajectory(x0)?;
        trajectory_to_trace(tr, self.output_channels(), &[0, 1])
    }
}
