//! A small stand-in for an automatic-transmission vehicle model.
//!
//! State `(v, ω)`: vehicle speed and engine speed. With throttle `u` and
//! gear `g ∈ {1,2,3,4}`:
//!
//! ```text
//! v̇ = (G_g · u − v) / τ_v
//! ω̇ = (R_g · v − ω) / τ_ω
//! ```
//!
//! `G_g` scales the speed set point reached at a given throttle and `R_g` is
//! the engine-to-wheel ratio of the gear. Gears shift up when `v` crosses
//! the up thresholds and down below the (lower) down thresholds.

use super::{
    check_initial, integrate_rk4, trajectory_to_trace, HybridDynamics, InputParameterization,
    InputSignal, Interpolation, SearchSpace, SimError, SystemModel,
};
use crate::mtl::TimedStateSequence;

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateAt {
    pub horizon: f64,
    pub step: f64,
    pub speed_gain: [f64; 4],
    pub engine_ratio: [f64; 4],
    pub tau_v: f64,
    pub tau_omega: f64,
    pub upshift: [f64; 3],
    pub downshift: [f64; 3],
    pub throttle_times: Vec<f64>,
    pub throttle_range: (f64, f64),
}

impl Default for SurrogateAt {
    fn default() -> Self {
        Self {
            horizon: 30.0,
            step: 0.05,
            speed_gain: [0.6, 1.0, 1.4, 1.6],
            engine_ratio: [110.0, 65.0, 45.0, 35.0],
            tau_v: 8.0,
            tau_omega: 0.5,
            upshift: [25.0, 50.0, 80.0],
            downshift: [20.0, 45.0, 75.0],
            throttle_times: vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0],
            throttle_range: (0.0, 100.0),
        }
    }
}

impl SurrogateAt {
    fn throttle(&self) -> InputSignal {
        InputSignal::uniform(
            "throttle",
            self.throttle_times.clone(),
            self.throttle_range,
            Interpolation::PiecewiseConstant,
        )
        .expect("default throttle parameterization is valid")
    }

    fn gear_for(&self, gear: usize, v: f64) -> usize {
        let mut g = gear;
        while g < 3 && v >= self.upshift[g] {
            g += 1;
        }
        while g > 0 && v < self.downshift[g - 1] {
            g -= 1;
        }
        g
    }
}

struct Run<'a> {
    model: &'a SurrogateAt,
    throttle: InputSignal,
    lambda: &'a [f64],
}

impl HybridDynamics for Run<'_> {
    fn state_dim(&self) -> usize {
        2
    }

    fn initial_mode(&self, x0: &[f64]) -> usize {
        self.model.gear_for(0, x0[0])
    }

    fn derivative(&self, gear: usize, t: f64, x: &[f64], dx: &mut [f64]) {
        let u = super::interpolate_input(&self.throttle, self.lambda, t)
            .expect("lambda length checked before integration");
        let m = self.model;
        dx[0] = (m.speed_gain[gear] * u - x[0]) / m.tau_v;
        dx[1] = (m.engine_ratio[gear] * x[0] - x[1]) / m.tau_omega;
    }

    fn next_mode(&self, gear: usize, _t: f64, x: &[f64]) -> usize {
        self.model.gear_for(gear, x[0])
    }
}

impl SystemModel for SurrogateAt {
    fn name(&self) -> &str {
        "surrogate_at"
    }

    fn output_channels(&self) -> Vec<String> {
        vec!["v".into(), "omega".into()]
    }

    fn search_space(&self) -> SearchSpace {
        SearchSpace {
            initial: vec![(0.0, 0.0), (0.0, 0.0)],
            inputs: InputParameterization {
                signals: vec![self.throttle()],
            },
        }
    }

    fn simulate(&self, x0: &[f64], lambda: &[f64]) -> Result<TimedStateSequence, SimError> {
        check_initial(x0, &[(0.0, f64::INFINITY), (0.0, f64::INFINITY)])?;
        let throttle = self.throttle();
        if lambda.len() != throttle.len() {
            return Err(SimError::DimensionMismatch {
                what: "throttle control values",
                expected: throttle.len(),
                got: lambda.len(),
            });
        }
        let run = Run {
            model: self,
            throttle,
            lambda,
        };
        let tr = integrate_rk4(&run, x0, 0.0, self.horizon, self.step)?;
        trajectory_to_trace(tr, self.output_channels(), &[0, 1])
    }
}
