//! Finitely parameterised input signals and search spaces.

use serde::{Deserialize, Serialize};

use super::SimError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    PiecewiseConstant,
    PiecewiseLinear,
}

/// One input channel described by its values at a list of control times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSignal {
    pub name: String,
    pub control_times: Vec<f64>,
    /// Admissible range of the value at each control point.
    pub bounds: Vec<(f64, f64)>,
    pub interpolation: Interpolation,
}

impl InputSignal {
    pub fn new(
        name: impl Into<String>,
        control_times: Vec<f64>,
        bounds: Vec<(f64, f64)>,
        interpolation: Interpolation,
    ) -> Result<Self, SimError> {
        let name = name.into();
        if control_times.is_empty() {
            return Err(SimError::InvalidInput(format!(
                "input `{name}` has no control points"
            )));
        }
        if control_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SimError::InvalidInput(format!(
                "control times of input `{name}` are not strictly increasing"
            )));
        }
        if bounds.len() != control_times.len() {
            return Err(SimError::InvalidInput(format!(
                "input `{name}` has {} control times but {} bounds",
                control_times.len(),
                bounds.len()
            )));
        }
        if bounds
            .iter()
            .any(|&(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo > hi)
        {
            return Err(SimError::InvalidInput(format!(
                "input `{name}` has an empty or unbounded control range"
            )));
        }
        Ok(Self {
            name,
            control_times,
            bounds,
            interpolation,
        })
    }

    /// Same range at every control point.
    pub fn uniform(
        name: impl Into<String>,
        control_times: Vec<f64>,
        range: (f64, f64),
        interpolation: Interpolation,
    ) -> Result<Self, SimError> {
        let bounds = vec![range; control_times.len()];
        Self::new(name, control_times, bounds, interpolation)
    }

    pub fn len(&self) -> usize {
        self.control_times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.control_times.is_empty()
    }
}

/// Value of `signal` at time `t` given its control-point values `lambda`.
///
/// Piecewise-constant holds the most recent control value; piecewise-linear
/// interpolates between bracketing control points. Both clamp outside the
/// control-time range.
pub fn interpolate_input(signal: &InputSignal, lambda: &[f64], t: f64) -> Result<f64, SimError> {
    if lambda.len() != signal.len() {
        return Err(SimError::DimensionMismatch {
            what: "input control values",
            expected: signal.len(),
            got: lambda.len(),
        });
    }
    let ts = &signal.control_times;
    let k = ts.partition_point(|&c| c <= t);
    if k == 0 {
        return Ok(lambda[0]);
    }
    if k == ts.len() {
        return Ok(lambda[ts.len() - 1]);
    }
    Ok(match signal.interpolation {
        Interpolation::PiecewiseConstant => lambda[k - 1],
        Interpolation::PiecewiseLinear => {
            let (t0, t1) = (ts[k - 1], ts[k]);
            let a = (t - t0) / (t1 - t0);
            (1.0 - a) * lambda[k - 1] + a * lambda[k]
        }
    })
}

/// All input channels of a system; `λ` is the concatenation of every
/// signal's control values in order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InputParameterization {
    pub signals: Vec<InputSignal>,
}

impl InputParameterization {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.signals.iter().map(InputSignal::len).sum()
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        self.signals
            .iter()
            .flat_map(|s| s.bounds.iter().copied())
            .collect()
    }

    /// Writes every signal's value at time `t` into `out`.
    pub fn evaluate(&self, lambda: &[f64], t: f64, out: &mut [f64]) -> Result<(), SimError> {
        if lambda.len() != self.dim() {
            return Err(SimError::DimensionMismatch {
                what: "input parameters",
                expected: self.dim(),
                got: lambda.len(),
            });
        }
        let mut offset = 0;
        for (k, s) in self.signals.iter().enumerate() {
            out[k] = interpolate_input(s, &lambda[offset..offset + s.len()], t)?;
            offset += s.len();
        }
        Ok(())
    }
}

/// The searched set `Γ = X₀ × Λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub initial: Vec<(f64, f64)>,
    pub inputs: InputParameterization,
}

impl SearchSpace {
    pub fn new(initial: Vec<(f64, f64)>, inputs: InputParameterization) -> Result<Self, SimError> {
        if initial
            .iter()
            .any(|&(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo > hi)
        {
            return Err(SimError::InvalidInput(
                "initial-condition box is empty or unbounded".into(),
            ));
        }
        Ok(Self { initial, inputs })
    }

    pub fn x0_dim(&self) -> usize {
        self.initial.len()
    }

    pub fn lambda_dim(&self) -> usize {
        self.inputs.dim()
    }

    pub fn dim(&self) -> usize {
        self.x0_dim() + self.lambda_dim()
    }

    /// Bounds of the concatenated vector `[x₀, λ]`.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let mut b = self.initial.clone();
        b.extend(self.inputs.bounds());
        b
    }

    /// Splits a concatenated `[x₀, λ]` vector.
    pub fn split<'a>(&self, point: &'a [f64]) -> (&'a [f64], &'a [f64]) {
        point.split_at(self.x0_dim())
    }

    pub fn contains(&self, x0: &[f64], lambda: &[f64]) -> bool {
        x0.len() == self.x0_dim()
            && lambda.len() == self.lambda_dim()
            && x0
                .iter()
                .chain(lambda)
                .zip(self.bounds())
                .all(|(&v, (lo, hi))| lo <= v && v <= hi)
    }
}
