//! Scalarisations over parameters and the penalty costs that fold the
//! falsification constraint into a single objective.

use serde::{Deserialize, Serialize};

use super::OptimizeError;

/// How a parameter vector is ranked while mining.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Priority {
    /// Euclidean norm.
    Norm,
    /// `Σ wᵢθᵢ`.
    WeightedSum { weights: Vec<f64> },
    /// A single coordinate.
    Single { index: usize },
    /// Largest coordinate.
    Max,
    /// Smallest coordinate.
    Min,
}

impl Priority {
    pub fn check(&self, dim: usize) -> Result<(), OptimizeError> {
        match self {
            Priority::WeightedSum { weights } if weights.len() != dim => {
                Err(OptimizeError::InvalidPriority(format!(
                    "{} weights for {dim} parameters",
                    weights.len()
                )))
            }
            Priority::WeightedSum { weights } if weights.iter().any(|w| !w.is_finite()) => Err(
                OptimizeError::InvalidPriority("weights must be finite".into()),
            ),
            Priority::Single { index } if *index >= dim => Err(OptimizeError::InvalidPriority(
                format!("coordinate {index} out of range for {dim} parameters"),
            )),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, theta: &[f64]) -> f64 {
        match self {
            Priority::Norm => theta.iter().map(|t| t * t).sum::<f64>().sqrt(),
            Priority::WeightedSum { weights } => {
                weights.iter().zip(theta).map(|(w, t)| w * t).sum()
            }
            Priority::Single { index } => theta[*index],
            Priority::Max => theta.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Priority::Min => theta.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    /// Magnitude of the penalty constant over the box `[lower, upper]`.
    ///
    /// For the norm this is `‖upper‖`; for the other scalarisations it is the
    /// spread of the priority over the box corners plus one.
    pub fn gamma_magnitude(&self, lower: &[f64], upper: &[f64]) -> f64 {
        match self {
            Priority::Norm => self.eval(upper),
            _ => {
                let (lo, hi) = self.corner_range(lower, upper);
                hi - lo + 1.0
            }
        }
    }

    fn corner_range(&self, lower: &[f64], upper: &[f64]) -> (f64, f64) {
        match self {
            Priority::WeightedSum { weights } => {
                let (mut lo, mut hi) = (0.0, 0.0);
                for ((w, l), u) in weights.iter().zip(lower).zip(upper) {
                    let (a, b) = (w * l, w * u);
                    lo += a.min(b);
                    hi += a.max(b);
                }
                (lo, hi)
            }
            _ => (self.eval(lower), self.eval(upper)),
        }
    }
}

/// Penalty constant for minimisation (`+`) in `[0,1]^η`.
pub fn gamma_min(priority: &Priority, dim: usize) -> f64 {
    priority.gamma_magnitude(&vec![0.0; dim], &vec![1.0; dim])
}

/// Penalty constant for maximisation (`−`) in `[0,1]^η`.
pub fn gamma_max(priority: &Priority, dim: usize) -> f64 {
    -gamma_min(priority, dim)
}

/// `f(θ) + (γ + rob)` when `rob ≥ 0`, else `f(θ)`. To be minimised.
pub fn cost_min(priority_value: f64, robustness: f64, gamma: f64) -> f64 {
    if robustness >= 0.0 {
        priority_value + (gamma + robustness)
    } else {
        priority_value
    }
}

/// `f(θ) + (γ − rob)` when `rob ≥ 0`, else `f(θ)`. To be maximised.
pub fn cost_max(priority_value: f64, robustness: f64, gamma: f64) -> f64 {
    if robustness >= 0.0 {
        priority_value + (gamma - robustness)
    } else {
        priority_value
    }
}

/// A ray `p + c·b` (or `p − c·b` when descending) inside `[0,1]^η`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ray {
    origin: Vec<f64>,
    direction: Vec<f64>,
    descending: bool,
}

impl Ray {
    /// `bias` must be non-negative with a positive entry; it is rescaled so
    /// its largest entry is 1.
    pub fn new(origin: Vec<f64>, bias: &[f64], descending: bool) -> Result<Self, OptimizeError> {
        if bias.len() != origin.len() {
            return Err(OptimizeError::InvalidBias(format!(
                "{} components for {} parameters",
                bias.len(),
                origin.len()
            )));
        }
        if bias.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
            return Err(OptimizeError::InvalidBias(
                "components must be finite and non-negative".into(),
            ));
        }
        let top = bias.iter().copied().fold(0.0, f64::max);
        if top <= 0.0 {
            return Err(OptimizeError::InvalidBias("all components are zero".into()));
        }
        Ok(Self {
            origin,
            direction: bias.iter().map(|b| b / top).collect(),
            descending,
        })
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn direction(&self) -> &[f64] {
        &self.direction
    }

    pub fn descending(&self) -> bool {
        self.descending
    }

    /// Largest `c` keeping the ray in the unit box.
    pub fn c_max(&self) -> f64 {
        self.origin
            .iter()
            .zip(&self.direction)
            .filter(|(_, &b)| b > 0.0)
            .map(|(&p, &b)| {
                let room = if self.descending { p } else { 1.0 - p };
                room.max(0.0) / b
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn point(&self, c: f64) -> Vec<f64> {
        self.origin
            .iter()
            .zip(&self.direction)
            .map(|(&p, &b)| {
                let v = if self.descending {
                    p - c * b
                } else {
                    p + c * b
                };
                v.clamp(0.0, 1.0)
            })
            .collect()
    }

    /// `c + (−(√η + 1) − rob)` when `rob ≥ 0`, else `c`. To be maximised.
    pub fn cost(&self, c: f64, robustness: f64) -> Result<f64, OptimizeError> {
        let c_max = self.c_max();
        if !(0.0..=c_max).contains(&c) {
            return Err(OptimizeError::RayOutOfRange { c, c_max });
        }
        let gamma = -((self.origin.len() as f64).sqrt() + 1.0);
        Ok(cost_max(c, robustness, gamma))
    }
}
