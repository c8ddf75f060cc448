//! Penalty costs and black-box search.

mod cost;
mod sa;

use thiserror::Error;

pub use cost::{cost_max, cost_min, gamma_max, gamma_min, Priority, Ray};
pub use sa::{
    optimize, optimize_with, simulated_annealing, uniform_search, Algorithm, Goal, OptResult,
    OptimizerConfig, SearchOptions,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("test budget must be at least 1")]
    ZeroBudget,
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("search domain has an empty or unbounded coordinate")]
    InvalidDomain,
    #[error("invalid priority function: {0}")]
    InvalidPriority(String),
    #[error("invalid bias vector: {0}")]
    InvalidBias(String),
    #[error("ray parameter {c} outside [0, {c_max}]")]
    RayOutOfRange { c: f64, c_max: f64 },
}
