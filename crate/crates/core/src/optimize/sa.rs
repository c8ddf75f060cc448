//! Simulated annealing and uniform random search over a box.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::OptimizeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Sa,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    Minimize,
    Maximize,
}

/// Search settings. Every oracle call counts against `budget`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub algorithm: Algorithm,
    pub budget: usize,
    pub seed: u64,
    /// Fixed starting temperature; by default derived from warm-up samples.
    pub init_temp: Option<f64>,
    /// Temperature multiplier applied after every proposal.
    pub cooling: f64,
    /// Proposal standard deviation as a fraction of each coordinate's range.
    pub proposal_scale: f64,
    /// Number of restarts from a fresh random point, evenly spaced over the
    /// budget.
    pub restarts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Sa,
            budget: 300,
            seed: 0,
            init_temp: None,
            cooling: 0.97,
            proposal_scale: 0.1,
            restarts: 1,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        if self.budget == 0 {
            return Err(OptimizeError::ZeroBudget);
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return Err(OptimizeError::InvalidConfig(format!(
                "cooling factor {} is not in (0,1)",
                self.cooling
            )));
        }
        if !(self.proposal_scale > 0.0 && self.proposal_scale <= 1.0) {
            return Err(OptimizeError::InvalidConfig(format!(
                "proposal scale {} is not in (0,1]",
                self.proposal_scale
            )));
        }
        if let Some(t) = self.init_temp {
            if !(t > 0.0 && t.is_finite()) {
                return Err(OptimizeError::InvalidConfig(format!(
                    "initial temperature {t} must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of a search.
#[derive(Debug, Clone)]
pub struct OptResult<P> {
    pub point: Vec<f64>,
    pub cost: f64,
    pub payload: P,
    pub evaluations: usize,
    /// Best cost seen after each evaluation.
    pub history: Vec<f64>,
}

/// Per-call extras on top of [`OptimizerConfig`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchOptions {
    /// Evaluated first (clamped to the box); the chain starts from it unless
    /// a warm-up sample is better.
    pub start: Option<Vec<f64>>,
    /// Stop as soon as a cost at least this good is seen, leaving the rest
    /// of the budget unused.
    pub target: Option<f64>,
}

const WARMUP: usize = 10;

/// Runs the configured algorithm. The oracle returns a cost and a payload;
/// the payload of the best point is kept.
pub fn optimize<P, E, F, R>(
    oracle: F,
    bounds: &[(f64, f64)],
    config: &OptimizerConfig,
    goal: Goal,
    rng: &mut R,
) -> Result<OptResult<P>, E>
where
    F: FnMut(&[f64]) -> Result<(f64, P), E>,
    E: From<OptimizeError>,
    R: Rng + ?Sized,
{
    optimize_with(oracle, bounds, config, goal, rng, &SearchOptions::default())
}

pub fn optimize_with<P, E, F, R>(
    oracle: F,
    bounds: &[(f64, f64)],
    config: &OptimizerConfig,
    goal: Goal,
    rng: &mut R,
    options: &SearchOptions,
) -> Result<OptResult<P>, E>
where
    F: FnMut(&[f64]) -> Result<(f64, P), E>,
    E: From<OptimizeError>,
    R: Rng + ?Sized,
{
    match config.algorithm {
        Algorithm::Sa => annealing(oracle, bounds, config, goal, rng, options),
        Algorithm::Uniform => uniform(oracle, bounds, config, goal, rng, options),
    }
}

fn check_start(bounds: &[(f64, f64)], options: &SearchOptions) -> Result<(), OptimizeError> {
    match &options.start {
        Some(s) if s.len() != bounds.len() || s.iter().any(|v| v.is_nan()) => {
            Err(OptimizeError::InvalidConfig(format!(
                "start point has {} coordinates for a {}-dimensional box",
                s.len(),
                bounds.len()
            )))
        }
        _ => Ok(()),
    }
}

fn clamp_to(bounds: &[(f64, f64)], x: &[f64]) -> Vec<f64> {
    x.iter()
        .zip(bounds)
        .map(|(&v, &(lo, hi))| v.clamp(lo, hi))
        .collect()
}

fn check_bounds(bounds: &[(f64, f64)]) -> Result<(), OptimizeError> {
    if bounds
        .iter()
        .any(|&(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi))
    {
        return Err(OptimizeError::InvalidDomain);
    }
    Ok(())
}

fn uniform_point<R: Rng + ?Sized>(bounds: &[(f64, f64)], rng: &mut R) -> Vec<f64> {
    bounds
        .iter()
        .map(|&(lo, hi)| {
            if hi > lo {
                rng.random_range(lo..=hi)
            } else {
                lo
            }
        })
        .collect()
}

/// Tracks the best sample in the minimisation frame.
struct Best<P> {
    point: Vec<f64>,
    cost: f64,
    payload: Option<P>,
    history: Vec<f64>,
    sign: f64,
}

impl<P> Best<P> {
    fn new(goal: Goal, budget: usize) -> Self {
        Self {
            point: Vec::new(),
            cost: f64::INFINITY,
            payload: None,
            history: Vec::with_capacity(budget),
            sign: match goal {
                Goal::Minimize => 1.0,
                Goal::Maximize => -1.0,
            },
        }
    }

    fn offer(&mut self, point: &[f64], cost: f64, payload: P) {
        if self.payload.is_none() || cost < self.cost {
            self.point = point.to_vec();
            self.cost = cost;
            self.payload = Some(payload);
        }
        self.history.push(self.sign * self.cost);
    }

    fn reached(&self, target: Option<f64>) -> bool {
        target.is_some_and(|t| self.payload.is_some() && self.cost <= self.sign * t)
    }

    fn finish(self) -> OptResult<P> {
        OptResult {
            point: self.point,
            cost: self.sign * self.cost,
            evaluations: self.history.len(),
            payload: self.payload.expect("budget is at least one"),
            history: self.history,
        }
    }
}

/// Minimisation-frame cost; NaN is treated as the worst value.
fn frame(cost: f64, sign: f64) -> f64 {
    let c = sign * cost;
    if c.is_nan() {
        f64::INFINITY
    } else {
        c
    }
}

/// Metropolis search with Gaussian box-clipped proposals and geometric
/// cooling. Uses exactly `config.budget` oracle calls.
pub fn simulated_annealing<P, E, F, R>(
    oracle: F,
    bounds: &[(f64, f64)],
    config: &OptimizerConfig,
    goal: Goal,
    rng: &mut R,
) -> Result<OptResult<P>, E>
where
    F: FnMut(&[f64]) -> Result<(f64, P), E>,
    E: From<OptimizeError>,
    R: Rng + ?Sized,
{
    annealing(oracle, bounds, config, goal, rng, &SearchOptions::default())
}

fn annealing<P, E, F, R>(
    mut oracle: F,
    bounds: &[(f64, f64)],
    config: &OptimizerConfig,
    goal: Goal,
    rng: &mut R,
    options: &SearchOptions,
) -> Result<OptResult<P>, E>
where
    F: FnMut(&[f64]) -> Result<(f64, P), E>,
    E: From<OptimizeError>,
    R: Rng + ?Sized,
{
    config.validate()?;
    check_bounds(bounds)?;
    check_start(bounds, options)?;
    let budget = config.budget;
    let mut best = Best::new(goal, budget);
    let sign = best.sign;

    let warmup = WARMUP.min(budget);
    let mut current: Option<(Vec<f64>, f64)> = None;
    let mut spread = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..warmup {
        let x = match (&options.start, i) {
            (Some(s), 0) => clamp_to(bounds, s),
            _ => uniform_point(bounds, rng),
        };
        let (c, p) = oracle(&x)?;
        let c = frame(c, sign);
        if c.is_finite() {
            spread = (spread.0.min(c), spread.1.max(c));
        }
        if current.as_ref().is_none_or(|(_, cc)| c < *cc) {
            current = Some((x.clone(), c));
        }
        best.offer(&x, c, p);
        if best.reached(options.target) {
            return Ok(best.finish());
        }
    }
    let t0 = config.init_temp.unwrap_or_else(|| {
        let s = 0.1 * (spread.1 - spread.0);
        if s.is_finite() && s > 0.0 {
            s
        } else {
            1.0
        }
    });
    let (mut x, mut cx) = current.expect("warm-up evaluates at least once");
    let mut temp = t0;
    let remaining = budget - warmup;
    let segment = remaining / (config.restarts + 1);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");

    for k in 0..remaining {
        let restart = segment > 0 && k > 0 && k % segment == 0 && k / segment <= config.restarts;
        let y = if restart {
            temp = t0;
            uniform_point(bounds, rng)
        } else {
            x.iter()
                .zip(bounds)
                .map(|(&xi, &(lo, hi))| {
                    let range = hi - lo;
                    if range > 0.0 {
                        let step: f64 = std_normal.sample(rng);
                        (xi + step * config.proposal_scale * range).clamp(lo, hi)
                    } else {
                        lo
                    }
                })
                .collect()
        };
        let (c, p) = oracle(&y)?;
        let cy = frame(c, sign);
        let accept = restart || cy <= cx || rng.random::<f64>() < (-(cy - cx) / temp).exp();
        best.offer(&y, cy, p);
        if best.reached(options.target) {
            break;
        }
        if !restart {
            temp *= config.cooling;
        }
        if accept {
            x = y;
            cx = cy;
        }
    }
    Ok(best.finish())
}

/// Independent uniform samples; the baseline search.
pub fn uniform_search<P, E, F, R>(
    oracle: F,
    bounds: &[(f64, f64)],
    config: &OptimizerConfig,
    goal: Goal,
    rng: &mut R,
) -> Result<OptResult<P>, E>
where
    F: FnMut(&[f64]) -> Result<(f64, P), E>,
    E: From<OptimizeError>,
    R: Rng + ?Sized,
{
    uniform(oracle, bounds, config, goal, rng, &SearchOptions::default())
}

fn uniform<P, E, F, R>(
    mut oracle: F,
    bounds: &[(f64, f64)],
    config: &OptimizerConfig,
    goal: Goal,
    rng: &mut R,
    options: &SearchOptions,
) -> Result<OptResult<P>, E>
where
    F: FnMut(&[f64]) -> Result<(f64, P), E>,
    E: From<OptimizeError>,
    R: Rng + ?Sized,
{
    if config.budget == 0 {
        return Err(OptimizeError::ZeroBudget.into());
    }
    check_bounds(bounds)?;
    check_start(bounds, options)?;
    let mut best = Best::new(goal, config.budget);
    for i in 0..config.budget {
        let x = match (&options.start, i) {
            (Some(s), 0) => clamp_to(bounds, s),
            _ => uniform_point(bounds, rng),
        };
        let (c, p) = oracle(&x)?;
        best.offer(&x, frame(c, best.sign), p);
        if best.reached(options.target) {
            break;
        }
    }
    Ok(best.finish())
}
