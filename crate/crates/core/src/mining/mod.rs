//! Parameter mining and falsification-domain construction.
//!
//! Every search runs over the joint vector `[x₀, λ, θ]` (or `[x₀, λ, c]` for
//! ray searches) with `θ` normalised to `[0,1]^η`, so one optimizer call both
//! looks for falsifying inputs and pushes the parameters toward the boundary
//! of the falsification domain.

mod domain;
mod rgda;
mod sda;
mod sweep;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::mtl::{robustness_with, EvalError, Formula, Semantics, TimedStateSequence};
use crate::optimize::{
    cost_max, cost_min, gamma_max, gamma_min, optimize_with, Goal, OptimizeError, OptimizerConfig,
    Priority, Ray, SearchOptions,
};
use crate::pmtl::{instantiate, monotonicity, Direction, ParamSpace, PmtlError};
use crate::sysmodel::{SearchSpace, SimError, SystemModel};

pub use domain::{generate_markers, Anchor, FalsificationDomain, Witness};
pub use rgda::{rgda, RgdaOutcome};
pub use sda::{sda, SdaConfig, SdaOutcome, Termination};
pub use sweep::{sweep, SweepRow, SweepSpec};

#[derive(Debug, Error)]
pub enum MiningError {
    #[error("robustness is not monotone in the parameters; supply an assumed direction")]
    UnknownMonotonicity,
    #[error("formula references parameter #{index} but only {dim} are declared")]
    UndeclaredParameter { index: usize, dim: usize },
    #[error("{what}: expected {expected} values, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("anchor robustness {0} is not a falsification")]
    NotFalsifying(f64),
    #[error("grid of {points} points exceeds the cap of {max}")]
    GridTooLarge { points: usize, max: usize },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("invalid structured-search settings: {0}")]
    InvalidSda(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Pmtl(#[from] PmtlError),
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
}

/// Everything fixed across one mining run.
#[derive(Clone, Copy)]
pub struct Problem<'a> {
    pub system: &'a dyn SystemModel,
    pub formula: &'a Formula,
    pub space: &'a ParamSpace,
    pub search: &'a SearchSpace,
    pub direction: Direction,
    pub semantics: Semantics,
}

impl<'a> Problem<'a> {
    /// Uses the syntactic monotonicity of `formula`, or `assumed` when
    /// given. Fails when neither yields a direction.
    pub fn new(
        system: &'a dyn SystemModel,
        formula: &'a Formula,
        space: &'a ParamSpace,
        search: &'a SearchSpace,
        assumed: Option<Direction>,
    ) -> Result<Self, MiningError> {
        if let Some(&index) = formula.params().iter().find(|&&p| p >= space.dim()) {
            return Err(MiningError::UndeclaredParameter {
                index,
                dim: space.dim(),
            });
        }
        let direction = assumed.unwrap_or_else(|| monotonicity(formula, space.dim()).overall);
        if direction == Direction::Unknown {
            return Err(MiningError::UnknownMonotonicity);
        }
        Ok(Self {
            system,
            formula,
            space,
            search,
            direction,
            semantics: Semantics::default(),
        })
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Simulates `(x0, lambda)` and evaluates the formula instantiated at the
    /// normalised parameter vector.
    pub fn evaluate(
        &self,
        x0: &[f64],
        lambda: &[f64],
        theta_norm: &[f64],
    ) -> Result<(f64, TimedStateSequence), MiningError> {
        let trace = self.system.simulate(x0, lambda)?;
        let theta_raw = self.space.denormalize(theta_norm)?;
        let rob = self.robustness_on(&trace, &theta_raw)?;
        Ok((rob, trace))
    }

    /// Robustness of the formula at raw parameters `theta_raw` on `trace`.
    pub fn robustness_on(
        &self,
        trace: &TimedStateSequence,
        theta_raw: &[f64],
    ) -> Result<f64, MiningError> {
        let ground = instantiate(self.formula, theta_raw)?;
        Ok(robustness_with(&ground, trace, 0, &self.semantics)?)
    }

    /// Re-simulates an anchor's witness and returns the robustness of the
    /// formula at the anchor.
    pub fn replay(&self, anchor: &Anchor) -> Result<f64, MiningError> {
        let (rob, _) = self.evaluate(
            &anchor.witness.x0,
            &anchor.witness.lambda,
            &anchor.theta_norm,
        )?;
        Ok(rob)
    }

    fn goal(&self) -> Goal {
        match self.direction {
            Direction::Decreasing => Goal::Minimize,
            _ => Goal::Maximize,
        }
    }
}

/// One simulation performed during a search.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRecord {
    pub iteration: usize,
    pub x0: Vec<f64>,
    pub lambda: Vec<f64>,
    pub theta_raw: Vec<f64>,
    pub robustness: f64,
    pub cost: f64,
}

/// Best sample of a single search.
#[derive(Debug, Clone)]
pub struct MineResult {
    pub theta_norm: Vec<f64>,
    pub theta_raw: Vec<f64>,
    /// Robustness at the best sample; `≤ 0` means a falsification was found.
    pub robustness: f64,
    pub cost: f64,
    pub x0: Vec<f64>,
    pub lambda: Vec<f64>,
    pub trace: TimedStateSequence,
    pub records: Vec<SimRecord>,
}

impl MineResult {
    pub fn falsified(&self) -> bool {
        self.robustness <= 0.0
    }

    pub fn anchor(&self, seed: u64, iteration: usize) -> Anchor {
        Anchor {
            theta_norm: self.theta_norm.clone(),
            theta_raw: self.theta_raw.clone(),
            witness: Witness {
                x0: self.x0.clone(),
                lambda: self.lambda.clone(),
                robustness: self.robustness,
                seed,
                iteration,
            },
        }
    }
}

/// Searches the joint space with the penalty cost for `priority`: minimises
/// for decreasing specifications and maximises for increasing ones.
pub fn mine(
    problem: &Problem<'_>,
    priority: &Priority,
    config: &OptimizerConfig,
) -> Result<MineResult, MiningError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    mine_with_rng(problem, priority, config, &mut rng, 0)
}

pub(crate) fn mine_with_rng(
    problem: &Problem<'_>,
    priority: &Priority,
    config: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
    iteration: usize,
) -> Result<MineResult, MiningError> {
    let eta = problem.dim();
    priority.check(eta)?;
    let decreasing = problem.direction == Direction::Decreasing;
    let gamma = if decreasing {
        gamma_min(priority, eta)
    } else {
        gamma_max(priority, eta)
    };
    let tail = vec![(0.0, 1.0); eta];
    let permissive = vec![if decreasing { 1.0 } else { 0.0 }; eta];
    joint_search(
        problem,
        tail,
        permissive,
        problem.goal(),
        config,
        rng,
        iteration,
        |t| t.to_vec(),
        |_, theta, rob| {
            let f = priority.eval(theta);
            if decreasing {
                cost_min(f, rob, gamma)
            } else {
                cost_max(f, rob, gamma)
            }
        },
    )
}

/// Ray search: maximises `c` on `[c_lo, c_hi]` subject to falsification.
pub(crate) fn mine_ray(
    problem: &Problem<'_>,
    ray: &Ray,
    c_range: (f64, f64),
    config: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
    iteration: usize,
) -> Result<MineResult, MiningError> {
    joint_search(
        problem,
        vec![c_range],
        vec![c_range.0],
        Goal::Maximize,
        config,
        rng,
        iteration,
        |t| ray.point(t[0]),
        |t, _, rob| {
            ray.cost(t[0], rob)
                .expect("search bounds lie within the ray's range")
        },
    )
}

type Payload = (Vec<f64>, Vec<f64>, Vec<f64>, f64, TimedStateSequence);

/// Two stages share the budget. When the system has inputs to search, up to
/// half of it is first spent looking for a falsifying input with the tail
/// pinned at `permissive`, the point where falsification is easiest. The
/// joint search over the full box then starts from the best input found.
/// Without this the priority term drags the tail toward parameters that are
/// hard to falsify before any falsifying input has been seen.
#[allow(clippy::too_many_arguments)]
fn joint_search(
    problem: &Problem<'_>,
    tail: Vec<(f64, f64)>,
    permissive: Vec<f64>,
    goal: Goal,
    config: &OptimizerConfig,
    rng: &mut ChaCha8Rng,
    iteration: usize,
    to_theta: impl Fn(&[f64]) -> Vec<f64>,
    score: impl Fn(&[f64], &[f64], f64) -> f64,
) -> Result<MineResult, MiningError> {
    let search = problem.search;
    let head = search.dim();
    let mut records = Vec::with_capacity(config.budget);
    let mut eval = |point: &[f64]| -> Result<(f64, Payload), MiningError> {
        let (x0, lambda) = search.split(&point[..head]);
        let t = &point[head..];
        let theta_norm = to_theta(t);
        let (rob, trace) = problem.evaluate(x0, lambda, &theta_norm)?;
        let cost = score(t, &theta_norm, rob);
        let theta_raw = problem.space.denormalize(&theta_norm)?;
        records.push(SimRecord {
            iteration,
            x0: x0.to_vec(),
            lambda: lambda.to_vec(),
            theta_raw,
            robustness: rob,
            cost,
        });
        Ok((cost, (x0.to_vec(), lambda.to_vec(), theta_norm, rob, trace)))
    };

    let mut bounds = search.bounds();
    let mut options = SearchOptions::default();
    let mut budget = config.budget;
    if head > 0 && budget >= 2 {
        let mut pinned = bounds.clone();
        pinned.extend(permissive.iter().map(|&v| (v, v)));
        let stage = OptimizerConfig {
            budget: budget / 2,
            ..config.clone()
        };
        let falsify = SearchOptions {
            start: None,
            target: Some(0.0),
        };
        let found = optimize_with(
            |point: &[f64]| eval(point).map(|(_, p)| (p.3, p)),
            &pinned,
            &stage,
            Goal::Minimize,
            rng,
            &falsify,
        )?;
        budget -= found.evaluations;
        options.start = Some(found.point);
    }
    bounds.extend(tail);
    let res = optimize_with(
        &mut eval,
        &bounds,
        &OptimizerConfig {
            budget,
            ..config.clone()
        },
        goal,
        rng,
        &options,
    )?;
    let (x0, lambda, theta_norm, robustness, trace) = res.payload;
    Ok(MineResult {
        theta_raw: problem.space.denormalize(&theta_norm)?,
        theta_norm,
        robustness,
        cost: res.cost,
        x0,
        lambda,
        trace,
        records,
    })
}
