//! Randomised exploration of the falsification domain: each iteration mines
//! with a random weighted-sum priority and adds the orthant at the result.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{mine_with_rng, FalsificationDomain, MineResult, MiningError, Problem};
use crate::optimize::{OptimizerConfig, Priority};

#[derive(Debug, Clone)]
pub struct RgdaOutcome {
    pub domain: FalsificationDomain,
    /// Weight vector and search result of every iteration, in order.
    pub runs: Vec<(Vec<f64>, MineResult)>,
}

/// Runs `iterations` independent searches of `config.budget` simulations.
///
/// Iteration `k` draws its weights and its search randomness from stream
/// `k` of the seeded generator, so results do not depend on how iterations
/// are scheduled across threads. Anchors are inserted in iteration order.
pub fn rgda(
    problem: &Problem<'_>,
    iterations: usize,
    config: &OptimizerConfig,
) -> Result<RgdaOutcome, MiningError> {
    let eta = problem.dim();
    let runs = (0..iterations)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(k as u64);
            let weights: Vec<f64> = (0..eta).map(|_| rng.random::<f64>()).collect();
            let priority = Priority::WeightedSum {
                weights: weights.clone(),
            };
            let res = mine_with_rng(problem, &priority, config, &mut rng, k)?;
            Ok((weights, res))
        })
        .collect::<Result<Vec<_>, MiningError>>()?;

    let mut domain = FalsificationDomain::new(problem.direction, eta)?;
    for (k, (_, res)) in runs.iter().enumerate() {
        if res.falsified() {
            domain.insert(res.anchor(config.seed, k))?;
        }
    }
    Ok(RgdaOutcome { domain, runs })
}
