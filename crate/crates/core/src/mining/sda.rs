//! Structured exploration of the falsification domain by ray searches.
//!
//! Starting from the corner of `[0,1]^η` where the domain begins (the zero
//! vector for increasing specifications, the ones vector for decreasing
//! ones), each position `p` is pushed along the bias direction as far as
//! falsification allows. The point reached becomes a marker, is added to
//! `Ψ`, and its coordinate mixtures with `p` become the positions of the next
//! wave.
//!
//! The part of each ray already inside `Ψ` is excluded from the search
//! interval, so no simulation is spent on parameters known to falsify.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::domain::close;
use super::{generate_markers, mine_ray, FalsificationDomain, MineResult, MiningError, Problem};
use crate::optimize::{OptimizerConfig, Ray};
use crate::pmtl::Direction;

#[derive(Debug, Clone, PartialEq)]
pub struct SdaConfig {
    /// Direction of every ray; rescaled so its largest entry is 1.
    pub bias: Vec<f64>,
    /// Stop when a wave's new markers all lie within this distance of
    /// earlier markers.
    pub epsilon: f64,
    /// Cap on the number of ray searches.
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// No positions left to explore.
    Exhausted,
    /// Markers moved less than `epsilon`.
    Converged,
    /// `max_iterations` ray searches were run.
    IterationCap,
}

#[derive(Debug, Clone)]
pub struct SdaOutcome {
    pub domain: FalsificationDomain,
    /// Normalised markers added to `Ψ`, in discovery order.
    pub markers: Vec<Vec<f64>>,
    /// Start position and search result of every ray search, in order.
    pub runs: Vec<(Vec<f64>, MineResult)>,
    pub waves: usize,
    pub termination: Termination,
}

/// Largest `c` such that the ray up to `c` lies in `Ψ` (0 if the origin of
/// the ray is outside `Ψ`).
fn entry_point(domain: &FalsificationDomain, ray: &Ray) -> f64 {
    let descending = ray.descending();
    let mut best = 0.0f64;
    for a in domain.anchors() {
        let mut c = f64::INFINITY;
        let mut inside = true;
        for ((&p, &b), &ak) in ray.origin().iter().zip(ray.direction()).zip(&a.theta_norm) {
            let room = if descending { p - ak } else { ak - p };
            if room < 0.0 {
                inside = false;
                break;
            }
            if b > 0.0 {
                c = c.min(room / b);
            }
        }
        if inside {
            best = best.max(c);
        }
    }
    best
}

pub fn sda(
    problem: &Problem<'_>,
    settings: &SdaConfig,
    config: &OptimizerConfig,
) -> Result<SdaOutcome, MiningError> {
    let eta = problem.dim();
    if settings.epsilon.is_nan() || settings.epsilon < 0.0 {
        return Err(MiningError::InvalidSda(format!(
            "epsilon {} must be non-negative",
            settings.epsilon
        )));
    }
    if eta >= 24 {
        return Err(MiningError::InvalidSda(format!(
            "{eta} parameters give too many marker mixtures"
        )));
    }
    let descending = problem.direction == Direction::Decreasing;
    let start = vec![if descending { 1.0 } else { 0.0 }; eta];
    Ray::new(start.clone(), &settings.bias, descending)?;

    let mut domain = FalsificationDomain::new(problem.direction, eta)?;
    let mut markers: Vec<Vec<f64>> = Vec::new();
    let mut runs = Vec::new();
    let mut visited: Vec<Vec<f64>> = Vec::new();
    let mut pending = vec![start.clone()];
    let mut waves = 0;
    let mut iteration = 0usize;

    let termination = loop {
        if pending.is_empty() {
            break Termination::Exhausted;
        }
        if iteration >= settings.max_iterations {
            break Termination::IterationCap;
        }
        waves += 1;
        let wave = std::mem::take(&mut pending);
        let mut jobs = Vec::new();
        let mut capped = false;
        for p in wave {
            if visited.iter().any(|v| close(v, &p)) {
                continue;
            }
            visited.push(p.clone());
            let ray = Ray::new(p.clone(), &settings.bias, descending)?;
            let c_max = ray.c_max();
            let c_enter = entry_point(&domain, &ray);
            if c_enter >= c_max {
                continue;
            }
            if iteration + jobs.len() >= settings.max_iterations {
                capped = true;
                break;
            }
            jobs.push((iteration + jobs.len(), p, ray, (c_enter, c_max)));
        }
        iteration += jobs.len();

        let results = jobs
            .par_iter()
            .map(|(k, _, ray, range)| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(*k as u64);
                mine_ray(problem, ray, *range, config, &mut rng, *k)
            })
            .collect::<Result<Vec<_>, MiningError>>()?;

        let mut new_markers = Vec::new();
        for ((k, p, _, _), res) in jobs.into_iter().zip(results) {
            if res.falsified() && domain.insert(res.anchor(config.seed, k))? {
                for m in generate_markers(&res.theta_norm, &p) {
                    if !pending.iter().any(|q| close(q, &m)) {
                        pending.push(m);
                    }
                }
                new_markers.push(res.theta_norm.clone());
            }
            runs.push((p, res));
        }

        if !new_markers.is_empty() {
            let moved = new_markers
                .iter()
                .map(|m| {
                    let refs: Vec<&Vec<f64>> = if markers.is_empty() {
                        vec![&start]
                    } else {
                        markers.iter().collect()
                    };
                    refs.iter()
                        .map(|q| distance(m, q))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max);
            markers.extend(new_markers);
            if moved < settings.epsilon {
                break Termination::Converged;
            }
        }
        if capped {
            break Termination::IterationCap;
        }
    };

    Ok(SdaOutcome {
        domain,
        markers,
        runs,
        waves,
        termination,
    })
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
