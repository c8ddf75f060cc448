//! Full-factorial robustness evaluation over a parameter grid, used as a
//! brute-force reference for the mining algorithms.

use rayon::prelude::*;

use super::MiningError;
use crate::mtl::{robustness_with, Formula, Semantics};
use crate::pmtl::{instantiate, ParamSpace};
use crate::sysmodel::{SearchSpace, SystemModel};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Grid points per parameter, spanning its full range.
    pub theta_counts: Vec<usize>,
    /// Grid points per `[x₀, λ]` coordinate. When absent a single input
    /// point is used.
    pub input_counts: Option<Vec<usize>>,
    /// Initial condition for the single-point case; defaults to the centre
    /// of the initial box.
    pub x0: Option<Vec<f64>>,
    /// Input parameters for the single-point case; defaults to the centre of
    /// their ranges.
    pub lambda: Option<Vec<f64>>,
    pub max_points: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            theta_counts: Vec::new(),
            input_counts: None,
            x0: None,
            lambda: None,
            max_points: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta: Vec<f64>,
    pub x0: Vec<f64>,
    pub lambda: Vec<f64>,
    pub robustness: f64,
}

/// `count` evenly spaced points from `lo` to `hi` inclusive; a single point
/// sits at `lo`.
fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

/// Cartesian product, first axis varying slowest.
fn product(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

fn checked_size(counts: &[usize]) -> Option<usize> {
    counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c))
}

/// Evaluates the formula at every grid point. Each input point is simulated
/// once and every parameter vector is evaluated on that trace. Rows are
/// ordered by input point, then parameter vector.
pub fn sweep(
    system: &dyn SystemModel,
    formula: &Formula,
    space: &ParamSpace,
    search: &SearchSpace,
    spec: &SweepSpec,
    semantics: &Semantics,
) -> Result<Vec<SweepRow>, MiningError> {
    if spec.theta_counts.len() != space.dim() {
        return Err(MiningError::DimensionMismatch {
            what: "parameter grid counts",
            expected: space.dim(),
            got: spec.theta_counts.len(),
        });
    }
    if spec.theta_counts.contains(&0) {
        return Err(MiningError::InvalidSweep(
            "grid counts must be positive".into(),
        ));
    }
    let bounds = search.bounds();
    let inputs: Vec<Vec<f64>> = match &spec.input_counts {
        Some(counts) => {
            if counts.len() != bounds.len() {
                return Err(MiningError::DimensionMismatch {
                    what: "input grid counts",
                    expected: bounds.len(),
                    got: counts.len(),
                });
            }
            if counts.contains(&0) {
                return Err(MiningError::InvalidSweep(
                    "grid counts must be positive".into(),
                ));
            }
            let size = checked_size(counts).unwrap_or(usize::MAX);
            if size > spec.max_points {
                return Err(MiningError::GridTooLarge {
                    points: size,
                    max: spec.max_points,
                });
            }
            let axes: Vec<Vec<f64>> = bounds
                .iter()
                .zip(counts)
                .map(|(&(lo, hi), &n)| linspace(lo, hi, n))
                .collect();
            product(&axes)
        }
        None => {
            let centre = |b: &[(f64, f64)]| b.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
            let x0: Vec<f64> = spec.x0.clone().unwrap_or_else(|| centre(&search.initial));
            let lambda: Vec<f64> = spec
                .lambda
                .clone()
                .unwrap_or_else(|| centre(&search.inputs.bounds()));
            let mut p = x0;
            p.extend(lambda);
            vec![p]
        }
    };
    let theta_size = checked_size(&spec.theta_counts).unwrap_or(usize::MAX);
    let total = theta_size.saturating_mul(inputs.len());
    if total > spec.max_points {
        return Err(MiningError::GridTooLarge {
            points: total,
            max: spec.max_points,
        });
    }
    let axes: Vec<Vec<f64>> = space
        .lower()
        .iter()
        .zip(space.upper())
        .zip(&spec.theta_counts)
        .map(|((&lo, &hi), &n)| linspace(lo, hi, n))
        .collect();
    let thetas = product(&axes);
    let grounds = thetas
        .iter()
        .map(|t| instantiate(formula, t))
        .collect::<Result<Vec<_>, _>>()?;

    let x0_dim = search.x0_dim();
    let traces = inputs
        .par_iter()
        .map(|p| system.simulate(&p[..x0_dim], &p[x0_dim..]))
        .collect::<Result<Vec<_>, _>>()?;

    let rows = (0..inputs.len() * thetas.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / thetas.len(), k % thetas.len());
            let robustness = robustness_with(&grounds[j], &traces[i], 0, semantics)?;
            Ok(SweepRow {
                theta: thetas[j].clone(),
                x0: inputs[i][..x0_dim].to_vec(),
                lambda: inputs[i][x0_dim..].to_vec(),
                robustness,
            })
        })
        .collect::<Result<Vec<_>, MiningError>>()?;
    Ok(rows)
}
