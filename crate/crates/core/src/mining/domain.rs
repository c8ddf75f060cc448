//! The falsification domain `Ψ`: a union of orthants in normalised
//! parameter space, each anchored at a point with a falsifying witness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::MiningError;
use crate::pmtl::{precedes, Direction};

/// Inputs that drove the system to a falsifying trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub x0: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Robustness of the anchor's instantiated formula on the witness trace.
    pub robustness: f64,
    pub seed: u64,
    pub iteration: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Anchor {
    pub theta_norm: Vec<f64>,
    pub theta_raw: Vec<f64>,
    pub witness: Witness,
}

/// For an increasing specification every anchor `a` contributes
/// `{θ : 0 ⪯ θ ⪯ a}`; for a decreasing one `{θ : a ⪯ θ ⪯ 1}`. Anchors are
/// kept as an antichain.
#[derive(Debug, Clone, PartialEq)]
pub struct FalsificationDomain {
    direction: Direction,
    dim: usize,
    anchors: Vec<Anchor>,
}

impl FalsificationDomain {
    pub fn new(direction: Direction, dim: usize) -> Result<Self, MiningError> {
        if direction == Direction::Unknown {
            return Err(MiningError::UnknownMonotonicity);
        }
        Ok(Self {
            direction,
            dim,
            anchors: Vec::new(),
        })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    /// Adds an anchor. Returns `false` when it is already covered; otherwise
    /// removes the anchors it covers and returns `true`.
    pub fn insert(&mut self, anchor: Anchor) -> Result<bool, MiningError> {
        if anchor.theta_norm.len() != self.dim {
            return Err(MiningError::DimensionMismatch {
                what: "anchor",
                expected: self.dim,
                got: anchor.theta_norm.len(),
            });
        }
        let r = anchor.witness.robustness;
        if r.is_nan() || r > 0.0 {
            return Err(MiningError::NotFalsifying(r));
        }
        if self.contains(&anchor.theta_norm) {
            return Ok(false);
        }
        let direction = self.direction;
        let theta = anchor.theta_norm.clone();
        self.anchors
            .retain(|a| !covers(direction, &theta, &a.theta_norm));
        self.anchors.push(anchor);
        Ok(true)
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        self.anchors
            .iter()
            .any(|a| covers(self.direction, &a.theta_norm, theta))
    }

    /// Monte Carlo estimate of `|Ψ| / |Θ|` from `samples` uniform points
    /// drawn with `seed`. A fixed seed makes the estimate monotone as anchors
    /// are added.
    pub fn volume(&self, samples: usize, seed: u64) -> f64 {
        if samples == 0 || self.anchors.is_empty() {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut point = vec![0.0; self.dim];
        let mut hits = 0usize;
        for _ in 0..samples {
            for p in point.iter_mut() {
                *p = rng.random::<f64>();
            }
            if self.contains(&point) {
                hits += 1;
            }
        }
        hits as f64 / samples as f64
    }
}

/// Whether the orthant anchored at `anchor` contains `theta`.
fn covers(direction: Direction, anchor: &[f64], theta: &[f64]) -> bool {
    match direction {
        Direction::Decreasing => precedes(anchor, theta),
        _ => precedes(theta, anchor),
    }
}

/// Coordinate mixtures of `theta_star` and `origin`: every vector taking
/// each coordinate from one of the two, except the two vectors themselves.
/// Duplicates (within 1e-9) are removed; at most `2^η − 2` remain.
pub fn generate_markers(theta_star: &[f64], origin: &[f64]) -> Vec<Vec<f64>> {
    let eta = theta_star.len();
    assert_eq!(eta, origin.len(), "marker and origin dimensions differ");
    assert!(
        eta < usize::BITS as usize,
        "too many parameters for marker generation"
    );
    let mut out: Vec<Vec<f64>> = Vec::new();
    for mask in 1..(1usize << eta) - 1 {
        let v: Vec<f64> = (0..eta)
            .map(|k| {
                if mask >> k & 1 == 1 {
                    theta_star[k]
                } else {
                    origin[k]
                }
            })
            .collect();
        if close(&v, theta_star) || close(&v, origin) || out.iter().any(|o| close(o, &v)) {
            continue;
        }
        out.push(v);
    }
    out
}

pub(crate) fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9)
}
