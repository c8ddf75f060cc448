//! Parametric MTL: parameter spaces, instantiation and syntactic
//! monotonicity.

use thiserror::Error;

use crate::mtl::{Cmp, Formula, GroundInterval, Interval, IntervalError, Predicate, Term};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PmtlError {
    #[error("parameter space needs at least one parameter")]
    NoParameters,
    #[error("parameter `{name}` has lower bound {lower} above upper bound {upper}")]
    InvertedBounds {
        name: String,
        lower: f64,
        upper: f64,
    },
    #[error("parameter `{0}` has a non-finite bound")]
    NonFiniteBound(String),
    #[error("expected {expected} parameter values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parameter #{0} is referenced but not bound")]
    MissingParameter(usize),
    #[error("instantiation gives a degenerate interval: {0}")]
    DegenerateInterval(IntervalError),
    #[error("instantiation gives an inverted box on `{channel}`: [{lower}, {upper}]")]
    InvertedBox {
        channel: String,
        lower: f64,
        upper: f64,
    },
}

/// The hypercube `Θ = [θ_min, θ_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    names: Vec<String>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl ParamSpace {
    pub fn new(names: Vec<String>, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, PmtlError> {
        if names.is_empty() {
            return Err(PmtlError::NoParameters);
        }
        for v in [&lower, &upper] {
            if v.len() != names.len() {
                return Err(PmtlError::DimensionMismatch {
                    expected: names.len(),
                    got: v.len(),
                });
            }
        }
        for (k, name) in names.iter().enumerate() {
            if !lower[k].is_finite() || !upper[k].is_finite() {
                return Err(PmtlError::NonFiniteBound(name.clone()));
            }
            if lower[k] > upper[k] {
                return Err(PmtlError::InvertedBounds {
                    name: name.clone(),
                    lower: lower[k],
                    upper: upper[k],
                });
            }
        }
        Ok(Self {
            names,
            lower,
            upper,
        })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn check(&self, v: &[f64]) -> Result<(), PmtlError> {
        if v.len() != self.dim() {
            return Err(PmtlError::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    /// Affine map of `theta` into `[0,1]^η`. Degenerate coordinates map to 0.
    pub fn normalize(&self, theta: &[f64]) -> Result<Vec<f64>, PmtlError> {
        self.check(theta)?;
        Ok(theta
            .iter()
            .enumerate()
            .map(|(k, &t)| {
                let span = self.upper[k] - self.lower[k];
                if span > 0.0 {
                    (t - self.lower[k]) / span
                } else {
                    0.0
                }
            })
            .collect())
    }

    pub fn denormalize(&self, unit: &[f64]) -> Result<Vec<f64>, PmtlError> {
        self.check(unit)?;
        Ok(unit
            .iter()
            .enumerate()
            .map(|(k, &u)| self.lower[k] + u * (self.upper[k] - self.lower[k]))
            .collect())
    }
}

/// The componentwise order `a ⪯ b`.
pub fn precedes(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x <= y)
}

/// Replaces every parameter reference with its value from `theta` and checks
/// the resulting intervals and boxes.
pub fn instantiate(phi: &Formula, theta: &[f64]) -> Result<Formula, PmtlError> {
    let ground = phi.try_map_terms(&mut |t| match t {
        Term::Const(_) => Ok(t),
        Term::Param(p) => theta
            .get(p)
            .map(|&v| Term::Const(v))
            .ok_or(PmtlError::MissingParameter(p)),
    })?;
    validate(&ground)?;
    Ok(ground)
}

fn validate(phi: &Formula) -> Result<(), PmtlError> {
    match phi {
        Formula::Until(iv, a, b) | Formula::Release(iv, a, b) => {
            check_interval(iv)?;
            validate(a)?;
            validate(b)
        }
        Formula::Atom(Predicate::Box { dims }) | Formula::NegAtom(Predicate::Box { dims }) => {
            for d in dims {
                if let (Term::Const(lower), Term::Const(upper)) = (d.lower, d.upper) {
                    if lower.is_nan() || upper.is_nan() || lower > upper {
                        return Err(PmtlError::InvertedBox {
                            channel: d.channel.clone(),
                            lower,
                            upper,
                        });
                    }
                }
            }
            Ok(())
        }
        _ => phi.children().into_iter().try_for_each(validate),
    }
}

fn check_interval(iv: &Interval) -> Result<(), PmtlError> {
    if let (Term::Const(lower), Term::Const(upper)) = (iv.lower, iv.upper) {
        GroundInterval {
            lower,
            upper,
            lower_closed: iv.lower_closed,
            upper_closed: iv.upper_closed && upper != f64::INFINITY,
        }
        .validate(true)
        .map_err(PmtlError::DegenerateInterval)?;
    }
    Ok(())
}

/// Direction in which robustness moves as a parameter grows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// Robustness is non-decreasing in the parameter.
    Increasing,
    /// Robustness is non-increasing in the parameter.
    Decreasing,
    /// Not classified.
    Unknown,
}

impl Direction {
    pub fn sign(self) -> i8 {
        match self {
            Direction::Increasing => 1,
            Direction::Decreasing => -1,
            Direction::Unknown => 0,
        }
    }

    pub fn from_sign(sign: i8) -> Self {
        match sign.signum() {
            1 => Direction::Increasing,
            -1 => Direction::Decreasing,
            _ => Direction::Unknown,
        }
    }

    fn flip(self) -> Self {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
            Direction::Unknown => Direction::Unknown,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monotonicity {
    pub per_param: Vec<Direction>,
    pub overall: Direction,
}

impl Monotonicity {
    /// A user-asserted direction shared by all `n_params` parameters.
    pub fn assumed(direction: Direction, n_params: usize) -> Self {
        Self {
            per_param: vec![direction; n_params],
            overall: direction,
        }
    }
}

/// Classifies each parameter by scanning its occurrences.
///
/// An occurrence is increasing when it is the upper endpoint of an `U`
/// interval, the lower endpoint of an `R` interval, the threshold of a
/// `≤` atom or the upper bound of a box; the opposite slots are decreasing,
/// and a negated atom flips its direction. Mixed occurrences, and
/// parameters that never occur, are `Unknown`. The overall direction is
/// defined only when every occurring parameter agrees.
pub fn monotonicity(phi: &Formula, n_params: usize) -> Monotonicity {
    let mut seen: Vec<Option<Direction>> = vec![None; n_params];
    let mut record = |t: Term, d: Direction| {
        if let Term::Param(p) = t {
            if p >= seen.len() {
                seen.resize(p + 1, None);
            }
            seen[p] = Some(match seen[p] {
                None => d,
                Some(prev) if prev == d => d,
                Some(_) => Direction::Unknown,
            });
        }
    };
    scan(phi, &mut record);
    let per_param: Vec<Direction> = seen
        .iter()
        .map(|s| s.unwrap_or(Direction::Unknown))
        .collect();
    let occurring: Vec<Direction> = seen.iter().flatten().copied().collect();
    let overall = match occurring.first() {
        Some(&d) if d != Direction::Unknown && occurring.iter().all(|&o| o == d) => d,
        _ => Direction::Unknown,
    };
    Monotonicity { per_param, overall }
}

fn scan(phi: &Formula, record: &mut impl FnMut(Term, Direction)) {
    use Direction::{Decreasing, Increasing};
    match phi {
        Formula::Atom(p) => atom(p, false, record),
        Formula::NegAtom(p) => atom(p, true, record),
        Formula::Until(iv, a, b) => {
            record(iv.upper, Increasing);
            record(iv.lower, Decreasing);
            scan(a, record);
            scan(b, record);
        }
        Formula::Release(iv, a, b) => {
            record(iv.upper, Decreasing);
            record(iv.lower, Increasing);
            scan(a, record);
            scan(b, record);
        }
        _ => {
            for c in phi.children() {
                scan(c, record);
            }
        }
    }
}

fn atom(p: &Predicate, negated: bool, record: &mut impl FnMut(Term, Direction)) {
    let orient = |d: Direction| if negated { d.flip() } else { d };
    match p {
        Predicate::Linear { cmp, threshold, .. } => {
            let d = match cmp {
                Cmp::Le => Direction::Increasing,
                Cmp::Ge => Direction::Decreasing,
            };
            record(*threshold, orient(d));
        }
        Predicate::Box { dims } => {
            for d in dims {
                record(d.upper, orient(Direction::Increasing));
                record(d.lower, orient(Direction::Decreasing));
            }
        }
        Predicate::Prop { .. } => {}
    }
}
