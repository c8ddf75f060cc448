//! Bottom-up robustness evaluation.
//!
//! Every subformula is evaluated once over all sample indices. Unbounded and
//! bounded `<>`/`[]` use a sliding-window extremum; general `U`/`R` scan the
//! preimage window with a running inner extremum, so the worst case is
//! quadratic in the trace length per operator.

use std::collections::VecDeque;

use thiserror::Error;

use super::formula::{Cmp, Formula, GroundInterval, Interval, IntervalError, Predicate, Term};
use super::trace::{preimage, TimedStateSequence};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("sample index {index} out of range for a trace of {len} samples")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("parameter #{0} is not instantiated")]
    UnresolvedParameter(usize),
    #[error("trace has no channel `{0}`")]
    UnknownChannel(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(#[from] IntervalError),
    #[error("box bounds on `{channel}` are inverted: [{lower}, {upper}]")]
    InvalidBox {
        channel: String,
        lower: f64,
        upper: f64,
    },
    #[error("linear predicate on `{0}` has a zero or non-finite coefficient")]
    InvalidCoefficient(String),
}

/// Evaluation settings that the logic itself leaves open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Semantics {
    /// Magnitude returned by a boolean proposition: `+m` when the 0/1
    /// channel is true (above 0.5), `-m` otherwise.
    pub bool_magnitude: f64,
}

impl Default for Semantics {
    fn default() -> Self {
        Self {
            bool_magnitude: 1.0,
        }
    }
}

/// A ground predicate with channel names resolved to trace columns.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundPredicate {
    Linear {
        channel: usize,
        coeff: f64,
        cmp: Cmp,
        threshold: f64,
    },
    Box {
        dims: Vec<(usize, f64, f64)>,
    },
    Prop {
        channel: usize,
    },
}

fn ground(t: Term) -> Result<f64, EvalError> {
    match t {
        Term::Const(v) => Ok(v),
        Term::Param(p) => Err(EvalError::UnresolvedParameter(p)),
    }
}

fn lookup(channels: &[String], name: &str) -> Result<usize, EvalError> {
    channels
        .iter()
        .position(|c| c == name)
        .ok_or_else(|| EvalError::UnknownChannel(name.to_string()))
}

impl Predicate {
    /// Resolves channels against `channels` and checks the predicate is
    /// ground and well formed.
    pub fn bind(&self, channels: &[String]) -> Result<BoundPredicate, EvalError> {
        match self {
            Predicate::Linear {
                channel,
                coeff,
                cmp,
                threshold,
            } => {
                if *coeff == 0.0 || !coeff.is_finite() {
                    return Err(EvalError::InvalidCoefficient(channel.clone()));
                }
                Ok(BoundPredicate::Linear {
                    channel: lookup(channels, channel)?,
                    coeff: *coeff,
                    cmp: *cmp,
                    threshold: ground(*threshold)?,
                })
            }
            Predicate::Box { dims } => {
                let mut out = Vec::with_capacity(dims.len());
                for d in dims {
                    let lower = ground(d.lower)?;
                    let upper = ground(d.upper)?;
                    if lower.is_nan() || upper.is_nan() || lower > upper {
                        return Err(EvalError::InvalidBox {
                            channel: d.channel.clone(),
                            lower,
                            upper,
                        });
                    }
                    out.push((lookup(channels, &d.channel)?, lower, upper));
                }
                Ok(BoundPredicate::Box { dims: out })
            }
            Predicate::Prop { channel } => Ok(BoundPredicate::Prop {
                channel: lookup(channels, channel)?,
            }),
        }
    }
}

impl BoundPredicate {
    /// Signed distance from the output vector `x` to the predicate's set:
    /// depth when inside, minus the Euclidean distance when outside.
    pub fn signed_distance(&self, x: &[f64], sem: &Semantics) -> f64 {
        self.distance_with(|c| x[c], sem)
    }

    pub(crate) fn distance_with(&self, value: impl Fn(usize) -> f64, sem: &Semantics) -> f64 {
        match *self {
            BoundPredicate::Linear {
                channel,
                coeff,
                cmp,
                threshold,
            } => {
                let v = value(channel);
                let d = (threshold - coeff * v) / coeff.abs();
                match cmp {
                    Cmp::Le => d,
                    Cmp::Ge => -d,
                }
            }
            BoundPredicate::Box { ref dims } => {
                let mut depth = f64::INFINITY;
                let mut outside_sq = 0.0;
                let mut inside = true;
                for &(c, lo, hi) in dims {
                    let v = value(c);
                    if v < lo || v > hi {
                        inside = false;
                        let gap = if v < lo { lo - v } else { v - hi };
                        outside_sq += gap * gap;
                    } else {
                        depth = depth.min((v - lo).min(hi - v));
                    }
                }
                if inside {
                    depth
                } else {
                    -outside_sq.sqrt()
                }
            }
            BoundPredicate::Prop { channel } => {
                if value(channel) > 0.5 {
                    sem.bool_magnitude
                } else {
                    -sem.bool_magnitude
                }
            }
        }
    }
}

/// Checks an interval is ground and valid for evaluation. Singletons are
/// accepted: they arise from instantiating parametric intervals.
pub(crate) fn ground_interval(iv: &Interval) -> Result<GroundInterval, EvalError> {
    let lower = ground(iv.lower)?;
    let upper = ground(iv.upper)?;
    let g = GroundInterval {
        lower,
        upper,
        lower_closed: iv.lower_closed,
        upper_closed: iv.upper_closed && upper != f64::INFINITY,
    };
    g.validate(true)?;
    Ok(g)
}

/// Robustness of `phi` at sample `i`.
pub fn robustness(phi: &Formula, tss: &TimedStateSequence, i: usize) -> Result<f64, EvalError> {
    robustness_with(phi, tss, i, &Semantics::default())
}

pub fn robustness_with(
    phi: &Formula,
    tss: &TimedStateSequence,
    i: usize,
    sem: &Semantics,
) -> Result<f64, EvalError> {
    if i >= tss.len() {
        return Err(EvalError::IndexOutOfRange {
            index: i,
            len: tss.len(),
        });
    }
    Ok(robustness_series_with(phi, tss, sem)?[i])
}

/// Robustness of `phi` at every sample index.
pub fn robustness_series(phi: &Formula, tss: &TimedStateSequence) -> Result<Vec<f64>, EvalError> {
    robustness_series_with(phi, tss, &Semantics::default())
}

pub fn robustness_series_with(
    phi: &Formula,
    tss: &TimedStateSequence,
    sem: &Semantics,
) -> Result<Vec<f64>, EvalError> {
    eval(phi, tss, sem)
}

fn eval(phi: &Formula, tss: &TimedStateSequence, sem: &Semantics) -> Result<Vec<f64>, EvalError> {
    let n = tss.len();
    Ok(match phi {
        Formula::True => vec![f64::INFINITY; n],
        Formula::False => vec![f64::NEG_INFINITY; n],
        Formula::Atom(p) | Formula::NegAtom(p) => {
            let bound = p.bind(tss.channels())?;
            let sign = if matches!(phi, Formula::Atom(_)) {
                1.0
            } else {
                -1.0
            };
            (0..n)
                .map(|i| sign * bound.distance_with(|c| tss.column(c)[i], sem))
                .collect()
        }
        Formula::And(a, b) => zip(eval(a, tss, sem)?, &eval(b, tss, sem)?, f64::min),
        Formula::Or(a, b) => zip(eval(a, tss, sem)?, &eval(b, tss, sem)?, f64::max),
        Formula::Next(a) => shift(eval(a, tss, sem)?, f64::NEG_INFINITY),
        Formula::WeakNext(a) => shift(eval(a, tss, sem)?, f64::INFINITY),
        Formula::Until(iv, a, b) => {
            let g = ground_interval(iv)?;
            let rhs = eval(b, tss, sem)?;
            if **a == Formula::True {
                window_extremum(tss.times(), &g, &rhs, Extremum::Max)
            } else {
                let lhs = eval(a, tss, sem)?;
                until(tss.times(), &g, &lhs, &rhs)
            }
        }
        Formula::Release(iv, a, b) => {
            let g = ground_interval(iv)?;
            let rhs = eval(b, tss, sem)?;
            if **a == Formula::False {
                window_extremum(tss.times(), &g, &rhs, Extremum::Min)
            } else {
                let lhs = eval(a, tss, sem)?;
                release(tss.times(), &g, &lhs, &rhs)
            }
        }
    })
}

fn zip(mut a: Vec<f64>, b: &[f64], f: fn(f64, f64) -> f64) -> Vec<f64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x = f(*x, *y);
    }
    a
}

fn shift(mut v: Vec<f64>, fill: f64) -> Vec<f64> {
    v.remove(0);
    v.push(fill);
    v
}

fn until(times: &[f64], g: &GroundInterval, lhs: &[f64], rhs: &[f64]) -> Vec<f64> {
    (0..times.len())
        .map(|i| {
            let w = preimage(times, i, g);
            let mut best = f64::NEG_INFINITY;
            let mut run = lhs[i..w.start.max(i)]
                .iter()
                .fold(f64::INFINITY, |m, &v| m.min(v));
            for j in w {
                best = best.max(rhs[j].min(run));
                run = run.min(lhs[j]);
                if run <= best {
                    break;
                }
            }
            best
        })
        .collect()
}

fn release(times: &[f64], g: &GroundInterval, lhs: &[f64], rhs: &[f64]) -> Vec<f64> {
    (0..times.len())
        .map(|i| {
            let w = preimage(times, i, g);
            let mut best = f64::INFINITY;
            let mut run = lhs[i..w.start.max(i)]
                .iter()
                .fold(f64::NEG_INFINITY, |m, &v| m.max(v));
            for j in w {
                best = best.min(rhs[j].max(run));
                run = run.max(lhs[j]);
                if run >= best {
                    break;
                }
            }
            best
        })
        .collect()
}

#[derive(Clone, Copy)]
enum Extremum {
    Max,
    Min,
}

/// Max (or min) of `values` over each preimage window. Window bounds are
/// non-decreasing in `i`, so a monotone deque gives linear time.
fn window_extremum(times: &[f64], g: &GroundInterval, values: &[f64], ext: Extremum) -> Vec<f64> {
    let empty = match ext {
        Extremum::Max => f64::NEG_INFINITY,
        Extremum::Min => f64::INFINITY,
    };
    let dominated = |kept: f64, new: f64| match ext {
        Extremum::Max => kept <= new,
        Extremum::Min => kept >= new,
    };
    let mut deque: VecDeque<usize> = VecDeque::new();
    let mut pushed = 0usize;
    let mut out = Vec::with_capacity(times.len());
    for i in 0..times.len() {
        let w = preimage(times, i, g);
        if w.is_empty() {
            out.push(empty);
            continue;
        }
        pushed = pushed.max(w.start);
        while pushed < w.end {
            while let Some(&back) = deque.back() {
                if dominated(values[back], values[pushed]) {
                    deque.pop_back();
                } else {
                    break;
                }
            }
            deque.push_back(pushed);
            pushed += 1;
        }
        while let Some(&front) = deque.front() {
            if front < w.start {
                deque.pop_front();
            } else {
                break;
            }
        }
        out.push(values[*deque.front().expect("window is non-empty")]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mtl::formula::BoxDim;

    fn ramp3() -> TimedStateSequence {
        TimedStateSequence::new(
            vec![0.0, 1.0, 2.0],
            vec!["y".into()],
            vec![vec![0.0, 2.0, 4.0]],
        )
        .unwrap()
    }

    fn le(c: f64) -> Formula {
        Formula::Atom(Predicate::le("y", Term::Const(c)))
    }

    fn ge(c: f64) -> Formula {
        Formula::Atom(Predicate::ge("y", Term::Const(c)))
    }

    #[test]
    fn hand_unrolled_fixtures() {
        let tss = ramp3();
        let always = Formula::always(Interval::unbounded(), le(3.0));
        assert_eq!(robustness(&always, &tss, 0).unwrap(), -1.0);
        let ev = Formula::eventually(Interval::closed(0.0, 1.0), ge(3.0));
        assert_eq!(robustness(&ev, &tss, 0).unwrap(), -1.0);
        let u = Formula::until(Interval::closed(0.0, 2.0), le(3.0), ge(3.0));
        assert_eq!(robustness(&u, &tss, 0).unwrap(), 1.0);
    }

    #[test]
    fn constants_and_next() {
        let tss = ramp3();
        assert_eq!(robustness(&Formula::True, &tss, 1).unwrap(), f64::INFINITY);
        assert_eq!(
            robustness(&Formula::False, &tss, 1).unwrap(),
            f64::NEG_INFINITY
        );
        let x = Formula::next(le(3.0));
        assert_eq!(
            robustness_series(&x, &tss).unwrap(),
            vec![1.0, -1.0, f64::NEG_INFINITY]
        );
        let wx = Formula::WeakNext(Box::new(le(3.0)));
        assert_eq!(robustness(&wx, &tss, 2).unwrap(), f64::INFINITY);
    }

    #[test]
    fn empty_window_is_bottom() {
        let tss = ramp3();
        let u = Formula::until(Interval::closed(5.0, 6.0), le(3.0), ge(3.0));
        assert_eq!(robustness(&u, &tss, 0).unwrap(), f64::NEG_INFINITY);
        let r = Formula::release(Interval::closed(5.0, 6.0), le(3.0), ge(3.0));
        assert_eq!(robustness(&r, &tss, 0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn signed_distance_fixtures() {
        let sem = Semantics::default();
        let lin = Predicate::le("y", Term::Const(3.0))
            .bind(&["y".into()])
            .unwrap();
        assert_eq!(lin.signed_distance(&[3.0], &sem), 0.0);
        assert_eq!(lin.signed_distance(&[2.0], &sem), 1.0);
        assert_eq!(lin.signed_distance(&[5.0], &sem), -2.0);
        let scaled = Predicate::Linear {
            channel: "y".into(),
            coeff: 2.0,
            cmp: Cmp::Le,
            threshold: Term::Const(40.0),
        }
        .bind(&["y".into()])
        .unwrap();
        assert_eq!(scaled.signed_distance(&[10.0], &sem), 10.0);

        let dims = vec![
            BoxDim {
                channel: "a".into(),
                lower: Term::Const(1.0),
                upper: Term::Const(2.0),
            },
            BoxDim {
                channel: "b".into(),
                lower: Term::Const(1.0),
                upper: Term::Const(2.0),
            },
        ];
        let bx = Predicate::Box { dims }
            .bind(&["a".into(), "b".into()])
            .unwrap();
        assert!((bx.signed_distance(&[0.0, 0.0], &sem) + 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(bx.signed_distance(&[1.5, 1.5], &sem), 0.5);
    }

    #[test]
    fn prop_uses_bool_magnitude() {
        let tss = TimedStateSequence::new(vec![0.0, 1.0], vec!["g".into()], vec![vec![1.0, 0.0]])
            .unwrap();
        let g = Formula::Atom(Predicate::Prop {
            channel: "g".into(),
        });
        let sem = Semantics {
            bool_magnitude: 2.5,
        };
        assert_eq!(
            robustness_series_with(&g, &tss, &sem).unwrap(),
            vec![2.5, -2.5]
        );
    }

    #[test]
    fn errors() {
        let tss = ramp3();
        assert_eq!(
            robustness(&le(1.0), &tss, 3),
            Err(EvalError::IndexOutOfRange { index: 3, len: 3 })
        );
        let p = Formula::Atom(Predicate::le("y", Term::Param(0)));
        assert_eq!(
            robustness(&p, &tss, 0),
            Err(EvalError::UnresolvedParameter(0))
        );
        let w = Formula::Atom(Predicate::le("omega", Term::Const(1.0)));
        assert_eq!(
            robustness(&w, &tss, 0),
            Err(EvalError::UnknownChannel("omega".into()))
        );
    }

    #[test]
    fn sliding_window_matches_general_until() {
        let times: Vec<f64> = (0..25)
            .map(|k| k as f64 * 0.3 + (k % 3) as f64 * 0.05)
            .collect();
        let vals: Vec<f64> = (0..25).map(|k| ((k * 7) % 11) as f64 - 5.0).collect();
        let top = vec![f64::INFINITY; 25];
        let bot = vec![f64::NEG_INFINITY; 25];
        for &(l, u, lc, uc) in &[
            (0.0, 1.0, true, true),
            (0.3, 0.9, false, true),
            (0.5, f64::INFINITY, true, false),
            (2.0, 2.0, true, true),
        ] {
            let g = GroundInterval {
                lower: l,
                upper: u,
                lower_closed: lc,
                upper_closed: uc,
            };
            assert_eq!(
                window_extremum(&times, &g, &vals, Extremum::Max),
                until(&times, &g, &top, &vals)
            );
            assert_eq!(
                window_extremum(&times, &g, &vals, Extremum::Min),
                release(&times, &g, &bot, &vals)
            );
        }
    }
}
