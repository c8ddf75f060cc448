//! Reference evaluator: a direct top-down transcription of the recursive
//! robustness semantics, used to cross-check [`super::robustness`].
//!
//! Window membership is decided by scanning every sample and the inner
//! extremum is recomputed from scratch for each candidate `j`. Results are
//! memoised per (subformula, index) so nested temporal operators stay
//! tractable; the memo does not change any value.

use std::collections::HashMap;

use super::formula::Formula;
use super::robustness::{ground_interval, EvalError, Semantics};
use super::trace::TimedStateSequence;

pub fn robustness_naive(
    phi: &Formula,
    tss: &TimedStateSequence,
    i: usize,
) -> Result<f64, EvalError> {
    robustness_naive_with(phi, tss, i, &Semantics::default())
}

pub fn robustness_naive_with(
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
    let mut ctx = Ctx {
        tss,
        sem,
        memo: HashMap::new(),
    };
    ctx.rob(phi, i)
}

struct Ctx<'a> {
    tss: &'a TimedStateSequence,
    sem: &'a Semantics,
    memo: HashMap<(*const Formula, usize), f64>,
}

impl Ctx<'_> {
    fn rob(&mut self, phi: &Formula, i: usize) -> Result<f64, EvalError> {
        let key = (phi as *const Formula, i);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let v = self.rob_uncached(phi, i)?;
        self.memo.insert(key, v);
        Ok(v)
    }

    fn rob_uncached(&mut self, phi: &Formula, i: usize) -> Result<f64, EvalError> {
        let tss = self.tss;
        let n = tss.len();
        Ok(match phi {
            Formula::True => f64::INFINITY,
            Formula::False => f64::NEG_INFINITY,
            Formula::Atom(p) => p
                .bind(tss.channels())?
                .signed_distance(&tss.sample(i), self.sem),
            Formula::NegAtom(p) => -p
                .bind(tss.channels())?
                .signed_distance(&tss.sample(i), self.sem),
            Formula::And(a, b) => self.rob(a, i)?.min(self.rob(b, i)?),
            Formula::Or(a, b) => self.rob(a, i)?.max(self.rob(b, i)?),
            Formula::Next(a) => {
                if i + 1 < n {
                    self.rob(a, i + 1)?
                } else {
                    f64::NEG_INFINITY
                }
            }
            Formula::WeakNext(a) => {
                if i + 1 < n {
                    self.rob(a, i + 1)?
                } else {
                    f64::INFINITY
                }
            }
            Formula::Until(iv, a, b) => {
                let g = ground_interval(iv)?;
                let times = tss.times();
                let mut sup = f64::NEG_INFINITY;
                for j in 0..n {
                    if !g.contains_offset(times[j] - times[i]) {
                        continue;
                    }
                    let mut inf = f64::INFINITY;
                    for k in i..j {
                        inf = inf.min(self.rob(a, k)?);
                    }
                    sup = sup.max(self.rob(b, j)?.min(inf));
                }
                sup
            }
            Formula::Release(iv, a, b) => {
                let g = ground_interval(iv)?;
                let times = tss.times();
                let mut inf = f64::INFINITY;
                for j in 0..n {
                    if !g.contains_offset(times[j] - times[i]) {
                        continue;
                    }
                    let mut sup = f64::NEG_INFINITY;
                    for k in i..j {
                        sup = sup.max(self.rob(a, k)?);
                    }
                    inf = inf.min(self.rob(b, j)?.max(sup));
                }
                inf
            }
        })
    }
}
