//! Metric Temporal Logic in negation normal form.

mod formula;
mod naive;
mod parse;
mod robustness;
mod trace;

pub use formula::{
    BoxDim, Cmp, Formula, FormulaDisplay, GroundInterval, Interval, IntervalError, Predicate, Term,
};
pub use naive::{robustness_naive, robustness_naive_with};
pub use parse::{parse, ParseError, ParseErrorKind, Parser};
pub use robustness::{
    robustness, robustness_series, robustness_series_with, robustness_with, BoundPredicate,
    EvalError, Semantics,
};
pub use trace::{preimage, TimedStateSequence, TraceError};
