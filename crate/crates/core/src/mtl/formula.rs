//! Negation-normal-form MTL syntax tree.
//!
//! Numeric slots (thresholds, box bounds, interval endpoints) are [`Term`]s so
//! the same tree represents both ground formulas and parametric ones. A
//! parametric formula becomes ground through [`crate::pmtl::instantiate`].

use std::fmt;

use thiserror::Error;

/// A numeric slot: a literal or an index into the declared parameter list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    Const(f64),
    Param(usize),
}

impl Term {
    pub fn as_const(&self) -> Option<f64> {
        match *self {
            Term::Const(v) => Some(v),
            Term::Param(_) => None,
        }
    }

    pub fn param(&self) -> Option<usize> {
        match *self {
            Term::Param(p) => Some(p),
            Term::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval endpoint {0} is negative or NaN")]
    NegativeEndpoint(f64),
    #[error("interval lower bound {lower} exceeds upper bound {upper}")]
    Inverted { lower: f64, upper: f64 },
    #[error("interval with equal endpoints {0} is empty")]
    Empty(f64),
    #[error("singleton interval [{0},{0}] is not allowed")]
    Singleton(f64),
}

/// A timing constraint on `U` or `R`. Endpoints are offsets from the current
/// sample time; an unbounded upper end is `Term::Const(f64::INFINITY)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: Term,
    pub upper: Term,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl Interval {
    pub fn new(lower: Term, upper: Term, lower_closed: bool, upper_closed: bool) -> Self {
        Self {
            lower,
            upper,
            lower_closed,
            upper_closed,
        }
    }

    /// `[0, +inf)`, the interval of the unsubscripted operators.
    pub fn unbounded() -> Self {
        Self::new(Term::Const(0.0), Term::Const(f64::INFINITY), true, false)
    }

    pub fn closed(lower: f64, upper: f64) -> Self {
        Self::new(Term::Const(lower), Term::Const(upper), true, true)
    }

    pub fn is_unbounded(&self) -> bool {
        *self == Self::unbounded()
    }

    /// Literal endpoints, or `None` if either endpoint is a parameter.
    pub fn ground(&self) -> Option<GroundInterval> {
        Some(GroundInterval {
            lower: self.lower.as_const()?,
            upper: self.upper.as_const()?,
            lower_closed: self.lower_closed,
            upper_closed: self.upper_closed && self.upper.as_const()? != f64::INFINITY,
        })
    }
}

/// An interval whose endpoints are known numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundInterval {
    pub lower: f64,
    pub upper: f64,
    pub lower_closed: bool,
    pub upper_closed: bool,
}

impl GroundInterval {
    /// Membership of a time offset `d = τ(j) − τ(i)`.
    #[inline]
    pub fn contains_offset(&self, d: f64) -> bool {
        let above = if self.lower_closed {
            d >= self.lower
        } else {
            d > self.lower
        };
        let below = if self.upper_closed {
            d <= self.upper
        } else {
            d < self.upper
        };
        above && below
    }

    /// Checks the interval is a non-empty subset of the nonnegative reals.
    /// With `allow_singleton == false`, `[a,a]` is also rejected.
    pub fn validate(&self, allow_singleton: bool) -> Result<(), IntervalError> {
        if self.lower.is_nan() || self.lower < 0.0 {
            return Err(IntervalError::NegativeEndpoint(self.lower));
        }
        if self.upper.is_nan() || self.upper < 0.0 {
            return Err(IntervalError::NegativeEndpoint(self.upper));
        }
        if self.lower > self.upper {
            return Err(IntervalError::Inverted {
                lower: self.lower,
                upper: self.upper,
            });
        }
        if self.lower == self.upper {
            if !(self.lower_closed && self.upper_closed) || self.upper == f64::INFINITY {
                return Err(IntervalError::Empty(self.lower));
            }
            if !allow_singleton {
                return Err(IntervalError::Singleton(self.lower));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Ge,
}

/// One axis of a box predicate. Bounds are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxDim {
    pub channel: String,
    pub lower: Term,
    pub upper: Term,
}

/// An atomic proposition, labelling a subset of the output space.
#[derive(Debug, Clone, PartialEq)]
pub enum Predicate {
    /// `coeff * channel <= threshold` or `coeff * channel >= threshold`.
    Linear {
        channel: String,
        coeff: f64,
        cmp: Cmp,
        threshold: Term,
    },
    /// Axis-aligned box over one or more channels.
    Box { dims: Vec<BoxDim> },
    /// A 0/1 channel read as a boolean.
    Prop { channel: String },
}

impl Predicate {
    pub fn le(channel: &str, threshold: Term) -> Self {
        Predicate::Linear {
            channel: channel.to_string(),
            coeff: 1.0,
            cmp: Cmp::Le,
            threshold,
        }
    }

    pub fn ge(channel: &str, threshold: Term) -> Self {
        Predicate::Linear {
            channel: channel.to_string(),
            coeff: 1.0,
            cmp: Cmp::Ge,
            threshold,
        }
    }

    pub fn terms(&self) -> Vec<Term> {
        match self {
            Predicate::Linear { threshold, .. } => vec![*threshold],
            Predicate::Box { dims } => dims.iter().flat_map(|d| [d.lower, d.upper]).collect(),
            Predicate::Prop { .. } => Vec::new(),
        }
    }

    pub fn channels(&self) -> Vec<&str> {
        match self {
            Predicate::Linear { channel, .. } | Predicate::Prop { channel } => vec![channel],
            Predicate::Box { dims } => dims.iter().map(|d| d.channel.as_str()).collect(),
        }
    }

    pub(crate) fn map_terms<E>(
        &self,
        f: &mut impl FnMut(Term) -> Result<Term, E>,
    ) -> Result<Predicate, E> {
        Ok(match self {
            Predicate::Linear {
                channel,
                coeff,
                cmp,
                threshold,
            } => Predicate::Linear {
                channel: channel.clone(),
                coeff: *coeff,
                cmp: *cmp,
                threshold: f(*threshold)?,
            },
            Predicate::Box { dims } => Predicate::Box {
                dims: dims
                    .iter()
                    .map(|d| {
                        Ok(BoxDim {
                            channel: d.channel.clone(),
                            lower: f(d.lower)?,
                            upper: f(d.upper)?,
                        })
                    })
                    .collect::<Result<_, E>>()?,
            },
            Predicate::Prop { channel } => Predicate::Prop {
                channel: channel.clone(),
            },
        })
    }
}

/// An MTL formula in negation normal form.
///
/// `Eventually` and `Always` are not variants: `<>_I φ` is `true U_I φ` and
/// `[]_I φ` is `false R_I φ`. `WeakNext` is the dual of `Next` and only
/// arises from negating a `Next`.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    True,
    False,
    Atom(Predicate),
    NegAtom(Predicate),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    WeakNext(Box<Formula>),
    Until(Interval, Box<Formula>, Box<Formula>),
    Release(Interval, Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn and(lhs: Formula, rhs: Formula) -> Self {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Self {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn next(arg: Formula) -> Self {
        Formula::Next(Box::new(arg))
    }

    pub fn until(interval: Interval, lhs: Formula, rhs: Formula) -> Self {
        Formula::Until(interval, Box::new(lhs), Box::new(rhs))
    }

    pub fn release(interval: Interval, lhs: Formula, rhs: Formula) -> Self {
        Formula::Release(interval, Box::new(lhs), Box::new(rhs))
    }

    pub fn eventually(interval: Interval, arg: Formula) -> Self {
        Self::until(interval, Formula::True, arg)
    }

    pub fn always(interval: Interval, arg: Formula) -> Self {
        Self::release(interval, Formula::False, arg)
    }

    /// The NNF formula equivalent to `¬self`.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(p) => Formula::NegAtom(p.clone()),
            Formula::NegAtom(p) => Formula::Atom(p.clone()),
            Formula::And(a, b) => Formula::or(a.negate(), b.negate()),
            Formula::Or(a, b) => Formula::and(a.negate(), b.negate()),
            Formula::Next(a) => Formula::WeakNext(Box::new(a.negate())),
            Formula::WeakNext(a) => Formula::Next(Box::new(a.negate())),
            Formula::Until(i, a, b) => Formula::release(*i, a.negate(), b.negate()),
            Formula::Release(i, a, b) => Formula::until(*i, a.negate(), b.negate()),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) | Formula::NegAtom(_) => vec![],
            Formula::Next(a) | Formula::WeakNext(a) => vec![a],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Until(_, a, b)
            | Formula::Release(_, a, b) => vec![a, b],
        }
    }

    /// Indices of every parameter referenced anywhere in the tree, sorted and
    /// deduplicated.
    pub fn params(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit_terms(&mut |t| {
            if let Term::Param(p) = t {
                out.push(p);
            }
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_ground(&self) -> bool {
        self.params().is_empty()
    }

    /// Names of every channel referenced by an atom.
    pub fn channels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        self.visit_predicates(&mut |p| {
            for c in p.channels() {
                if !out.iter().any(|o| o == c) {
                    out.push(c.to_string());
                }
            }
        });
        out
    }

    pub fn visit_predicates(&self, f: &mut impl FnMut(&Predicate)) {
        match self {
            Formula::Atom(p) | Formula::NegAtom(p) => f(p),
            _ => {
                for c in self.children() {
                    c.visit_predicates(f);
                }
            }
        }
    }

    fn visit_terms(&self, f: &mut impl FnMut(Term)) {
        match self {
            Formula::Atom(p) | Formula::NegAtom(p) => p.terms().into_iter().for_each(&mut *f),
            Formula::Until(i, a, b) | Formula::Release(i, a, b) => {
                f(i.lower);
                f(i.upper);
                a.visit_terms(f);
                b.visit_terms(f);
            }
            _ => {
                for c in self.children() {
                    c.visit_terms(f);
                }
            }
        }
    }

    /// Rebuilds the tree with every term passed through `f`.
    pub fn try_map_terms<E>(
        &self,
        f: &mut impl FnMut(Term) -> Result<Term, E>,
    ) -> Result<Formula, E> {
        Ok(match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(p) => Formula::Atom(p.map_terms(f)?),
            Formula::NegAtom(p) => Formula::NegAtom(p.map_terms(f)?),
            Formula::And(a, b) => Formula::and(a.try_map_terms(f)?, b.try_map_terms(f)?),
            Formula::Or(a, b) => Formula::or(a.try_map_terms(f)?, b.try_map_terms(f)?),
            Formula::Next(a) => Formula::next(a.try_map_terms(f)?),
            Formula::WeakNext(a) => Formula::WeakNext(Box::new(a.try_map_terms(f)?)),
            Formula::Until(i, a, b) => {
                let i = Interval::new(f(i.lower)?, f(i.upper)?, i.lower_closed, i.upper_closed);
                Formula::until(i, a.try_map_terms(f)?, b.try_map_terms(f)?)
            }
            Formula::Release(i, a, b) => {
                let i = Interval::new(f(i.lower)?, f(i.upper)?, i.lower_closed, i.upper_closed);
                Formula::release(i, a.try_map_terms(f)?, b.try_map_terms(f)?)
            }
        })
    }

    /// Renders the formula in the text grammar accepted by
    /// [`crate::mtl::parse`], naming parameters from `params`.
    pub fn display<'a>(&'a self, params: &'a [String]) -> FormulaDisplay<'a> {
        FormulaDisplay {
            formula: self,
            params: Some(params),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        FormulaDisplay {
            formula: self,
            params: None,
        }
        .fmt(f)
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    params: Option<&'a [String]>,
}

impl FormulaDisplay<'_> {
    fn term(&self, t: Term) -> String {
        match t {
            Term::Const(v) if v == f64::INFINITY => "inf".to_string(),
            Term::Const(v) => format!("{v:?}"),
            Term::Param(p) => match self.params.and_then(|ps| ps.get(p)) {
                Some(name) => name.clone(),
                None => format!("p{p}"),
            },
        }
    }

    fn interval(&self, i: &Interval) -> String {
        if i.is_unbounded() {
            return String::new();
        }
        format!(
            "_{}{},{}{}",
            if i.lower_closed { '[' } else { '(' },
            self.term(i.lower),
            self.term(i.upper),
            if i.upper_closed { ']' } else { ')' }
        )
    }

    fn predicate(&self, p: &Predicate) -> String {
        match p {
            Predicate::Linear {
                channel,
                coeff,
                cmp,
                threshold,
            } => {
                let op = match cmp {
                    Cmp::Le => "<=",
                    Cmp::Ge => ">=",
                };
                let lhs = if *coeff == 1.0 {
                    channel.clone()
                } else {
                    format!("{coeff:?}*{channel}")
                };
                format!("{lhs} {op} {}", self.term(*threshold))
            }
            Predicate::Box { dims } => {
                let names: Vec<&str> = dims.iter().map(|d| d.channel.as_str()).collect();
                let boxes: Vec<String> = dims
                    .iter()
                    .map(|d| format!("[{},{}]", self.term(d.lower), self.term(d.upper)))
                    .collect();
                if names.len() == 1 {
                    format!("{} in {}", names[0], boxes[0])
                } else {
                    format!("({}) in {}", names.join(", "), boxes.join("x"))
                }
            }
            Predicate::Prop { channel } => channel.clone(),
        }
    }

    fn render(&self, phi: &Formula) -> String {
        match phi {
            Formula::True => "true".into(),
            Formula::False => "false".into(),
            Formula::Atom(p) => format!("({})", self.predicate(p)),
            Formula::NegAtom(p) => format!("!({})", self.predicate(p)),
            Formula::And(a, b) => format!("({} /\\ {})", self.render(a), self.render(b)),
            Formula::Or(a, b) => format!("({} \\/ {})", self.render(a), self.render(b)),
            Formula::Next(a) => format!("X {}", self.render(a)),
            Formula::WeakNext(a) => format!("!X {}", self.render(&a.negate())),
            Formula::Until(i, a, b) if **a == Formula::True => {
                format!("<>{} {}", self.interval(i), self.render(b))
            }
            Formula::Release(i, a, b) if **a == Formula::False => {
                format!("[]{} {}", self.interval(i), self.render(b))
            }
            Formula::Until(i, a, b) => format!(
                "({} U{} {})",
                self.render(a),
                self.interval(i),
                self.render(b)
            ),
            Formula::Release(i, a, b) => format!(
                "({} R{} {})",
                self.render(a),
                self.interval(i),
                self.render(b)
            ),
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(self.formula))
    }
}
