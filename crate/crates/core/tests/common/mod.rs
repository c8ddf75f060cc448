//! Random formulas and traces shared by the property tests.
#![allow(dead_code)]

use paramine_core::mtl::{BoxDim, Cmp, Formula, Interval, Predicate, Term, TimedStateSequence};
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, TestRng, TestRunner};

pub const CHANNELS: [&str; 3] = ["x", "y", "z"];

pub fn channels(n: usize) -> Vec<String> {
    CHANNELS[..n].iter().map(|s| s.to_string()).collect()
}

/// Values on a half-integer grid most of the time so ties and exact
/// boundary contacts are common.
fn value() -> impl Strategy<Value = f64> {
    prop_oneof![
        3 => (-10i32..=10).prop_map(|v| v as f64 * 0.5),
        1 => -5.0f64..5.0,
    ]
}

fn increment() -> impl Strategy<Value = f64> {
    prop_oneof![
        3 => prop::sample::select(vec![0.25, 0.5, 1.0]),
        1 => 0.05f64..1.5,
    ]
}

/// Traces of 1..=`max_len` samples over `n_channels` channels, starting at 0.
pub fn arb_trace(n_channels: usize, max_len: usize) -> impl Strategy<Value = TimedStateSequence> {
    (1..=max_len)
        .prop_flat_map(move |len| {
            (
                vec(increment(), len - 1),
                vec(vec(value(), len), n_channels),
            )
        })
        .prop_map(move |(incs, columns)| {
            let mut times = vec![0.0];
            for d in incs {
                times.push(times.last().unwrap() + d);
            }
            TimedStateSequence::new(times, channels(n_channels), columns).unwrap()
        })
}

/// Non-empty intervals with endpoints on a coarse grid, sometimes unbounded.
pub fn arb_interval() -> impl Strategy<Value = Interval> + Clone {
    (
        prop::sample::select(vec![0.0, 0.0, 0.5, 1.0, 2.0]),
        prop::sample::select(vec![0.0, 0.5, 1.0, 2.0, 3.0, f64::INFINITY]),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(lo, len, lc, uc)| {
            let hi = lo + len;
            let (lc, uc) = if len == 0.0 {
                (true, true)
            } else if hi.is_infinite() {
                (lc, false)
            } else {
                (lc, uc)
            };
            Interval::new(Term::Const(lo), Term::Const(hi), lc, uc)
        })
}

fn arb_predicate(n_channels: usize) -> impl Strategy<Value = Predicate> {
    let ch = move || prop::sample::select(CHANNELS[..n_channels].to_vec()).prop_map(str::to_string);
    prop_oneof![
        3 => (ch(), prop::sample::select(vec![1.0, 1.0, -2.0, 0.5]), any::<bool>(), value()).prop_map(
            |(channel, coeff, le, t)| Predicate::Linear {
                channel,
                coeff,
                cmp: if le { Cmp::Le } else { Cmp::Ge },
                threshold: Term::Const(t),
            }
        ),
        1 => prop::sample::subsequence(CHANNELS[..n_channels].to_vec(), 1..=n_channels.min(2))
            .prop_flat_map(|chs| {
                let n = chs.len();
                (Just(chs), vec((value(), 0.0f64..3.0), n))
            })
            .prop_map(|(chs, bounds)| Predicate::Box {
                dims: chs
                    .into_iter()
                    .zip(bounds)
                    .map(|(c, (lo, w))| BoxDim {
                        channel: c.to_string(),
                        lower: Term::Const(lo),
                        upper: Term::Const(lo + w),
                    })
                    .collect(),
            }),
    ]
}

fn arb_leaf(n_channels: usize) -> impl Strategy<Value = Formula> {
    prop_oneof![
        1 => Just(Formula::True),
        1 => Just(Formula::False),
        4 => arb_predicate(n_channels).prop_map(Formula::Atom),
        3 => arb_predicate(n_channels).prop_map(Formula::NegAtom),
    ]
}

fn combine(
    leaf: impl Strategy<Value = Formula> + 'static,
    interval: impl Strategy<Value = Interval> + Clone + 'static,
    levels: u32,
) -> BoxedStrategy<Formula> {
    leaf.prop_recursive(levels, 24, 2, move |inner| {
        let iv = interval.clone();
        let i = move || iv.clone();
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            inner.clone().prop_map(Formula::next),
            (i(), inner.clone(), inner.clone()).prop_map(|(t, a, b)| Formula::until(t, a, b)),
            (i(), inner.clone(), inner.clone()).prop_map(|(t, a, b)| Formula::release(t, a, b)),
            (i(), inner.clone()).prop_map(|(t, a)| Formula::eventually(t, a)),
            (i(), inner).prop_map(|(t, a)| Formula::always(t, a)),
        ]
    })
    .boxed()
}

/// Ground NNF formulas of depth at most 4 over `n_channels` channels.
pub fn arb_formula(n_channels: usize) -> BoxedStrategy<Formula> {
    combine(arb_leaf(n_channels), arb_interval(), 3)
}

/// A formula together with a trace over the same channels.
pub fn arb_case() -> impl Strategy<Value = (Formula, TimedStateSequence)> {
    (1usize..=3).prop_flat_map(|n| (arb_formula(n), arb_trace(n, 30)))
}

/// Upper bound of every parameter in the parametric strategies; all
/// parameters range over `[0, PARAM_MAX]`.
pub const PARAM_MAX: f64 = 5.0;

fn param_term(n_params: usize) -> impl Strategy<Value = Term> {
    (0..n_params).prop_map(Term::Param)
}

/// Intervals where a parameter may sit in either endpoint; the other
/// endpoint is chosen so every instantiation in `[0, PARAM_MAX]` is valid.
fn arb_param_interval(n_params: usize) -> impl Strategy<Value = Interval> + Clone {
    prop_oneof![
        2 => arb_interval(),
        2 => param_term(n_params).prop_map(|p| Interval::new(Term::Const(0.0), p, true, true)),
        1 => (param_term(n_params), any::<bool>()).prop_map(|(p, lc)| {
            Interval::new(p, Term::Const(PARAM_MAX + 5.0), lc, true)
        }),
        1 => (param_term(n_params), any::<bool>()).prop_map(|(p, lc)| {
            Interval::new(p, Term::Const(f64::INFINITY), lc, false)
        }),
    ]
}

fn arb_param_predicate(n_params: usize) -> impl Strategy<Value = Predicate> {
    prop_oneof![
        2 => arb_predicate(1),
        3 => (param_term(n_params), any::<bool>()).prop_map(|(p, le)| Predicate::Linear {
            channel: "x".into(),
            coeff: 1.0,
            cmp: if le { Cmp::Le } else { Cmp::Ge },
            threshold: p,
        }),
        1 => (param_term(n_params), any::<bool>()).prop_map(|(p, upper)| Predicate::Box {
            dims: vec![if upper {
                BoxDim { channel: "x".into(), lower: Term::Const(-10.0), upper: p }
            } else {
                BoxDim { channel: "x".into(), lower: p, upper: Term::Const(10.0) }
            }],
        }),
    ]
}

/// Parametric formulas over channel `x` with parameters `0..n_params`.
pub fn arb_param_formula(n_params: usize) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![
        1 => Just(Formula::True),
        1 => Just(Formula::False),
        4 => arb_param_predicate(n_params).prop_map(Formula::Atom),
        3 => arb_param_predicate(n_params).prop_map(Formula::NegAtom),
    ];
    combine(leaf, arb_param_interval(n_params), 3)
}

/// A pair `θ ⪯ θ′` in `[0, PARAM_MAX]^n`, with ties mixed in.
pub fn arb_ordered_pair(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    vec((0.0..=PARAM_MAX, 0.0f64..=1.0, any::<bool>()), n).prop_map(|coords| {
        coords
            .into_iter()
            .map(|(a, u, tie)| {
                let b = if tie { a } else { a + u * (PARAM_MAX - a) };
                (a, b)
            })
            .unzip()
    })
}

/// Draws one value from `strategy`, for tests that need a fixed number of
/// samples rather than a proptest run.
pub fn draw<S: Strategy>(strategy: &S, runner: &mut TestRunner) -> S::Value {
    strategy
        .new_tree(runner)
        .expect("strategy never rejects")
        .current()
}

pub fn seeded_runner(seed: u64) -> TestRunner {
    let mut bytes = [0u8; 32];
    bytes[..8].copy_from_slice(&seed.to_le_bytes());
    TestRunner::new_with_rng(
        Config::default(),
        TestRng::from_seed(proptest::test_runner::RngAlgorithm::ChaCha, &bytes),
    )
}
