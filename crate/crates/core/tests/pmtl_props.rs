mod common;

use common::{arb_ordered_pair, arb_param_formula, arb_trace, PARAM_MAX};
use paramine_core::mtl::robustness;
use paramine_core::optimize::{cost_max, cost_min, gamma_max, gamma_min, Priority};
use paramine_core::pmtl::{instantiate, monotonicity, Direction, ParamSpace};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn classified_formulas_are_monotone(
        phi in arb_param_formula(2),
        tss in arb_trace(1, 20),
        pairs in proptest::collection::vec(arb_ordered_pair(2), 20),
    ) {
        let dir = monotonicity(&phi, 2).overall;
        prop_assume!(dir != Direction::Unknown);
        for (lo, hi) in pairs {
            let a = robustness(&instantiate(&phi, &lo).unwrap(), &tss, 0).unwrap();
            let b = robustness(&instantiate(&phi, &hi).unwrap(), &tss, 0).unwrap();
            match dir {
                Direction::Increasing => prop_assert!(a <= b, "{a} > {b} at {lo:?} ⪯ {hi:?}"),
                Direction::Decreasing => prop_assert!(a >= b, "{a} < {b} at {lo:?} ⪯ {hi:?}"),
                Direction::Unknown => unreachable!(),
            }
        }
    }

    #[test]
    fn per_parameter_directions_hold_one_at_a_time(
        phi in arb_param_formula(2),
        tss in arb_trace(1, 20),
        base in proptest::collection::vec(0.0..=PARAM_MAX, 2),
        k in 0usize..2,
        step in 0.0..=PARAM_MAX,
    ) {
        let dir = monotonicity(&phi, 2).per_param[k];
        prop_assume!(dir != Direction::Unknown);
        let mut up = base.clone();
        up[k] = (up[k] + step).min(PARAM_MAX);
        let a = robustness(&instantiate(&phi, &base).unwrap(), &tss, 0).unwrap();
        let b = robustness(&instantiate(&phi, &up).unwrap(), &tss, 0).unwrap();
        if dir == Direction::Increasing {
            prop_assert!(a <= b);
        } else {
            prop_assert!(a >= b);
        }
    }

    #[test]
    fn normalisation_round_trips(
        bounds in proptest::collection::vec((-1e3f64..1e3, 0.0f64..1e3), 1..5),
        unit in proptest::collection::vec(0.0f64..=1.0, 5),
    ) {
        let lower: Vec<f64> = bounds.iter().map(|b| b.0).collect();
        let upper: Vec<f64> = bounds.iter().map(|b| b.0 + b.1).collect();
        let names = (0..lower.len()).map(|i| format!("p{i}")).collect();
        let space = ParamSpace::new(names, lower.clone(), upper.clone()).unwrap();
        let theta: Vec<f64> = lower
            .iter()
            .zip(&upper)
            .zip(&unit)
            .map(|((l, u), s)| l + s * (u - l))
            .collect();
        let back = space.denormalize(&space.normalize(&theta).unwrap()).unwrap();
        for (a, b) in theta.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }
}

fn arb_priority(eta: usize) -> impl Strategy<Value = Priority> {
    prop_oneof![
        Just(Priority::Norm),
        proptest::collection::vec(-2.0f64..2.0, eta)
            .prop_map(|weights| Priority::WeightedSum { weights }),
        (0..eta).prop_map(|index| Priority::Single { index }),
        Just(Priority::Max),
        Just(Priority::Min),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn falsifying_samples_dominate(
        (eta, priority, theta_f, theta_n) in (1usize..=4).prop_flat_map(|eta| (
            Just(eta),
            arb_priority(eta),
            proptest::collection::vec(0.0f64..=1.0, eta),
            proptest::collection::vec(0.0f64..=1.0, eta),
        )),
        rob_f in -10.0f64..0.0,
        rob_n in 1e-9f64..10.0,
    ) {
        let (ff, fnf) = (priority.eval(&theta_f), priority.eval(&theta_n));
        let g = gamma_min(&priority, eta);
        prop_assert!(cost_min(ff, rob_f, g) < cost_min(fnf, rob_n, g));
        let g = gamma_max(&priority, eta);
        prop_assert!(cost_max(ff, rob_f, g) > cost_max(fnf, rob_n, g));
    }
}
