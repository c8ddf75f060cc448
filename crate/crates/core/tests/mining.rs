use paramine_core::mining::{
    mine, rgda, sda, sweep, Anchor, FalsificationDomain, Problem, SdaConfig, SweepSpec,
    Termination, Witness,
};
use paramine_core::mtl::{parse, Formula, Semantics};
use paramine_core::optimize::{OptimizerConfig, Priority};
use paramine_core::pmtl::{precedes, Direction, ParamSpace};
use paramine_core::sysmodel::{HsSystem, RampSystem, SystemModel};
use proptest::prelude::*;

fn ramp_two_param() -> (RampSystem, Formula, ParamSpace) {
    let phi = parse("[] y <= a /\\ [] 2*y <= b", &["a", "b"]).unwrap();
    let space = ParamSpace::new(
        vec!["a".into(), "b".into()],
        vec![0.0, 0.0],
        vec![20.0, 40.0],
    )
    .unwrap();
    (RampSystem::default(), phi, space)
}

fn hs_problem_parts() -> (HsSystem, Formula, ParamSpace) {
    let phi = parse(
        "[]_[0,t1] !((x1, x2) in [1.5,t2]x[1,t3])",
        &["t1", "t2", "t3"],
    )
    .unwrap();
    let space = ParamSpace::new(
        vec!["t1".into(), "t2".into(), "t3".into()],
        vec![0.0, 1.5, 1.1],
        vec![5.0, 2.1, 1.6],
    )
    .unwrap();
    (HsSystem::default(), phi, space)
}

fn config(budget: usize, seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        budget,
        seed,
        ..Default::default()
    }
}

fn assert_sound(problem: &Problem<'_>, domain: &FalsificationDomain) {
    for a in domain.anchors() {
        let rob = problem.replay(a).unwrap();
        assert!(rob <= 0.0, "anchor {:?} replays to {rob}", a.theta_raw);
        assert_eq!(rob.to_bits(), a.witness.robustness.to_bits());
    }
}

#[test]
fn ramp_single_parameter_boundary() {
    let ramp = RampSystem::default();
    let search = ramp.search_space();
    let phi = parse("[] y <= a", &["a"]).unwrap();
    let space = ParamSpace::new(vec!["a".into()], vec![0.0], vec![20.0]).unwrap();
    let problem = Problem::new(&ramp, &phi, &space, &search, None).unwrap();
    assert_eq!(problem.direction, Direction::Increasing);
    let mut hits = 0;
    for seed in 0..10 {
        let res = mine(&problem, &Priority::Single { index: 0 }, &config(300, seed)).unwrap();
        assert_eq!(res.records.len(), 300);
        let theta = res.theta_raw[0];
        if res.falsified() && (9.5..=10.0).contains(&theta) {
            hits += 1;
        }
    }
    assert!(hits >= 9, "{hits}/10");
}

#[test]
fn hs_mining_spends_exact_budget_and_is_sound() {
    let (hs, phi, space) = hs_problem_parts();
    let search = hs.search_space();
    let problem = Problem::new(&hs, &phi, &space, &search, None).unwrap();
    assert_eq!(problem.direction, Direction::Decreasing);
    for seed in 0..3 {
        let res = mine(&problem, &Priority::Norm, &config(400, seed)).unwrap();
        assert_eq!(res.records.len(), 400);
        let replayed = problem
            .evaluate(&res.x0, &res.lambda, &res.theta_norm)
            .unwrap()
            .0;
        assert_eq!(replayed.to_bits(), res.robustness.to_bits());
    }
}

#[test]
fn mining_is_deterministic_across_thread_counts() {
    let (ramp, phi, space) = ramp_two_param();
    let search = ramp.search_space();
    let problem = Problem::new(&ramp, &phi, &space, &search, None).unwrap();
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| rgda(&problem, 6, &config(100, 7)).unwrap())
    };
    let (a, b) = (run(1), run(4));
    assert_eq!(a.domain, b.domain);
    for ((wa, ra), (wb, rb)) in a.runs.iter().zip(&b.runs) {
        assert_eq!(wa, wb);
        assert_eq!(ra.records, rb.records);
    }
}

#[test]
fn rgda_domain_is_sound_and_budgeted() {
    let (ramp, phi, space) = ramp_two_param();
    let search = ramp.search_space();
    let problem = Problem::new(&ramp, &phi, &space, &search, None).unwrap();
    let out = rgda(&problem, 8, &config(150, 3)).unwrap();
    assert_eq!(out.runs.len(), 8);
    assert!(out.runs.iter().all(|(_, r)| r.records.len() == 150));
    assert!(!out.domain.is_empty());
    assert_sound(&problem, &out.domain);

    let none = rgda(&problem, 0, &config(150, 3)).unwrap();
    assert!(none.domain.is_empty());
}

#[test]
fn sda_finds_the_pareto_corner() {
    let (ramp, phi, space) = ramp_two_param();
    let search = ramp.search_space();
    let problem = Problem::new(&ramp, &phi, &space, &search, None).unwrap();
    let settings = SdaConfig {
        bias: vec![1.0, 1.0],
        epsilon: 0.02,
        max_iterations: 50,
    };
    let out = sda(&problem, &settings, &config(300, 0)).unwrap();
    let first = space.denormalize(&out.markers[0]).unwrap();
    let d = ((first[0] - 10.0).powi(2) + (first[1] - 20.0).powi(2)).sqrt();
    assert!(d <= 0.2, "first marker {first:?}");
    assert_sound(&problem, &out.domain);
    assert!(out.runs.iter().all(|(_, r)| r.records.len() == 300));

    let wide = SdaConfig {
        epsilon: 10.0,
        ..settings
    };
    let out = sda(&problem, &wide, &config(300, 0)).unwrap();
    assert_eq!(out.waves, 1);
    assert_eq!(out.termination, Termination::Converged);
}

#[test]
fn sda_on_hs_is_sound() {
    let (hs, phi, space) = hs_problem_parts();
    let search = hs.search_space();
    let problem = Problem::new(&hs, &phi, &space, &search, None).unwrap();
    let settings = SdaConfig {
        bias: vec![1.0, 0.5, 0.5],
        epsilon: 0.05,
        max_iterations: 8,
    };
    let out = sda(&problem, &settings, &config(200, 4)).unwrap();
    assert!(out.runs.len() <= 8);
    assert_sound(&problem, &out.domain);
}

#[test]
fn unfalsifiable_formula_is_never_falsified() {
    let ramp = RampSystem::default();
    let search = ramp.search_space();
    let space = ParamSpace::new(vec!["a".into()], vec![0.0], vec![1.0]).unwrap();
    let problem = Problem::new(
        &ramp,
        &Formula::True,
        &space,
        &search,
        Some(Direction::Decreasing),
    )
    .unwrap();
    let res = mine(&problem, &Priority::Norm, &config(20, 0)).unwrap();
    assert_eq!(res.robustness, f64::INFINITY);
    assert!(!res.falsified());
    assert!(Problem::new(&ramp, &Formula::True, &space, &search, None).is_err());
}

#[test]
fn hs_sweep_is_monotone_along_each_axis() {
    let (hs, phi, _) = hs_problem_parts();
    let space = ParamSpace::new(
        vec!["t1".into(), "t2".into(), "t3".into()],
        vec![5.0, 1.5, 1.1],
        vec![5.0, 2.1, 1.6],
    )
    .unwrap();
    let spec = SweepSpec {
        theta_counts: vec![1, 20, 20],
        x0: Some(vec![0.52, 0.55]),
        ..Default::default()
    };
    let rows = sweep(
        &hs,
        &phi,
        &space,
        &hs.search_space(),
        &spec,
        &Semantics::default(),
    )
    .unwrap();
    assert_eq!(rows.len(), 400);
    let grid: Vec<Vec<f64>> = rows
        .chunks(20)
        .map(|r| r.iter().map(|x| x.robustness).collect())
        .collect();
    for i in 0..20 {
        for j in 0..20 {
            if i + 1 < 20 {
                assert!(grid[i + 1][j] <= grid[i][j]);
            }
            if j + 1 < 20 {
                assert!(grid[i][j + 1] <= grid[i][j]);
            }
        }
    }
}

fn anchor(theta: Vec<f64>) -> Anchor {
    Anchor {
        theta_raw: theta.clone(),
        theta_norm: theta,
        witness: Witness {
            x0: vec![],
            lambda: vec![],
            robustness: -1.0,
            seed: 0,
            iteration: 0,
        },
    }
}

proptest! {
    #[test]
    fn domain_stays_an_antichain_and_grows(
        decreasing in any::<bool>(),
        points in proptest::collection::vec(proptest::collection::vec(0.0f64..=1.0, 3), 1..25),
    ) {
        let dir = if decreasing { Direction::Decreasing } else { Direction::Increasing };
        let mut d = FalsificationDomain::new(dir, 3).unwrap();
        let mut last = 0.0;
        for p in points {
            let before: Vec<Vec<f64>> = d.anchors().iter().map(|a| a.theta_norm.clone()).collect();
            d.insert(anchor(p.clone())).unwrap();
            prop_assert!(d.contains(&p));
            for q in before {
                prop_assert!(d.contains(&q));
            }
            let anchors = d.anchors();
            for (i, a) in anchors.iter().enumerate() {
                for (j, b) in anchors.iter().enumerate() {
                    if i != j {
                        prop_assert!(!precedes(&a.theta_norm, &b.theta_norm));
                    }
                }
            }
            let v = d.volume(2000, 5);
            prop_assert!(v >= last);
            last = v;
        }
    }
}
