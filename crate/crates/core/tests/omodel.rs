mod common;

use std::collections::BTreeMap;

use ontic::omodel::{
    bayes_posterior, canonical_psi_ontic, classical_overlap, classify, discretized_qubit_model,
    fibonacci_sphere, model_distinguishability, ontologically_distinct, predicted_probability,
    reproduces_fragment, tv_distance, validate_model, FiniteDistribution, OntModel, ResponseFunction,
    ResponseOutcome,
};
use ontic::qcore::{
    inner_product, optimal_guess_probability, quantum_distinguishability, quantum_overlap, tensor, Experiment,
    Fragment, PureState,
};
use ontic::Tolerances;
use proptest::prelude::*;

fn coin() -> (BTreeMap<String, f64>, BTreeMap<(String, String), f64>) {
    let prior = [("P0".to_string(), 0.5), ("P1".to_string(), 0.5)].into();
    let mut c = BTreeMap::new();
    for (p, h) in [("P0", 0.5), ("P1", 2.0 / 3.0)] {
        c.insert((p.to_string(), "H".to_string()), h);
        c.insert((p.to_string(), "T".to_string()), 1.0 - h);
    }
    (prior, c)
}

#[test]
fn coin_posterior_factors() {
    let (prior, c) = coin();
    for (obs, factor) in [("H", 4.0 / 3.0), ("T", 2.0 / 3.0)] {
        let post = bayes_posterior(&prior, &c, obs).unwrap();
        let ratio = post["P1"] / post["P0"];
        assert!((ratio - factor).abs() < 1e-15, "{obs}: {ratio}");
    }
}

#[test]
fn equal_likelihoods_leave_prior() {
    let prior: BTreeMap<String, f64> = [("a".to_string(), 0.2), ("b".to_string(), 0.8)].into();
    let mut c = BTreeMap::new();
    for p in ["a", "b"] {
        c.insert((p.to_string(), "x".to_string()), 0.3);
        c.insert((p.to_string(), "y".to_string()), 0.7);
    }
    let post = bayes_posterior(&prior, &c, "x").unwrap();
    assert!((post["a"] - 0.2).abs() < 1e-15 && (post["b"] - 0.8).abs() < 1e-15);
}

#[test]
fn quantum_metric_values() {
    let (z, p) = (PureState::zero(), PureState::plus());
    let r = 0.5f64.sqrt();
    assert!((inner_product(&z, &p).unwrap().re - r).abs() < 1e-15);
    assert!((quantum_distinguishability(&z, &p).unwrap() - r).abs() < 1e-12);
    assert!((quantum_overlap(&z, &p).unwrap() - (1.0 - r)).abs() < 1e-12);
    assert!((optimal_guess_probability(&z, &p).unwrap() - (1.0 + r) / 2.0).abs() < 1e-12);
    assert_eq!(quantum_distinguishability(&z, &PureState::one()).unwrap(), 1.0);
    assert_eq!(optimal_guess_probability(&z, &z).unwrap(), 0.5);
    let zp = tensor(&z, &p);
    let pz = tensor(&p, &z);
    assert!((inner_product(&zp, &pz).unwrap().re - 0.5).abs() < 1e-15);
    // |<φ|ψ>| = 1/2 in dimension four.
    let a = PureState::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
    let b = PureState::from_real(&[0.5, 0.5, 0.5, 0.5]).unwrap();
    assert!((quantum_overlap(&a, &b).unwrap() - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-12);
}

#[test]
fn coin_distribution_metrics() {
    let p = FiniteDistribution(vec![0.5, 0.5]);
    let q = FiniteDistribution(vec![2.0 / 3.0, 1.0 / 3.0]);
    assert!((tv_distance(&p, &q).unwrap() - 1.0 / 6.0).abs() < 1e-15);
    assert!((classical_overlap(&p, &q).unwrap() - 5.0 / 6.0).abs() < 1e-15);
    assert!(!ontologically_distinct(&p, &q).unwrap());
    let (a, b) = (FiniteDistribution(vec![1.0, 0.0]), FiniteDistribution(vec![0.0, 1.0]));
    assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
    assert!(ontologically_distinct(&a, &b).unwrap());
}

#[test]
fn validation_flags_planted_defects() {
    let mut m = OntModel::new(2);
    m.preparations.insert("p".into(), FiniteDistribution(vec![1.1, -0.1]));
    m.experiments.insert(
        "e".into(),
        vec![
            ResponseOutcome { label: "a".into(), response: ResponseFunction(vec![0.6, 0.5]) },
            ResponseOutcome { label: "b".into(), response: ResponseFunction(vec![0.6, 0.5]) },
        ],
    );
    let v = validate_model(&m, &Tolerances::DEFAULT);
    assert_eq!(v.len(), 2, "{v:?}");
}

#[test]
fn perturbed_response_breaks_reproduction() {
    let f = Fragment::new(
        2,
        [("zero".to_string(), PureState::zero()), ("plus".to_string(), PureState::plus())].into(),
        [("z".to_string(), Experiment::computational(2))].into(),
    )
    .unwrap();
    let mut m = canonical_psi_ontic(&f).unwrap();
    assert!(reproduces_fragment(&m, &f, 1e-9).unwrap().reproduces);
    let outs = m.experiments.get_mut("z").unwrap();
    outs[0].response.0[1] += 0.05;
    outs[1].response.0[1] -= 0.05;
    let r = reproduces_fragment(&m, &f, 1e-9).unwrap();
    assert!(!r.reproduces);
    // "plus" is a point mass on ontic state 1.
    assert!((r.max_deviation - 0.05).abs() < 1e-12);
}

#[test]
fn canonical_classification() {
    let f = Fragment::new(
        2,
        [("zero".to_string(), PureState::zero()), ("plus".to_string(), PureState::plus())].into(),
        [("z".to_string(), Experiment::computational(2))].into(),
    )
    .unwrap();
    let c = classify(&canonical_psi_ontic(&f).unwrap(), &f).unwrap();
    assert!(c.psi_ontic && !c.maximally_psi_epistemic);
    let g = Fragment::new(
        2,
        [("zero".to_string(), PureState::zero()), ("one".to_string(), PureState::one())].into(),
        [("z".to_string(), Experiment::computational(2))].into(),
    )
    .unwrap();
    let m = canonical_psi_ontic(&g).unwrap();
    let c = classify(&m, &g).unwrap();
    assert!(c.psi_ontic && c.maximally_psi_epistemic);
    assert_eq!(model_distinguishability(&m, "zero", "one").unwrap(), 1.0);
}

#[test]
fn discretized_qubit_at_high_resolution() {
    let preps = [("zero".to_string(), PureState::zero()), ("plus".to_string(), PureState::plus())];
    let net = fibonacci_sphere(50);
    let (m, f) = discretized_qubit_model(100_000, &net, &preps).unwrap();
    let r = reproduces_fragment(&m, &f, 1e-2).unwrap();
    assert!(r.reproduces, "max deviation {}", r.max_deviation);
    let omega = classical_overlap(&m.preparations["zero"], &m.preparations["plus"]).unwrap();
    let oracle = common::sphere_overlap([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], 600);
    assert!((oracle - (1.0 - 0.5f64.sqrt())).abs() < 1e-4, "oracle {oracle}");
    assert!((omega - oracle).abs() < 2e-2, "omega {omega} oracle {oracle}");
    // Not ψ-ontic: the two preparations share support. `classify` itself
    // requires reproduction within 1e-6, which this discretization misses.
    assert!(!ontologically_distinct(&m.preparations["zero"], &m.preparations["plus"]).unwrap());
}

#[test]
fn discretized_zero_along_z_is_certain() {
    let preps = [("zero".to_string(), PureState::zero())];
    let (m, _) = discretized_qubit_model(1000, &[[0.0, 0.0, 1.0]], &preps).unwrap();
    assert!((predicted_probability(&m, "zero", "m0", "+").unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn distinguishability_improves_with_the_net() {
    let preps = [("zero".to_string(), PureState::zero()), ("plus".to_string(), PureState::plus())];
    let target = 0.5f64.sqrt();
    let mut last = f64::INFINITY;
    for n in [2, 20, 200] {
        let (m, _) = discretized_qubit_model(20_000, &fibonacci_sphere(n), &preps).unwrap();
        let d = model_distinguishability(&m, "zero", "plus").unwrap();
        assert!(d <= target + 1e-2);
        last = (target - d).abs().min(last);
    }
    assert!(last < 2e-2, "gap {last}");
}

#[test]
fn distinguishability_never_exceeds_tv_distance() {
    let mut r = common::rng(6);
    for _ in 0..500 {
        let m = common::random_model(&mut r);
        let names: Vec<&String> = m.preparations.keys().collect();
        for a in &names {
            for b in &names {
                let d = model_distinguishability(&m, a, b).unwrap();
                let t = tv_distance(&m.preparations[*a], &m.preparations[*b]).unwrap();
                assert!(d <= t + 1e-9, "{d} > {t}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn overlap_and_distance_are_complementary(seed in any::<u64>(), dim in 1usize..6) {
        let mut r = common::rng(seed);
        let a = common::random_state(&mut r, dim);
        let b = common::random_state(&mut r, dim);
        let sum = quantum_overlap(&a, &b).unwrap() + quantum_distinguishability(&a, &b).unwrap();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_is_min_sum(p in prop::collection::vec(0.0f64..1.0, 1..12), seed in any::<u64>()) {
        let s: f64 = p.iter().sum();
        prop_assume!(s > 1e-6);
        let mut r = common::rng(seed);
        let p = FiniteDistribution(p.iter().map(|x| x / s).collect());
        let q = common::random_dist(&mut r, p.len(), 0.2);
        let w = classical_overlap(&p, &q).unwrap();
        prop_assert!((w - common::min_sum(&p.0, &q.0)).abs() < 1e-12);
        prop_assert!((w + tv_distance(&p, &q).unwrap() - 1.0).abs() < 1e-12);
    }
}
