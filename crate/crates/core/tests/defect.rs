use heisenbn::bn::{
    brute_force_joint, query_posteriors, Evidence, Finding, Interval, Network, NodeSpec, StateSpace,
    DEFAULT_TAIL_FACTOR,
};
use heisenbn::cpd::RankedCpd;
use heisenbn::defect::{
    ids, predict_with, Answer, DefectModelParams, DefectTemplate, ProjectScenario, DEVELOPMENT_DIMENSIONS,
    VERIFICATION_DIMENSIONS, COMPLEXITY_DIMENSIONS,
};
use heisenbn_testkit::{random_scenario, rng};
use proptest::prelude::*;

fn template() -> DefectTemplate {
    DefectTemplate::new(DefectModelParams::default()).unwrap()
}

fn mean(net: &Network, ev: &Evidence, node: &str) -> f64 {
    query_posteriors(net, ev, &[node]).unwrap().posteriors[0].mean.unwrap()
}

fn scenario_mean(t: &DefectTemplate, s: &ProjectScenario, node: &str) -> f64 {
    let dn = t.instantiate(s).unwrap();
    mean(&dn.network, &dn.evidence, node)
}

/// Point answers: verification dimensions at `v`, development at `d`,
/// complexity at `c`.
fn graded(v: usize, d: usize, c: usize, kloc: f64) -> ProjectScenario {
    let mut s = ProjectScenario::uniform(2, kloc, 8000.0, Answer::point(3));
    for dim in VERIFICATION_DIMENSIONS {
        s.answers.insert(dim.into(), Answer::point(v));
    }
    for dim in DEVELOPMENT_DIMENSIONS {
        s.answers.insert(dim.into(), Answer::point(d));
    }
    for dim in COMPLEXITY_DIMENSIONS {
        s.answers.insert(dim.into(), Answer::point(c));
    }
    s.complexity = Answer::point(c);
    s
}

#[test]
fn zero_usage_means_no_field_defects() {
    let t = template();
    let mut r = rng(11);
    for i in 0..50 {
        let mut s = random_scenario(&mut r);
        s.usage = Answer::point(0);
        let report = predict_with(&t, &s).unwrap();
        let field = report.get(ids::FIELD_DEFECTS).unwrap();
        assert_eq!(field.probabilities[0], 1.0, "scenario {i}");
        assert!(field.probabilities[1..].iter().all(|&p| p == 0.0));
    }
}

#[test]
fn better_verification_never_raises_field_defects() {
    let t = template();
    for d in 0..5 {
        for c in 0..5 {
            let field: Vec<f64> = (0..5).map(|v| scenario_mean(&t, &graded(v, d, c, 20.0), ids::FIELD_DEFECTS)).collect();
            assert!(field.windows(2).all(|w| w[1] <= w[0] + 1e-12), "d={d} c={c}: {field:?}");
        }
    }
}

#[test]
fn more_code_never_lowers_inserted_defects() {
    let t = template();
    let ladder = [0.5, 2.0, 8.0, 20.0, 60.0, 150.0, 400.0];
    for d in 0..5 {
        for c in 0..5 {
            let inserted: Vec<f64> =
                ladder.iter().map(|&k| scenario_mean(&t, &graded(2, d, c, k), ids::DEFECTS_INSERTED)).collect();
            assert!(inserted.windows(2).all(|w| w[1] >= w[0] - 1e-12), "d={d} c={c}: {inserted:?}");
        }
    }
}

fn max_found(net: &Network, ev: &Evidence) -> Evidence {
    let labels = net.node(ids::DEFECTS_FOUND).unwrap().states().labels();
    let mut ev = ev.clone();
    ev.insert(ids::DEFECTS_FOUND, Finding::Hard(labels.last().unwrap().clone()));
    ev
}

#[test]
fn maximal_found_count_raises_inserted_on_template() {
    let t = template();
    let mut r = rng(5);
    let mut scenarios = vec![ProjectScenario::uniform(2, 10.0, 3000.0, Answer::point(2))];
    scenarios.extend((0..10).map(|_| random_scenario(&mut r)));
    for s in &scenarios {
        let dn = t.instantiate(s).unwrap();
        let prior = mean(&dn.network, &dn.evidence, ids::DEFECTS_INSERTED);
        let post = mean(&dn.network, &max_found(&dn.network, &dn.evidence), ids::DEFECTS_INSERTED);
        assert!(post >= prior, "{post} < {prior}");
    }
}

fn three_intervals() -> Vec<Interval> {
    vec![Interval::bounded(0, 4), Interval::bounded(5, 19), Interval::unbounded(20)]
}

#[test]
fn maximal_found_count_raises_inserted_on_three_interval_template() {
    let params = DefectModelParams { count_intervals: three_intervals(), ..DefectModelParams::default() };
    let t = DefectTemplate::new(params).unwrap();
    for kloc in [0.5, 3.0, 12.0] {
        let dn = t.instantiate(&ProjectScenario::uniform(2, kloc, 3000.0, Answer::point(2))).unwrap();
        let prior = mean(&dn.network, &dn.evidence, ids::DEFECTS_INSERTED);
        let post = mean(&dn.network, &max_found(&dn.network, &dn.evidence), ids::DEFECTS_INSERTED);
        assert!(post >= prior, "kloc {kloc}: {post} < {prior}");
    }
}

/// Development and verification quality feeding the three-interval count
/// chain, small enough to enumerate.
fn reduced_chain() -> Network {
    let counts = StateSpace::counts(three_intervals()).unwrap();
    Network::build(vec![
        NodeSpec::ranked("dq").uniform(1),
        NodeSpec::ranked("vq").uniform(1),
        NodeSpec::ranked("answer").parents(["vq"]).cpd(RankedCpd::new(vec![1.0], 0.01)),
        NodeSpec::count("inserted", counts.clone()).parents(["dq"]).cpd(heisenbn::cpd::Cpd::Poisson {
            rates: vec![24.0, 12.0, 6.0, 3.0, 1.5],
        }),
        NodeSpec::count("found", counts.clone())
            .parents(["inserted", "vq"])
            .cpd(heisenbn::cpd::Cpd::Binomial { p: vec![0.3, 0.5, 0.7, 0.85, 0.95] }),
        NodeSpec::count("residual", counts).parents(["inserted", "found"]).cpd(heisenbn::cpd::Cpd::Subtract),
    ])
    .unwrap()
}

fn representative_mean(net: &Network, node: &str, probs: &[f64]) -> f64 {
    let reps = net.node(node).unwrap().states().representatives(DEFAULT_TAIL_FACTOR).unwrap();
    reps.iter().zip(probs).map(|(r, p)| r * p).sum()
}

#[test]
fn reduced_chain_backward_coherence_by_enumeration() {
    let net = reduced_chain();
    for answer in ["VeryLow", "Medium", "VeryHigh"] {
        let base = Evidence::new().with_hard("answer", answer);
        let observed = base.clone().with_hard("found", "20+");
        let prior_exact = brute_force_joint(&net, &base).unwrap().marginal("inserted").unwrap();
        let post_exact = brute_force_joint(&net, &observed).unwrap().marginal("inserted").unwrap();
        let post_ve = query_posteriors(&net, &observed, &["inserted"]).unwrap().posteriors[0].probabilities.clone();
        for (a, b) in post_exact.iter().zip(&post_ve) {
            assert!((a - b).abs() < 1e-10);
        }
        let prior = representative_mean(&net, "inserted", &prior_exact);
        let post = representative_mean(&net, "inserted", &post_exact);
        assert!(post >= prior, "{answer}: {post} < {prior}");
        assert!((post - mean(&net, &observed, "inserted")).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn predictions_are_distributions(seed in any::<u64>()) {
        let s = random_scenario(&mut rng(seed));
        let report = predict_with(&template(), &s).unwrap();
        for p in &report.posteriors {
            prop_assert!((p.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(p.mean.unwrap() >= 0.0);
        }
    }

    #[test]
    fn field_defects_never_exceed_residual_on_average(seed in any::<u64>()) {
        let s = random_scenario(&mut rng(seed));
        let t = template();
        let dn = t.instantiate(&s).unwrap();
        let residual = mean(&dn.network, &dn.evidence, ids::RESIDUAL_DEFECTS);
        let field = mean(&dn.network, &dn.evidence, ids::FIELD_DEFECTS);
        prop_assert!(field <= residual + 1e-9);
    }
}
