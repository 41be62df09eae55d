use heisenbn::bn::{
    brute_force_joint_with_cap, query_posteriors, query_posteriors_with, BnError, EliminationOrder, Evidence, Finding,
    InferenceOptions, Network,
};
use heisenbn_testkit::{random_evidence, random_network, rng};
use proptest::prelude::*;

fn all_ids(net: &Network) -> Vec<&str> {
    net.nodes().iter().map(|n| n.id()).collect()
}

/// Largest absolute difference between elimination and enumeration over
/// every marginal, or the shared error when the evidence is impossible.
fn compare_with_oracle(net: &Network, ev: &Evidence) -> Result<f64, BnError> {
    let ids = all_ids(net);
    let joint = brute_force_joint_with_cap(net, ev, 1 << 24)?;
    let exact: Result<Vec<Vec<f64>>, BnError> = ids.iter().map(|id| joint.marginal(id)).collect();
    match (query_posteriors(net, ev, &ids), exact) {
        (Ok(report), Ok(exact)) => {
            let mut worst = 0.0f64;
            for (p, e) in report.posteriors.iter().zip(&exact) {
                for (a, b) in p.probabilities.iter().zip(e) {
                    worst = worst.max((a - b).abs());
                }
            }
            Ok(worst)
        }
        (Err(a), Err(b)) if a == b => Err(a),
        (a, b) => panic!("elimination and enumeration disagree: {:?} vs {:?}", a.err(), b.err()),
    }
}

#[test]
fn two_hundred_seeded_networks_match_enumeration() {
    let mut checked = 0;
    for seed in 0..200u64 {
        let mut r = rng(seed);
        let net = random_network(&mut r, 12, 4);
        let ev = random_evidence(&mut r, &net);
        match compare_with_oracle(&net, &ev) {
            Ok(worst) => {
                assert!(worst < 1e-10, "seed {seed}: {worst:e}");
                checked += 1;
            }
            Err(BnError::ZeroProbabilityEvidence) => {}
            Err(e) => panic!("seed {seed}: {e}"),
        }
    }
    assert!(checked > 150);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn elimination_matches_enumeration(seed in any::<u64>()) {
        let mut r = rng(seed);
        let net = random_network(&mut r, 10, 4);
        let ev = random_evidence(&mut r, &net);
        if let Ok(worst) = compare_with_oracle(&net, &ev) {
            prop_assert!(worst < 1e-10);
        }
    }

    #[test]
    fn soft_evidence_is_scale_invariant(seed in any::<u64>(), scale in 1e-3f64..1e3) {
        let mut r = rng(seed);
        let net = random_network(&mut r, 10, 4);
        let ev = random_evidence(&mut r, &net);
        let mut scaled = Evidence::new();
        for (id, f) in ev.iter() {
            scaled.insert(id, match f {
                Finding::Soft(v) => Finding::Soft(v.iter().map(|x| x * scale).collect()),
                hard => hard.clone(),
            });
        }
        let ids = all_ids(&net);
        if let (Ok(a), Ok(b)) = (query_posteriors(&net, &ev, &ids), query_posteriors(&net, &scaled, &ids)) {
            for (pa, pb) in a.posteriors.iter().zip(&b.posteriors) {
                for (x, y) in pa.probabilities.iter().zip(&pb.probabilities) {
                    prop_assert!((x - y).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn elimination_order_does_not_matter(seed in any::<u64>()) {
        let mut r = rng(seed);
        let net = random_network(&mut r, 10, 4);
        let ev = random_evidence(&mut r, &net);
        let ids = all_ids(&net);
        let orders = [
            EliminationOrder::MinFill,
            EliminationOrder::MinDegree,
            EliminationOrder::Topological,
            EliminationOrder::ReverseTopological,
        ];
        let results: Vec<_> = orders
            .iter()
            .map(|&order| query_posteriors_with(&net, &ev, &ids, InferenceOptions { order }))
            .collect();
        match &results[0] {
            Ok(first) => {
                for other in &results[1..] {
                    let other = other.as_ref().unwrap();
                    for (pa, pb) in first.posteriors.iter().zip(&other.posteriors) {
                        for (x, y) in pa.probabilities.iter().zip(&pb.probabilities) {
                            prop_assert!((x - y).abs() < 1e-10);
                        }
                    }
                }
            }
            Err(e) => prop_assert!(results.iter().all(|r| r.as_ref().err() == Some(e))),
        }
    }

    #[test]
    fn uniform_soft_evidence_is_vacuous(seed in any::<u64>(), node in 0usize..12, weight in 0.01f64..100.0) {
        let mut r = rng(seed);
        let net = random_network(&mut r, 12, 4);
        let n = net.node_at(node % net.len());
        let ev = Evidence::new().with_soft(n.id(), vec![weight; n.card()]);
        let ids = all_ids(&net);
        let prior = query_posteriors(&net, &Evidence::new(), &ids).unwrap();
        let post = query_posteriors(&net, &ev, &ids).unwrap();
        for (pa, pb) in prior.posteriors.iter().zip(&post.posteriors) {
            for (x, y) in pa.probabilities.iter().zip(&pb.probabilities) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn posteriors_are_distributions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let net = random_network(&mut r, 12, 4);
        let ev = random_evidence(&mut r, &net);
        if let Ok(report) = query_posteriors(&net, &ev, &all_ids(&net)) {
            for p in &report.posteriors {
                prop_assert!(p.probabilities.iter().all(|&x| (0.0..=1.0).contains(&x)));
                prop_assert!((p.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            for (id, f) in ev.iter() {
                if let Finding::Hard(s) = f {
                    let p = report.get(id).unwrap();
                    let i = p.states.iter().position(|x| x == s).unwrap();
                    prop_assert_eq!(p.probabilities[i], 1.0);
                }
            }
        }
    }
}
