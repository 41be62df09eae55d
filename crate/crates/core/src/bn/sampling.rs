use rand::Rng;

use super::{BnError, Evidence, Network, Resolved};

fn draw<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    // round-off: last state with positive weight
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(weights.len() - 1)
}

/// Draw one joint configuration (state index per node).
///
/// Evidence may only sit on root nodes; roots are then independent, so each
/// observed root is drawn from its prior reweighted by the likelihood and
/// the rest of the network follows its CPTs.
pub fn ancestral_sample<R: Rng + ?Sized>(net: &Network, ev: &Evidence, rng: &mut R) -> Result<Vec<usize>, BnError> {
    let mut lik: Vec<Option<Vec<f64>>> = vec![None; net.len()];
    for (i, r) in ev.resolve(net)? {
        let node = net.node_at(i);
        if !node.parents().is_empty() {
            return Err(BnError::InvalidEvidence {
                node: node.id().to_string(),
                detail: "ancestral sampling only accepts evidence on root nodes".into(),
            });
        }
        lik[i] = Some(match r {
            Resolved::Hard(s) => (0..node.card()).map(|k| if k == s { 1.0 } else { 0.0 }).collect(),
            Resolved::Soft(l) => l,
        });
    }
    let mut state = vec![0usize; net.len()];
    for &i in net.topological_order() {
        let node = net.node_at(i);
        let mut row = 0;
        for &p in node.parents() {
            row = row * net.node_at(p).card() + state[p];
        }
        let probs = node.cpt().row(row);
        state[i] = match &lik[i] {
            Some(l) => {
                let w: Vec<f64> = probs.iter().zip(l).map(|(p, l)| p * l).collect();
                if w.iter().all(|v| *v == 0.0) {
                    return Err(BnError::ZeroProbabilityEvidence);
                }
                draw(&w, rng)
            }
            None => draw(probs, rng),
        };
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{NodeSpec, StateSpace};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frequencies_follow_the_chain() {
        let net = Network::build(vec![
            NodeSpec::labeled("A", StateSpace::binary()).table(vec![vec![0.3, 0.7]]),
            NodeSpec::labeled("B", StateSpace::binary()).parents(["A"]).table(vec![vec![0.9, 0.1], vec![0.2, 0.8]]),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| ancestral_sample(&net, &Evidence::new(), &mut rng).unwrap()[1] == 0)
            .count();
        let freq = hits as f64 / n as f64;
        // sd of the estimate is about 0.0016
        assert!((freq - 0.41).abs() < 0.01, "{freq}");
    }

    #[test]
    fn rejects_evidence_below_roots() {
        let net = Network::build(vec![
            NodeSpec::labeled("A", StateSpace::binary()).table(vec![vec![0.3, 0.7]]),
            NodeSpec::labeled("B", StateSpace::binary()).parents(["A"]).table(vec![vec![0.9, 0.1], vec![0.2, 0.8]]),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ev = Evidence::new().with_hard("B", "true");
        assert!(ancestral_sample(&net, &ev, &mut rng).is_err());
        let ev = Evidence::new().with_hard("A", "false");
        for _ in 0..20 {
            assert_eq!(ancestral_sample(&net, &ev, &mut rng).unwrap()[0], 1);
        }
    }
}
