//! Exact inference by variable elimination.
//!
//! Only the ancestral closure of the query and evidence nodes takes part;
//! every other node is barren and sums out to one. Hard evidence reduces
//! factors directly, soft evidence enters as a unary likelihood factor.

use super::factor::Factor;
use super::{BnError, Evidence, Network, NodePosterior, PosteriorReport, Resolved};

/// Heuristic used to order the eliminated variables. Results do not depend
/// on it, only cost does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EliminationOrder {
    /// Fewest fill-in edges first, ties broken by node id.
    #[default]
    MinFill,
    /// Fewest neighbours first, ties broken by node id.
    MinDegree,
    /// Roots first.
    Topological,
    /// Leaves first.
    ReverseTopological,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct InferenceOptions {
    pub order: EliminationOrder,
}

/// Normalized joint posterior over a set of query nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPosterior {
    /// Node indices, in query order.
    pub nodes: Vec<usize>,
    pub cards: Vec<usize>,
    /// Row-major, last node fastest.
    pub probabilities: Vec<f64>,
    /// Unnormalized mass of the evidence, soft likelihoods included.
    pub evidence_probability: f64,
}

impl JointPosterior {
    /// Marginal of the `k`-th query node.
    pub fn marginal(&self, k: usize) -> Vec<f64> {
        let inner: usize = self.cards[k + 1..].iter().product();
        let card = self.cards[k];
        let mut out = vec![0.0; card];
        for (i, p) in self.probabilities.iter().enumerate() {
            out[(i / inner) % card] += p;
        }
        out
    }
}

pub(crate) fn eliminate(
    net: &Network,
    evidence: &[(usize, Resolved)],
    keep: &[usize],
    opts: InferenceOptions,
) -> Result<(Factor, f64), BnError> {
    let n = net.len();
    let mut hard: Vec<Option<usize>> = vec![None; n];
    let mut soft: Vec<Option<&[f64]>> = vec![None; n];
    let mut scale = 1.0;
    let is_kept = |i: usize| keep.contains(&i);
    for (i, r) in evidence {
        match r {
            Resolved::Hard(s) => hard[*i] = Some(*s),
            Resolved::Soft(lik) => {
                let mut nonzero = lik.iter().enumerate().filter(|(_, v)| **v != 0.0);
                match (nonzero.next(), nonzero.next()) {
                    // a one-hot likelihood is hard evidence scaled by its value
                    (Some((s, v)), None) => {
                        hard[*i] = Some(s);
                        scale *= v;
                    }
                    _ => soft[*i] = Some(lik),
                }
            }
        }
    }

    let relevant = net.ancestral_closure(keep.iter().copied().chain(evidence.iter().map(|(i, _)| *i)));
    let mut factors: Vec<Factor> = Vec::new();
    for i in (0..n).filter(|&i| relevant[i]) {
        let node = net.node_at(i);
        let parent_cards: Vec<usize> = node.parents().iter().map(|&p| net.node_at(p).card()).collect();
        let mut f = Factor::from_cpt(i, node.parents(), &parent_cards, node.cpt());
        for &v in node.parents().iter().chain(std::iter::once(&i)) {
            if let (Some(s), false) = (hard[v], is_kept(v)) {
                f = f.reduce(v, s);
            }
        }
        factors.push(f);
        if let Some(lik) = soft[i] {
            factors.push(Factor::unary(i, lik.to_vec()));
        }
        if let (Some(s), true) = (hard[i], is_kept(i)) {
            let mut ind = vec![0.0; node.card()];
            ind[s] = 1.0;
            factors.push(Factor::unary(i, ind));
        }
    }

    let elim: Vec<usize> = (0..n).filter(|&i| relevant[i] && !is_kept(i) && hard[i].is_none()).collect();
    for v in elimination_order(net, &factors, &elim, opts.order) {
        let (with, without): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.contains(v));
        factors = without;
        if let Some(prod) = with.into_iter().reduce(|a, b| a.product(&b)) {
            factors.push(prod.sum_out(v));
        }
    }
    let mut result = factors.into_iter().fold(Factor::scalar(1.0), |acc, f| acc.product(&f));
    result = result.permuted(keep);
    let total = result.sum();
    let z = total * scale;
    if !(z > 0.0 && z.is_finite()) {
        return Err(BnError::ZeroProbabilityEvidence);
    }
    let values: Vec<f64> = result.values().iter().map(|v| v / total).collect();
    let cards: Vec<usize> = keep.iter().map(|&k| net.node_at(k).card()).collect();
    Ok((Factor::new(keep.to_vec(), cards, values), z))
}

fn elimination_order(net: &Network, factors: &[Factor], elim: &[usize], heuristic: EliminationOrder) -> Vec<usize> {
    match heuristic {
        EliminationOrder::Topological | EliminationOrder::ReverseTopological => {
            let mut order: Vec<usize> = net.topological_order().iter().copied().filter(|v| elim.contains(v)).collect();
            if heuristic == EliminationOrder::ReverseTopological {
                order.reverse();
            }
            order
        }
        EliminationOrder::MinFill | EliminationOrder::MinDegree => {
            let n = net.len();
            let mut adj = vec![vec![false; n]; n];
            for f in factors {
                for &a in f.vars() {
                    for &b in f.vars() {
                        if a != b {
                            adj[a][b] = true;
                        }
                    }
                }
            }
            let mut remaining: Vec<usize> = elim.to_vec();
            let mut alive = vec![true; n];
            let mut order = Vec::with_capacity(elim.len());
            while !remaining.is_empty() {
                let score = |v: usize| -> usize {
                    let nb: Vec<usize> = (0..n).filter(|&u| alive[u] && adj[v][u]).collect();
                    match heuristic {
                        EliminationOrder::MinDegree => nb.len(),
                        _ => {
                            let mut fill = 0;
                            for (k, &a) in nb.iter().enumerate() {
                                fill += nb[k + 1..].iter().filter(|&&b| !adj[a][b]).count();
                            }
                            fill
                        }
                    }
                };
                let (pos, &v) = remaining
                    .iter()
                    .enumerate()
                    .min_by(|(_, &a), (_, &b)| {
                        score(a).cmp(&score(b)).then_with(|| net.node_at(a).id().cmp(net.node_at(b).id()))
                    })
                    .expect("non-empty");
                let nb: Vec<usize> = (0..n).filter(|&u| alive[u] && adj[v][u]).collect();
                for &a in &nb {
                    for &b in &nb {
                        if a != b {
                            adj[a][b] = true;
                        }
                    }
                }
                alive[v] = false;
                remaining.swap_remove(pos);
                order.push(v);
            }
            order
        }
    }
}

fn resolve_targets(net: &Network, targets: &[&str]) -> Result<Vec<usize>, BnError> {
    targets
        .iter()
        .map(|t| net.index_of(t).ok_or_else(|| BnError::UnknownNode(t.to_string())))
        .collect()
}

/// Exact joint posterior over distinct `targets` given `ev`.
pub fn joint_posterior(
    net: &Network,
    ev: &Evidence,
    targets: &[&str],
    opts: InferenceOptions,
) -> Result<JointPosterior, BnError> {
    let keep = resolve_targets(net, targets)?;
    for (k, t) in keep.iter().enumerate() {
        if keep[..k].contains(t) {
            return Err(BnError::InvalidEvidence {
                node: net.node_at(*t).id().to_string(),
                detail: "query node listed twice".into(),
            });
        }
    }
    let resolved = ev.resolve(net)?;
    let (f, z) = eliminate(net, &resolved, &keep, opts)?;
    let cards = keep.iter().map(|&k| net.node_at(k).card()).collect();
    Ok(JointPosterior { nodes: keep, cards, probabilities: f.values().to_vec(), evidence_probability: z })
}

/// Posterior marginals of each target, with interval summaries for count
/// nodes.
pub fn query_posteriors(net: &Network, ev: &Evidence, targets: &[&str]) -> Result<PosteriorReport, BnError> {
    query_posteriors_with(net, ev, targets, InferenceOptions::default())
}

pub fn query_posteriors_with(
    net: &Network,
    ev: &Evidence,
    targets: &[&str],
    opts: InferenceOptions,
) -> Result<PosteriorReport, BnError> {
    let idx = resolve_targets(net, targets)?;
    let resolved = ev.resolve(net)?;
    let mut posteriors = Vec::with_capacity(idx.len());
    for &i in &idx {
        let (f, _) = eliminate(net, &resolved, &[i], opts)?;
        posteriors.push(NodePosterior::new(net, i, f.values().to_vec()));
    }
    Ok(PosteriorReport { posteriors })
}

/// Unnormalized probability of the evidence (soft likelihoods included).
pub fn evidence_probability(net: &Network, ev: &Evidence) -> Result<f64, BnError> {
    let resolved = ev.resolve(net)?;
    eliminate(net, &resolved, &[], InferenceOptions::default()).map(|(_, z)| z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{NodeSpec, StateSpace};

    fn chain() -> Network {
        Network::build(vec![
            NodeSpec::labeled("A", StateSpace::binary()).table(vec![vec![0.3, 0.7]]),
            NodeSpec::labeled("B", StateSpace::binary()).parents(["A"]).table(vec![vec![0.9, 0.1], vec![0.2, 0.8]]),
        ])
        .unwrap()
    }

    #[test]
    fn chain_prior() {
        let r = query_posteriors(&chain(), &Evidence::new(), &["B"]).unwrap();
        assert!((r.posteriors[0].probabilities[0] - 0.41).abs() < 1e-15);
    }

    #[test]
    fn chain_diagnosis() {
        let ev = Evidence::new().with_hard("B", "true");
        let r = query_posteriors(&chain(), &ev, &["A"]).unwrap();
        assert!((r.posteriors[0].probabilities[0] - 0.27 / 0.41).abs() < 1e-15);
        assert!((r.posteriors[0].probabilities[0] - 0.6585).abs() < 1e-4);
        assert!((evidence_probability(&chain(), &ev).unwrap() - 0.41).abs() < 1e-15);
    }

    #[test]
    fn conditioning_on_target() {
        let ev = Evidence::new().with_hard("A", "false");
        let r = query_posteriors(&chain(), &ev, &["A"]).unwrap();
        assert_eq!(r.posteriors[0].probabilities, vec![0.0, 1.0]);
    }

    #[test]
    fn impossible_evidence() {
        let net = Network::build(vec![
            NodeSpec::labeled("A", StateSpace::binary()).table(vec![vec![1.0, 0.0]]),
            NodeSpec::labeled("B", StateSpace::binary()).parents(["A"]).table(vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
        ])
        .unwrap();
        let ev = Evidence::new().with_hard("B", "false");
        assert_eq!(query_posteriors(&net, &ev, &["A"]).unwrap_err(), BnError::ZeroProbabilityEvidence);
    }

    #[test]
    fn joint_over_two_nodes() {
        let j = joint_posterior(&chain(), &Evidence::new(), &["A", "B"], InferenceOptions::default()).unwrap();
        let expected = [0.27, 0.03, 0.14, 0.56];
        for (a, b) in j.probabilities.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let rev = joint_posterior(&chain(), &Evidence::new(), &["B", "A"], InferenceOptions::default()).unwrap();
        assert!((rev.probabilities[1] - 0.14).abs() < 1e-15);
        assert!((j.marginal(1)[0] - 0.41).abs() < 1e-15);
    }

    #[test]
    fn unknown_target() {
        assert_eq!(
            query_posteriors(&chain(), &Evidence::new(), &["Z"]).unwrap_err(),
            BnError::UnknownNode("Z".into())
        );
    }
}
