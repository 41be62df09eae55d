//! Fault trees compiled to binary Bayesian networks.
//!
//! Each basic event and gate becomes a node with states `["true", "false"]`,
//! `true` meaning "failed". Subtrees may be shared between gates.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bn::{query_posteriors, BnError, Evidence, Finding, Network, NodeSpec, StateSpace};
use crate::cpd::NoisyOrCpd;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasicEvent {
    pub id: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    And,
    Or,
    NoisyOr { q: Vec<f64>, leak: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub id: String,
    pub kind: GateKind,
    pub children: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaultTree {
    pub top: String,
    pub basic_events: Vec<BasicEvent>,
    pub gates: Vec<Gate>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FaultTreeError {
    #[error("duplicate id '{0}'")]
    DuplicateId(String),
    #[error("gate '{gate}' has unknown child '{child}'")]
    UnknownChild { gate: String, child: String },
    #[error("gate '{0}' has no children")]
    EmptyGate(String),
    #[error("top event '{0}' is not defined")]
    UnknownTop(String),
    #[error("'{0}' is not reachable from the top event")]
    Unreachable(String),
    #[error("basic event '{id}' has probability {p} outside [0, 1]")]
    ProbabilityOutOfRange { id: String, p: f64 },
    #[error("evidence must target only the top event '{top}', found '{node}'")]
    EvidenceNotOnTop { top: String, node: String },
    #[error(transparent)]
    Network(#[from] BnError),
}

/// Basic event with its prior and posterior failure probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauseRank {
    pub event: String,
    pub prior: f64,
    pub posterior: f64,
}

fn gate_table(kind: &GateKind, arity: usize) -> Vec<Vec<f64>> {
    // parent state 0 is "true"; row index is mixed radix, first child most significant
    (0..1usize << arity)
        .map(|row| {
            let failed = (0..arity).map(|i| (row >> (arity - 1 - i)) & 1 == 0);
            let out = match kind {
                GateKind::And => failed.into_iter().all(|f| f),
                GateKind::Or => failed.into_iter().any(|f| f),
                GateKind::NoisyOr { .. } => unreachable!("noisy-or gates use their own CPD"),
            };
            if out {
                vec![1.0, 0.0]
            } else {
                vec![0.0, 1.0]
            }
        })
        .collect()
}

impl FaultTree {
    pub fn validate(&self) -> Result<(), FaultTreeError> {
        let mut seen = HashSet::new();
        for id in self.basic_events.iter().map(|e| &e.id).chain(self.gates.iter().map(|g| &g.id)) {
            if !seen.insert(id.as_str()) {
                return Err(FaultTreeError::DuplicateId(id.clone()));
            }
        }
        for e in &self.basic_events {
            if !(0.0..=1.0).contains(&e.probability) {
                return Err(FaultTreeError::ProbabilityOutOfRange { id: e.id.clone(), p: e.probability });
            }
        }
        if !seen.contains(self.top.as_str()) {
            return Err(FaultTreeError::UnknownTop(self.top.clone()));
        }
        let gates: HashMap<&str, &Gate> = self.gates.iter().map(|g| (g.id.as_str(), g)).collect();
        for g in &self.gates {
            if g.children.is_empty() {
                return Err(FaultTreeError::EmptyGate(g.id.clone()));
            }
            if let Some(c) = g.children.iter().find(|c| !seen.contains(c.as_str())) {
                return Err(FaultTreeError::UnknownChild { gate: g.id.clone(), child: c.clone() });
            }
        }
        let mut reached = HashSet::new();
        let mut stack = vec![self.top.as_str()];
        while let Some(id) = stack.pop() {
            if reached.insert(id) {
                if let Some(g) = gates.get(id) {
                    stack.extend(g.children.iter().map(String::as_str));
                }
            }
        }
        if let Some(id) = self
            .basic_events
            .iter()
            .map(|e| &e.id)
            .chain(self.gates.iter().map(|g| &g.id))
            .find(|id| !reached.contains(id.as_str()))
        {
            return Err(FaultTreeError::Unreachable(id.clone()));
        }
        Ok(())
    }

    /// One binary node per event and gate. Cycles and bad Noisy-OR
    /// parameters surface as network errors.
    pub fn compile(&self) -> Result<Network, FaultTreeError> {
        self.validate()?;
        let mut specs = Vec::with_capacity(self.basic_events.len() + self.gates.len());
        for e in &self.basic_events {
            specs.push(
                NodeSpec::labeled(&e.id, StateSpace::binary()).table(vec![vec![e.probability, 1.0 - e.probability]]),
            );
        }
        for g in &self.gates {
            let spec = NodeSpec::labeled(&g.id, StateSpace::binary()).parents(g.children.iter().cloned());
            specs.push(match &g.kind {
                GateKind::NoisyOr { q, leak } => spec.cpd(NoisyOrCpd::new(q.clone(), *leak)),
                kind => spec.table(gate_table(kind, g.children.len())),
            });
        }
        Ok(Network::build(specs)?)
    }

    /// P(top = true) with no evidence.
    pub fn top_event_probability(&self) -> Result<f64, FaultTreeError> {
        let net = self.compile()?;
        let r = query_posteriors(&net, &Evidence::new(), &[self.top.as_str()])?;
        Ok(r.posteriors[0].probabilities[0])
    }

    /// Posterior failure probability of every basic event given an
    /// observation of the top event, highest first, ties by id.
    pub fn posterior_cause_ranking(&self, top_evidence: &Evidence) -> Result<Vec<CauseRank>, FaultTreeError> {
        if let Some((node, _)) = top_evidence.iter().find(|(n, _)| *n != self.top) {
            return Err(FaultTreeError::EvidenceNotOnTop { top: self.top.clone(), node: node.to_string() });
        }
        let net = self.compile()?;
        let ids: Vec<&str> = self.basic_events.iter().map(|e| e.id.as_str()).collect();
        let post = query_posteriors(&net, top_evidence, &ids)?;
        let mut out: Vec<CauseRank> = self
            .basic_events
            .iter()
            .zip(&post.posteriors)
            .map(|(e, p)| CauseRank { event: e.id.clone(), prior: e.probability, posterior: p.probabilities[0] })
            .collect();
        out.sort_by(|a, b| b.posterior.total_cmp(&a.posterior).then_with(|| a.event.cmp(&b.event)));
        Ok(out)
    }

    /// Convenience for a soft observation `(likelihood of true, likelihood
    /// of false)` on the top event.
    pub fn top_soft_evidence(&self, likelihood_true: f64, likelihood_false: f64) -> Evidence {
        let mut ev = Evidence::new();
        ev.insert(self.top.clone(), Finding::Soft(vec![likelihood_true, likelihood_false]));
        ev
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(id: &str, p: f64) -> BasicEvent {
        BasicEvent { id: id.into(), probability: p }
    }

    fn gate(id: &str, kind: GateKind, children: &[&str]) -> Gate {
        Gate { id: id.into(), kind, children: children.iter().map(|c| c.to_string()).collect() }
    }

    fn two_event(kind: GateKind, p1: f64, p2: f64) -> FaultTree {
        FaultTree { top: "top".into(), basic_events: vec![ev("e1", p1), ev("e2", p2)], gates: vec![gate("top", kind, &["e1", "e2"])] }
    }

    #[test]
    fn single_event_tree() {
        let ft = FaultTree { top: "e".into(), basic_events: vec![ev("e", 0.25)], gates: vec![] };
        assert_eq!(ft.compile().unwrap().len(), 1);
        assert_eq!(ft.top_event_probability().unwrap(), 0.25);
        let r = ft.posterior_cause_ranking(&Evidence::new().with_hard("e", "true")).unwrap();
        assert_eq!(r[0].posterior, 1.0);
    }

    #[test]
    fn or_and_closed_forms() {
        assert!((two_event(GateKind::Or, 0.1, 0.2).top_event_probability().unwrap() - 0.28).abs() < 1e-12);
        assert!((two_event(GateKind::And, 0.1, 0.2).top_event_probability().unwrap() - 0.02).abs() < 1e-12);
    }

    #[test]
    fn or_of_three() {
        let ft = FaultTree {
            top: "top".into(),
            basic_events: vec![ev("a", 0.1), ev("b", 0.1), ev("c", 0.1)],
            gates: vec![gate("top", GateKind::Or, &["a", "b", "c"])],
        };
        assert!((ft.top_event_probability().unwrap() - 0.271).abs() < 1e-12);
    }

    #[test]
    fn and_over_or_pairs() {
        let ft = FaultTree {
            top: "top".into(),
            basic_events: vec![ev("a", 0.1), ev("b", 0.1), ev("c", 0.2), ev("d", 0.2)],
            gates: vec![
                gate("g1", GateKind::Or, &["a", "b"]),
                gate("g2", GateKind::Or, &["c", "d"]),
                gate("top", GateKind::And, &["g1", "g2"]),
            ],
        };
        assert!((ft.top_event_probability().unwrap() - 0.19 * 0.36).abs() < 1e-12);
    }

    #[test]
    fn noisy_or_over_certain_events() {
        let ft = two_event(GateKind::NoisyOr { q: vec![0.2, 0.3], leak: 0.05 }, 1.0, 1.0);
        assert!((ft.top_event_probability().unwrap() - (1.0 - 0.95 * 0.06)).abs() < 1e-12);
    }

    #[test]
    fn ranking_prefers_likely_cause() {
        let ft = two_event(GateKind::Or, 0.01, 0.3);
        let r = ft.posterior_cause_ranking(&Evidence::new().with_hard("top", "true")).unwrap();
        assert_eq!(r[0].event, "e2");
        // enumeration: P(top) = 1 - 0.99 * 0.7 = 0.307
        assert!((r[0].posterior - 0.3 / 0.307).abs() < 1e-12);
        assert!((r[1].posterior - 0.01 / 0.307).abs() < 1e-12);
    }

    #[test]
    fn vacuous_soft_evidence_keeps_priors() {
        let ft = two_event(GateKind::Or, 0.01, 0.3);
        let r = ft.posterior_cause_ranking(&ft.top_soft_evidence(1.0, 1.0)).unwrap();
        assert!((r[0].posterior - 0.3).abs() < 1e-12);
        assert!((r[1].posterior - 0.01).abs() < 1e-12);
    }

    #[test]
    fn shared_subtree_counts_once() {
        // top = OR(g, g2) with g = AND(a, b) and g2 = AND(a, c): P = P(a) * P(b or c)
        let ft = FaultTree {
            top: "top".into(),
            basic_events: vec![ev("a", 0.5), ev("b", 0.2), ev("c", 0.4)],
            gates: vec![
                gate("g", GateKind::And, &["a", "b"]),
                gate("g2", GateKind::And, &["a", "c"]),
                gate("top", GateKind::Or, &["g", "g2"]),
            ],
        };
        let expected = 0.5 * (1.0 - 0.8 * 0.6);
        assert!((ft.top_event_probability().unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn validation_errors() {
        let mut ft = two_event(GateKind::Or, 0.1, 0.2);
        ft.gates[0].children.push("ghost".into());
        assert!(matches!(ft.validate(), Err(FaultTreeError::UnknownChild { .. })));

        let mut ft = two_event(GateKind::Or, 0.1, 1.2);
        assert!(matches!(ft.validate(), Err(FaultTreeError::ProbabilityOutOfRange { .. })));
        ft.basic_events[1].probability = 0.2;
        ft.basic_events.push(ev("orphan", 0.1));
        assert_eq!(ft.validate(), Err(FaultTreeError::Unreachable("orphan".into())));

        let ft = two_event(GateKind::Or, 0.1, 0.2);
        let bad = ft.posterior_cause_ranking(&Evidence::new().with_hard("e1", "true"));
        assert!(matches!(bad, Err(FaultTreeError::EvidenceNotOnTop { .. })));

        let cyclic = FaultTree {
            top: "g1".into(),
            basic_events: vec![ev("a", 0.1)],
            gates: vec![gate("g1", GateKind::Or, &["a", "g2"]), gate("g2", GateKind::Or, &["g1"])],
        };
        assert!(matches!(cyclic.compile(), Err(FaultTreeError::Network(BnError::CycleDetected(_)))));
    }
}
