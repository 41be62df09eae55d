use std::collections::BTreeMap;

use super::{BnError, Network};

/// Observation on one node.
#[derive(Debug, Clone, PartialEq)]
pub enum Finding {
    /// The node is known to be in this state.
    Hard(String),
    /// Likelihood of the observation for each state, in state order.
    /// Only ratios matter.
    Soft(Vec<f64>),
}

/// Per-node findings. Validated against a network at query time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Evidence {
    entries: BTreeMap<String, Finding>,
}

/// Evidence resolved against a network's indices.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Resolved {
    Hard(usize),
    Soft(Vec<f64>),
}

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_hard(mut self, node: impl Into<String>, state: impl Into<String>) -> Self {
        self.entries.insert(node.into(), Finding::Hard(state.into()));
        self
    }

    pub fn with_soft(mut self, node: impl Into<String>, likelihood: Vec<f64>) -> Self {
        self.entries.insert(node.into(), Finding::Soft(likelihood));
        self
    }

    pub fn insert(&mut self, node: impl Into<String>, finding: Finding) -> Option<Finding> {
        self.entries.insert(node.into(), finding)
    }

    pub fn remove(&mut self, node: &str) -> Option<Finding> {
        self.entries.remove(node)
    }

    pub fn get(&self, node: &str) -> Option<&Finding> {
        self.entries.get(node)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Finding)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `self` with every entry of `other` layered on top.
    pub fn overlaid(&self, other: &Evidence) -> Evidence {
        let mut out = self.clone();
        for (k, v) in &other.entries {
            out.entries.insert(k.clone(), v.clone());
        }
        out
    }

    pub fn validate(&self, net: &Network) -> Result<(), BnError> {
        self.resolve(net).map(|_| ())
    }

    pub(crate) fn resolve(&self, net: &Network) -> Result<Vec<(usize, Resolved)>, BnError> {
        let mut out = Vec::with_capacity(self.entries.len());
        for (id, finding) in &self.entries {
            let i = net.index_of(id).ok_or_else(|| BnError::UnknownNode(id.clone()))?;
            let node = net.node_at(i);
            let resolved = match finding {
                Finding::Hard(state) => Resolved::Hard(
                    node.states()
                        .index_of(state)
                        .ok_or_else(|| BnError::UnknownState { node: id.clone(), state: state.clone() })?,
                ),
                Finding::Soft(lik) => {
                    if lik.len() != node.card() {
                        return Err(BnError::InvalidEvidence {
                            node: id.clone(),
                            detail: format!("likelihood has {} entries, node has {} states", lik.len(), node.card()),
                        });
                    }
                    if lik.iter().any(|v| !v.is_finite() || *v < 0.0) {
                        return Err(BnError::InvalidEvidence {
                            node: id.clone(),
                            detail: "likelihood entries must be finite and nonnegative".into(),
                        });
                    }
                    if lik.iter().all(|v| *v == 0.0) {
                        return Err(BnError::InvalidEvidence {
                            node: id.clone(),
                            detail: "likelihood is all zero".into(),
                        });
                    }
                    Resolved::Soft(lik.clone())
                }
            };
            out.push((i, resolved));
        }
        Ok(out)
    }
}
