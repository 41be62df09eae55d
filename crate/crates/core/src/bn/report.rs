use serde::Serialize;

use super::{BnError, Network};

/// Posterior marginal of one node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodePosterior {
    pub node: String,
    pub states: Vec<String>,
    pub probabilities: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variance: Option<f64>,
    #[serde(skip)]
    representatives: Option<Vec<f64>>,
}

impl NodePosterior {
    pub(crate) fn new(net: &Network, i: usize, probabilities: Vec<f64>) -> Self {
        let node = net.node_at(i);
        let representatives = node.states().representatives(net.tail_factor());
        Self::with_representatives(node.id(), node.states().labels().to_vec(), probabilities, representatives)
    }

    /// Build from raw parts; mean and variance are filled in when
    /// representatives are given.
    pub fn with_representatives(
        node: impl Into<String>,
        states: Vec<String>,
        probabilities: Vec<f64>,
        representatives: Option<Vec<f64>>,
    ) -> Self {
        let (mean, variance) = match &representatives {
            Some(reps) => {
                let (m, v) = moments(&probabilities, reps);
                (Some(m), Some(v))
            }
            None => (None, None),
        };
        NodePosterior { node: node.into(), states, probabilities, mean, variance, representatives }
    }

    pub fn representatives(&self) -> Option<&[f64]> {
        self.representatives.as_deref()
    }

    /// Index of the most probable state (first on ties).
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.probabilities.iter().enumerate() {
            if *p > self.probabilities[best] {
                best = i;
            }
        }
        best
    }

    pub fn probability_of(&self, state: &str) -> Option<f64> {
        self.states.iter().position(|s| s == state).map(|i| self.probabilities[i])
    }
}

fn moments(p: &[f64], reps: &[f64]) -> (f64, f64) {
    let mean: f64 = p.iter().zip(reps).map(|(p, r)| p * r).sum();
    let var: f64 = p.iter().zip(reps).map(|(p, r)| p * (r - mean).powi(2)).sum();
    (mean, var)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorReport {
    pub posteriors: Vec<NodePosterior>,
}

impl PosteriorReport {
    pub fn get(&self, node: &str) -> Option<&NodePosterior> {
        self.posteriors.iter().find(|p| p.node == node)
    }
}

/// Mean and variance of a count node's posterior on interval
/// representatives.
pub fn interval_expectation(report: &PosteriorReport, node: &str) -> Result<(f64, f64), BnError> {
    let p = report.get(node).ok_or_else(|| BnError::UnknownNode(node.to_string()))?;
    let reps = p.representatives().ok_or_else(|| BnError::NotAnIntervalNode(node.to_string()))?;
    Ok(moments(&p.probabilities, reps))
}
