use serde::{Deserialize, Serialize};

use super::{check_probability, decode_row, parent_configurations, Cpd, CpdError, Cpt};
use crate::bn::StateSpace;

/// Noisy-OR over binary parents.
///
/// Each true parent `i` independently fails to trigger the child with its
/// inhibitor probability `q[i]`; the leak triggers the child with no cause.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisyOrCpd {
    pub q: Vec<f64>,
    pub leak: f64,
}

impl NoisyOrCpd {
    pub fn new(q: Vec<f64>, leak: f64) -> Self {
        NoisyOrCpd { q, leak }
    }

    /// P(child = false) given which parents are true.
    pub fn prob_false(&self, active: impl IntoIterator<Item = bool>) -> f64 {
        self.q
            .iter()
            .zip(active)
            .filter(|(_, on)| *on)
            .fold(1.0 - self.leak, |acc, (q, _)| acc * q)
    }
}

impl From<NoisyOrCpd> for Cpd {
    fn from(c: NoisyOrCpd) -> Self {
        Cpd::NoisyOr(c)
    }
}

fn binary_indices(space: &StateSpace, what: &str) -> Result<(usize, usize), CpdError> {
    match (space.len(), space.index_of("true"), space.index_of("false")) {
        (2, Some(t), Some(f)) => Ok((t, f)),
        _ => Err(CpdError::ShapeMismatch(format!(
            "noisy-or {what} must have exactly the states \"true\" and \"false\""
        ))),
    }
}

/// Expand a Noisy-OR into its tabular CPT.
pub fn expand_noisy_or(
    cpd: &NoisyOrCpd,
    child: &StateSpace,
    parents: &[&StateSpace],
) -> Result<Cpt, CpdError> {
    if cpd.q.len() != parents.len() {
        return Err(CpdError::ShapeMismatch(format!(
            "{} inhibitors for {} parents",
            cpd.q.len(),
            parents.len()
        )));
    }
    for (i, &q) in cpd.q.iter().enumerate() {
        check_probability(&format!("q[{i}]"), q)?;
    }
    check_probability("leak", cpd.leak)?;

    let (child_true, child_false) = binary_indices(child, "child")?;
    let parent_true = parents
        .iter()
        .map(|p| binary_indices(p, "parent").map(|(t, _)| t))
        .collect::<Result<Vec<_>, _>>()?;

    let cards: Vec<usize> = parents.iter().map(|p| p.len()).collect();
    let rows = parent_configurations(parents);
    let mut states = vec![0; parents.len()];
    let mut values = vec![0.0; rows * 2];
    for r in 0..rows {
        decode_row(r, &cards, &mut states);
        let p_false = cpd.prob_false(states.iter().zip(&parent_true).map(|(s, t)| s == t));
        values[r * 2 + child_false] = p_false;
        values[r * 2 + child_true] = 1.0 - p_false;
    }
    Ok(Cpt::new(2, values))
}
