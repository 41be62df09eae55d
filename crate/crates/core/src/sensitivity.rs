//! Tornado sweeps and mutual information between inputs and a target node.

use serde::Serialize;
use thiserror::Error;

use crate::bn::{
    joint_posterior, query_posteriors, BnError, Evidence, Finding, InferenceOptions, Network, NodeKind,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensitivityError {
    #[error("target '{0}' has neither numeric intervals nor an ordinal scale")]
    TargetNotSummarizable(String),
    #[error("input '{0}' is the target")]
    InputIsTarget(String),
    #[error(transparent)]
    Network(#[from] BnError),
}

/// Target mean with one input forced to one state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateSweep {
    pub state: String,
    /// `None` when the forced state is impossible under the base evidence.
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputSensitivity {
    pub input: String,
    pub sweeps: Vec<StateSweep>,
    /// Spread of the achievable means.
    pub range: f64,
    /// States skipped because they have zero probability.
    pub impossible: Vec<String>,
    pub mutual_information_bits: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityResult {
    pub target: String,
    pub base_mean: f64,
    /// Ranked by range descending, ties by input id.
    pub inputs: Vec<InputSensitivity>,
}

/// Value attached to each target state: interval representatives for count
/// nodes, the 0-based level index for ranked nodes.
fn target_scale(net: &Network, target: &str) -> Result<Vec<f64>, SensitivityError> {
    let node = net.node(target)?;
    if let Some(reps) = node.states().representatives(net.tail_factor()) {
        return Ok(reps);
    }
    match node.kind() {
        NodeKind::Ranked5 => Ok((0..node.card()).map(|i| i as f64).collect()),
        _ => Err(SensitivityError::TargetNotSummarizable(target.to_string())),
    }
}

fn mean_of(net: &Network, ev: &Evidence, target: &str, scale: &[f64]) -> Result<Option<f64>, SensitivityError> {
    match query_posteriors(net, ev, &[target]) {
        Ok(r) => Ok(Some(r.posteriors[0].probabilities.iter().zip(scale).map(|(p, v)| p * v).sum())),
        Err(BnError::ZeroProbabilityEvidence) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

/// Force each input to each of its states in turn and record the target's
/// posterior mean. A forced state replaces any finding already on the input.
pub fn tornado_analysis(
    net: &Network,
    base: &Evidence,
    target: &str,
    inputs: &[&str],
) -> Result<SensitivityResult, SensitivityError> {
    let scale = target_scale(net, target)?;
    let base_mean = mean_of(net, base, target, &scale)?.ok_or(BnError::ZeroProbabilityEvidence)?;
    let mut out = Vec::with_capacity(inputs.len());
    for &input in inputs {
        if input == target {
            return Err(SensitivityError::InputIsTarget(input.to_string()));
        }
        let node = net.node(input)?;
        let mut sweeps = Vec::with_capacity(node.card());
        let mut impossible = Vec::new();
        for state in node.states().labels() {
            let mut ev = base.clone();
            ev.insert(input, Finding::Hard(state.clone()));
            let mean = mean_of(net, &ev, target, &scale)?;
            if mean.is_none() {
                impossible.push(state.clone());
            }
            sweeps.push(StateSweep { state: state.clone(), mean });
        }
        let achieved = sweeps.iter().filter_map(|s| s.mean);
        let (lo, hi) = achieved.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), m| (lo.min(m), hi.max(m)));
        out.push(InputSensitivity {
            input: input.to_string(),
            sweeps,
            range: if hi >= lo { hi - lo } else { 0.0 },
            impossible,
            mutual_information_bits: mutual_information(net, base, input, target)?,
        });
    }
    out.sort_by(|a, b| b.range.total_cmp(&a.range).then_with(|| a.input.cmp(&b.input)));
    Ok(SensitivityResult { target: target.to_string(), base_mean, inputs: out })
}

/// I(X; T | ev) in bits from the exact joint posterior of `(x, target)`.
pub fn mutual_information(net: &Network, ev: &Evidence, x: &str, target: &str) -> Result<f64, SensitivityError> {
    if x == target {
        return Err(SensitivityError::InputIsTarget(x.to_string()));
    }
    let joint = joint_posterior(net, ev, &[x, target], InferenceOptions::default())?;
    let (nx, nt) = (joint.cards[0], joint.cards[1]);
    let p = &joint.probabilities;
    let px: Vec<f64> = (0..nx).map(|i| p[i * nt..(i + 1) * nt].iter().sum()).collect();
    let pt: Vec<f64> = (0..nt).map(|j| (0..nx).map(|i| p[i * nt + j]).sum()).collect();
    let mut mi = 0.0;
    for i in 0..nx {
        for j in 0..nt {
            let pij = p[i * nt + j];
            if pij > 0.0 {
                mi += pij * (pij / (px[i] * pt[j])).log2();
            }
        }
    }
    Ok(mi.max(0.0))
}
