//! Command results as serializable values. The CLI and the HTTP service both
//! go through these functions, so the same inputs give the same bytes.

use std::fmt::Write;

use serde::Serialize;

use crate::bn::{query_posteriors, BnError, Evidence, Finding, Network, NodePosterior, PosteriorReport};
use crate::calibration::{FitReport, ProjectRecord};
use crate::defect::{ids, DefectError, DefectModelParams, DefectTemplate, ProjectScenario, DIAGNOSIS_TARGETS, PREDICTION_TARGETS};
use super::{ErrorKind, ErrorReport, EvidenceDocument};
use crate::fault_tree::{CauseRank, FaultTree, FaultTreeError};
use crate::sensitivity::{tornado_analysis, SensitivityError, SensitivityResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictOutput {
    pub scenario: Option<String>,
    pub horizon_months: u32,
    pub posteriors: Vec<NodePosterior>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnoseOutput {
    pub scenario: Option<String>,
    pub observed_found: u64,
    /// Count interval the observation was entered as.
    pub found_interval: String,
    pub posteriors: Vec<NodePosterior>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrateOutput {
    pub params: DefectModelParams,
    pub report: FitReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopEventOutput {
    pub top: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauseRankingOutput {
    pub top: String,
    pub likelihood_true: f64,
    pub likelihood_false: f64,
    pub causes: Vec<CauseRank>,
}

/// Resolve an evidence document; findings on nodes the network lacks are
/// reported as unknown nodes rather than as schema errors.
pub fn resolve_evidence(doc: &EvidenceDocument, net: &Network) -> Result<Evidence, ErrorReport> {
    if let Some(id) = doc.0.keys().find(|id| net.index_of(id).is_none()) {
        return Err(ErrorReport::new(ErrorKind::UnknownNode, id.clone(), BnError::UnknownNode(id.clone())));
    }
    Ok(doc.resolve(net)?)
}

pub fn infer(net: &Network, ev: &Evidence, targets: &[&str]) -> Result<PosteriorReport, BnError> {
    query_posteriors(net, ev, targets)
}

/// Network and evidence for a scenario, with `extra` layered over the
/// evidence the answers imply.
pub fn scenario_context(
    template: &DefectTemplate,
    scenario: &ProjectScenario,
    extra: &Evidence,
) -> Result<(Network, Evidence), DefectError> {
    let dn = template.instantiate(scenario)?;
    let ev = dn.evidence.overlaid(extra);
    Ok((dn.network, ev))
}

pub fn predict(template: &DefectTemplate, scenario: &ProjectScenario, extra: &Evidence) -> Result<PredictOutput, DefectError> {
    let (net, ev) = scenario_context(template, scenario, extra)?;
    let r = query_posteriors(&net, &ev, &PREDICTION_TARGETS)?;
    Ok(PredictOutput { scenario: scenario.name.clone(), horizon_months: scenario.horizon_months, posteriors: r.posteriors })
}

pub fn diagnose(
    template: &DefectTemplate,
    scenario: &ProjectScenario,
    extra: &Evidence,
    found: u64,
) -> Result<DiagnoseOutput, DefectError> {
    let (net, mut ev) = scenario_context(template, scenario, extra)?;
    let counts = net.node(ids::DEFECTS_FOUND)?.states();
    let bin = counts.interval_of_count(found).ok_or(DefectError::CountOutOfRange(found))?;
    let found_interval = counts.labels()[bin].clone();
    ev.insert(ids::DEFECTS_FOUND, Finding::Hard(found_interval.clone()));
    let r = query_posteriors(&net, &ev, &DIAGNOSIS_TARGETS)?;
    Ok(DiagnoseOutput { scenario: scenario.name.clone(), observed_found: found, found_interval, posteriors: r.posteriors })
}

/// Tornado plus mutual information. Without explicit inputs every ancestor
/// of the target is swept, in network order.
pub fn sensitivity(
    net: &Network,
    ev: &Evidence,
    target: &str,
    inputs: Option<&[String]>,
) -> Result<SensitivityResult, SensitivityError> {
    let t = net.index_of(target).ok_or_else(|| BnError::UnknownNode(target.to_string()))?;
    let chosen: Vec<&str> = match inputs {
        Some(list) => list.iter().map(String::as_str).collect(),
        None => {
            let mask = net.ancestral_closure([t]);
            (0..net.len()).filter(|&i| i != t && mask[i]).map(|i| net.node_at(i).id()).collect()
        }
    };
    tornado_analysis(net, ev, target, &chosen)
}

pub fn calibrate(
    records: &[ProjectRecord],
    init: &DefectModelParams,
    priors: &crate::calibration::Priors,
    settings: &crate::calibration::FitSettings,
) -> Result<CalibrateOutput, crate::calibration::CalibrationError> {
    let (params, report) = crate::calibration::fit_parameters(records, init, priors, settings)?;
    Ok(CalibrateOutput { params, report })
}

pub fn top_event(tree: &FaultTree) -> Result<TopEventOutput, FaultTreeError> {
    Ok(TopEventOutput { top: tree.top.clone(), probability: tree.top_event_probability()? })
}

pub fn cause_ranking(tree: &FaultTree, likelihood_true: f64, likelihood_false: f64) -> Result<CauseRankingOutput, FaultTreeError> {
    let ev = tree.top_soft_evidence(likelihood_true, likelihood_false);
    Ok(CauseRankingOutput {
        top: tree.top.clone(),
        likelihood_true,
        likelihood_false,
        causes: tree.posterior_cause_ranking(&ev)?,
    })
}

/// Default sensitivity target for defect networks.
pub const DEFAULT_SENSITIVITY_TARGET: &str = ids::FIELD_DEFECTS;

/// Plain-text table of posteriors.
pub fn posterior_table(posteriors: &[NodePosterior]) -> String {
    let width = posteriors
        .iter()
        .flat_map(|p| p.states.iter().map(String::len))
        .max()
        .unwrap_or(5)
        .max(5);
    let mut out = String::new();
    for p in posteriors {
        let _ = writeln!(out, "{}", p.node);
        for (s, v) in p.states.iter().zip(&p.probabilities) {
            let _ = writeln!(out, "  {s:<width$}  {v:.6}");
        }
        if let (Some(m), Some(v)) = (p.mean, p.variance) {
            let _ = writeln!(out, "  mean {m:.4}  sd {:.4}", v.sqrt());
        }
    }
    out
}

pub fn sensitivity_table(r: &SensitivityResult) -> String {
    let mut out = format!("target {}  base mean {:.4}\n", r.target, r.base_mean);
    let width = r.inputs.iter().map(|i| i.input.len()).max().unwrap_or(5);
    for i in &r.inputs {
        let _ = write!(out, "  {:<width$}  range {:.4}  mi {:.4} bits", i.input, i.range, i.mutual_information_bits);
        if !i.impossible.is_empty() {
            let _ = write!(out, "  impossible: {}", i.impossible.join(", "));
        }
        out.push('\n');
    }
    out
}
