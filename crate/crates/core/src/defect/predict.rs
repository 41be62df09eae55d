use serde::Serialize;

use crate::bn::{query_posteriors, Evidence, Finding, PosteriorReport};

use super::template::{ids::*, scenario_evidence};
use super::{DefectError, DefectModelParams, DefectTemplate, ProjectScenario};

pub const PREDICTION_TARGETS: [&str; 2] = [DEFECTS_FOUND, FIELD_DEFECTS];
pub const DIAGNOSIS_TARGETS: [&str; 6] = [
    VERIFICATION_QUALITY,
    DEVELOPMENT_QUALITY,
    PROBLEM_COMPLEXITY,
    DEFECTS_INSERTED,
    RESIDUAL_DEFECTS,
    FIELD_DEFECTS,
];

/// Forward prediction of verification and field defect counts.
pub fn predict_defects(scenario: &ProjectScenario, params: &DefectModelParams) -> Result<PosteriorReport, DefectError> {
    predict_with(&DefectTemplate::new(params.clone())?, scenario)
}

pub fn predict_with(template: &DefectTemplate, scenario: &ProjectScenario) -> Result<PosteriorReport, DefectError> {
    let dn = template.instantiate(scenario)?;
    Ok(query_posteriors(&dn.network, &dn.evidence, &PREDICTION_TARGETS)?)
}

/// Backward pass after observing how many defects verification found.
pub fn diagnose_from_verification(
    scenario: &ProjectScenario,
    params: &DefectModelParams,
    observed_found: u64,
) -> Result<PosteriorReport, DefectError> {
    diagnose_with(&DefectTemplate::new(params.clone())?, scenario, observed_found)
}

pub fn diagnose_with(
    template: &DefectTemplate,
    scenario: &ProjectScenario,
    observed_found: u64,
) -> Result<PosteriorReport, DefectError> {
    let mut dn = template.instantiate(scenario)?;
    let states = dn.network.node(DEFECTS_FOUND)?.states();
    let bin = states.interval_of_count(observed_found).ok_or(DefectError::CountOutOfRange(observed_found))?;
    dn.evidence.insert(DEFECTS_FOUND, Finding::Hard(states.labels()[bin].clone()));
    Ok(query_posteriors(&dn.network, &dn.evidence, &DIAGNOSIS_TARGETS)?)
}

/// Size subnet summary for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveSize {
    /// Distinct effective-KLoC values with their probability, ascending.
    pub effective_kloc: Vec<(f64, f64)>,
    pub effective_kloc_level: Vec<f64>,
    pub hours_level: String,
    pub project_size: Vec<f64>,
}

/// Effective KLoC (raw KLoC times the complexity multiplier, mixed over the
/// complexity answer) and the resulting project-size distribution.
pub fn effective_size(scenario: &ProjectScenario, params: &DefectModelParams) -> Result<EffectiveSize, DefectError> {
    if !(scenario.kloc.is_finite() && scenario.kloc >= 0.0) {
        return Err(DefectError::NegativeInput(format!("kloc = {}", scenario.kloc)));
    }
    if !(scenario.hours_booked.is_finite() && scenario.hours_booked >= 0.0) {
        return Err(DefectError::NegativeInput(format!("hours_booked = {}", scenario.hours_booked)));
    }
    let mut mix: Vec<(f64, f64)> = Vec::new();
    for (m, w) in params.complexity_multipliers.iter().zip(scenario.complexity.probs()) {
        if *w == 0.0 {
            continue;
        }
        let v = scenario.kloc * m;
        match mix.iter_mut().find(|(x, _)| *x == v) {
            Some(e) => e.1 += w,
            None => mix.push((v, *w)),
        }
    }
    mix.sort_by(|a, b| a.0.total_cmp(&b.0));

    let dn = DefectTemplate::new(params.clone())?.instantiate(scenario)?;
    let full = scenario_evidence(params, scenario);
    let mut ev = Evidence::new();
    for id in [NEW_FUNCTIONALITY_COMPLEXITY, HOURS_LEVEL] {
        ev.insert(id, full.get(id).expect("scenario evidence").clone());
    }
    let r = query_posteriors(&dn.network, &ev, &[EFFECTIVE_KLOC_LEVEL, PROJECT_SIZE])?;
    let hours = match full.get(HOURS_LEVEL) {
        Some(Finding::Hard(s)) => s.clone(),
        _ => unreachable!("hours level is always hard evidence"),
    };
    Ok(EffectiveSize {
        effective_kloc: mix,
        effective_kloc_level: r.posteriors[0].probabilities.clone(),
        hours_level: hours,
        project_size: r.posteriors[1].probabilities.clone(),
    })
}
