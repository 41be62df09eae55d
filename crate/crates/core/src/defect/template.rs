use crate::bn::{Evidence, Finding, Network, NodeSpec, StateSpace, RANKED_LABELS};
use crate::cpd::{Cpd, RankedCpd};

use super::questionnaire::{COMPLEXITY_DIMENSIONS, DEVELOPMENT_DIMENSIONS, USAGE_LABELS, VERIFICATION_DIMENSIONS};
use super::{DefectError, DefectModelParams, ProjectScenario, DEFAULT_HORIZON_MONTHS};

/// Node ids of the reference template.
pub mod ids {
    pub const CERTIFICATION: &str = "certification";
    pub const NEW_FUNCTIONALITY_COMPLEXITY: &str = "new_functionality_complexity";
    pub const HOURS_LEVEL: &str = "hours_level";
    pub const FIELD_USAGE: &str = "field_usage";
    pub const EFFECTIVE_KLOC_LEVEL: &str = "effective_kloc_level";
    pub const PROJECT_SIZE: &str = "project_size";
    pub const VERIFICATION_QUALITY: &str = "verification_quality";
    pub const DEVELOPMENT_QUALITY: &str = "development_quality";
    pub const PROBLEM_COMPLEXITY: &str = "problem_complexity";
    pub const DEFECTS_INSERTED: &str = "defects_inserted";
    pub const DEFECTS_FOUND: &str = "defects_found_verification";
    pub const RESIDUAL_DEFECTS: &str = "residual_defects";
    pub const FIELD_DEFECTS: &str = "field_defects";

    pub const CERTIFICATION_STATES: [&str; 2] = ["not_certified", "certified"];
}

use ids::*;

/// Floor on the insertion rate, so that zero KLoC still gives a valid
/// Poisson row (essentially all mass on zero defects).
pub const MIN_INSERTION_RATE: f64 = 1e-12;

/// A scenario's network together with the evidence derived from its
/// answers.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectNetwork {
    pub network: Network,
    pub evidence: Evidence,
}

fn uniform_root(id: &str, states: StateSpace) -> NodeSpec {
    NodeSpec::labeled(id, states).uniform(1)
}

fn ranked(id: &str, parents: &[&str], weights: &[f64], variance: f64, reversed: Vec<usize>) -> NodeSpec {
    NodeSpec::ranked(id)
        .parents(parents.iter().copied())
        .cpd(RankedCpd::new(weights.to_vec(), variance).with_reversed(reversed))
}

/// One-hot rows mapping new-functionality complexity to the effective-KLoC
/// level for a given raw KLoC.
pub(crate) fn effective_kloc_rows(params: &DefectModelParams, kloc: f64) -> Vec<Vec<f64>> {
    params
        .complexity_multipliers
        .iter()
        .map(|m| {
            let mut row = vec![0.0; 5];
            row[DefectModelParams::level_of(&params.effective_kloc_thresholds, kloc * m)] = 1.0;
            row
        })
        .collect()
}

/// Poisson rates over (new_functionality_complexity, development_quality,
/// problem_complexity), first parent most significant.
pub(crate) fn insertion_rates(params: &DefectModelParams, kloc: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(125);
    for m in params.complexity_multipliers {
        for r in params.insertion_rates {
            for f in params.complexity_rate_factors {
                out.push((kloc * m * r * f).max(MIN_INSERTION_RATE));
            }
        }
    }
    out
}

fn template_specs(params: &DefectModelParams, kloc: f64, horizon_months: u32) -> Result<Vec<NodeSpec>, DefectError> {
    let counts = StateSpace::counts(params.count_intervals.clone())?;
    let ranked_root = |id: &str| NodeSpec::ranked(id).uniform(1);
    let mut specs: Vec<NodeSpec> = VERIFICATION_DIMENSIONS
        .iter()
        .chain(&DEVELOPMENT_DIMENSIONS)
        .chain(&[NEW_FUNCTIONALITY_COMPLEXITY])
        .chain(&COMPLEXITY_DIMENSIONS)
        .map(|d| ranked_root(d))
        .collect();
    specs.push(ranked_root(HOURS_LEVEL));
    specs.push(uniform_root(CERTIFICATION, StateSpace::new(CERTIFICATION_STATES)?));
    specs.push(uniform_root(FIELD_USAGE, StateSpace::new(USAGE_LABELS)?));

    specs.push(
        NodeSpec::ranked(EFFECTIVE_KLOC_LEVEL)
            .parents([NEW_FUNCTIONALITY_COMPLEXITY])
            .table(effective_kloc_rows(params, kloc)),
    );
    let s = &params.size;
    specs.push(ranked(PROJECT_SIZE, &[EFFECTIVE_KLOC_LEVEL, HOURS_LEVEL], &s.weights, s.variance, vec![]));
    let v = &params.verification;
    let mut vparents = VERIFICATION_DIMENSIONS.to_vec();
    vparents.push(CERTIFICATION);
    specs.push(ranked(VERIFICATION_QUALITY, &vparents, &v.weights, v.variance, vec![]));
    let d = &params.development;
    specs.push(ranked(DEVELOPMENT_QUALITY, &DEVELOPMENT_DIMENSIONS, &d.weights, d.variance, vec![]));
    let c = &params.complexity;
    let cparents = [NEW_FUNCTIONALITY_COMPLEXITY, COMPLEXITY_DIMENSIONS[0], COMPLEXITY_DIMENSIONS[1], PROJECT_SIZE];
    // stable requirements lower complexity
    specs.push(ranked(PROBLEM_COMPLEXITY, &cparents, &c.weights, c.variance, vec![1]));

    specs.push(
        NodeSpec::count(DEFECTS_INSERTED, counts.clone())
            .parents([NEW_FUNCTIONALITY_COMPLEXITY, DEVELOPMENT_QUALITY, PROBLEM_COMPLEXITY])
            .cpd(Cpd::Poisson { rates: insertion_rates(params, kloc) }),
    );
    specs.push(
        NodeSpec::count(DEFECTS_FOUND, counts.clone())
            .parents([DEFECTS_INSERTED, VERIFICATION_QUALITY])
            .cpd(Cpd::Binomial { p: params.detection.to_vec() }),
    );
    specs.push(
        NodeSpec::count(RESIDUAL_DEFECTS, counts.clone())
            .parents([DEFECTS_INSERTED, DEFECTS_FOUND])
            .cpd(Cpd::Subtract),
    );
    specs.push(
        NodeSpec::count(FIELD_DEFECTS, counts)
            .parents([RESIDUAL_DEFECTS, FIELD_USAGE])
            .cpd(Cpd::Binomial { p: params.manifestation_for(horizon_months).to_vec() }),
    );
    Ok(specs)
}

/// The reference template for one parameter set. Building it expands the
/// scenario-independent CPTs once; [`DefectTemplate::instantiate`] then only
/// redoes the size-dependent ones.
#[derive(Debug, Clone)]
pub struct DefectTemplate {
    params: DefectModelParams,
    base: Network,
}

const BASE_KLOC: f64 = 1.0;

impl DefectTemplate {
    pub fn new(params: DefectModelParams) -> Result<Self, DefectError> {
        params.validate()?;
        let base = Network::build(template_specs(&params, BASE_KLOC, DEFAULT_HORIZON_MONTHS)?)?;
        Ok(DefectTemplate { params, base })
    }

    pub fn params(&self) -> &DefectModelParams {
        &self.params
    }

    /// The template network for 1 KLoC and a 12-month horizon, with no
    /// evidence attached.
    pub fn base_network(&self) -> &Network {
        &self.base
    }

    /// Network for a scenario plus the evidence its answers imply.
    pub fn instantiate(&self, scenario: &ProjectScenario) -> Result<DefectNetwork, DefectError> {
        scenario.validate()?;
        let p = &self.params;
        let mut net = self
            .base
            .replace_cpd(EFFECTIVE_KLOC_LEVEL, Cpd::Table(effective_kloc_rows(p, scenario.kloc)))?
            .replace_cpd(DEFECTS_INSERTED, Cpd::Poisson { rates: insertion_rates(p, scenario.kloc) })?;
        if scenario.horizon_months != DEFAULT_HORIZON_MONTHS {
            let manifest = p.manifestation_for(scenario.horizon_months).to_vec();
            net = net.replace_cpd(FIELD_DEFECTS, Cpd::Binomial { p: manifest })?;
        }
        Ok(DefectNetwork { network: net, evidence: scenario_evidence(p, scenario) })
    }
}

/// Soft evidence from every answer, hard evidence from booked hours and
/// the certification flag.
pub(crate) fn scenario_evidence(params: &DefectModelParams, scenario: &ProjectScenario) -> Evidence {
    let mut ev = Evidence::new();
    for (dim, answer) in &scenario.answers {
        ev.insert(dim.clone(), Finding::Soft(answer.probs().to_vec()));
    }
    ev.insert(NEW_FUNCTIONALITY_COMPLEXITY, Finding::Soft(scenario.complexity.probs().to_vec()));
    ev.insert(FIELD_USAGE, Finding::Soft(scenario.usage.probs().to_vec()));
    let hours = DefectModelParams::level_of(&params.hours_thresholds, scenario.hours_booked);
    ev.insert(HOURS_LEVEL, Finding::Hard(RANKED_LABELS[hours].to_string()));
    if let Some(c) = scenario.certified {
        ev.insert(CERTIFICATION, Finding::Hard(CERTIFICATION_STATES[c as usize].to_string()));
    }
    ev
}

/// Build the reference network for `scenario` under `params`.
pub fn build_defect_network(scenario: &ProjectScenario, params: &DefectModelParams) -> Result<DefectNetwork, DefectError> {
    DefectTemplate::new(params.clone())?.instantiate(scenario)
}
