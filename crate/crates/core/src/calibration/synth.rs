use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CalibrationError, ProjectRecord};
use crate::bn::{ancestral_sample, Interval, DEFAULT_TAIL_FACTOR};
use crate::defect::{answer_dimensions, ids, Answer, DefectModelParams, DefectTemplate, ProjectScenario, DEFAULT_HORIZON_MONTHS};

/// How synthetic projects are drawn.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub count: usize,
    pub kloc_range: (f64, f64),
    pub hours_range: (f64, f64),
    /// Fixed usage level, or uniform over Low..VeryHigh when `None`.
    pub usage_level: Option<usize>,
    /// Record field counts as well as verification counts.
    pub observe_field: bool,
    pub horizon_months: u32,
}

impl SynthConfig {
    pub fn new(seed: u64, count: usize) -> Self {
        SynthConfig {
            seed,
            count,
            kloc_range: (5.0, 60.0),
            hours_range: (1000.0, 50000.0),
            usage_level: None,
            observe_field: true,
            horizon_months: DEFAULT_HORIZON_MONTHS,
        }
    }
}

/// A synthetic record together with the sampled state of every node.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticRecord {
    pub record: ProjectRecord,
    pub latent: BTreeMap<String, String>,
}

fn count_in<R: Rng + ?Sized>(iv: &Interval, rng: &mut R) -> u64 {
    match iv.hi {
        Some(hi) => rng.gen_range(iv.lo..=hi),
        None => iv.count_representative(DEFAULT_TAIL_FACTOR),
    }
}

/// Draw projects with point answers and sample their counts from the
/// template under `params`. Counts are uniform within the sampled interval.
pub fn synthesize_records_with(
    params: &DefectModelParams,
    config: &SynthConfig,
) -> Result<Vec<SyntheticRecord>, CalibrationError> {
    let template = DefectTemplate::new(params.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(config.count);
    for i in 0..config.count {
        let level = |rng: &mut ChaCha8Rng| Answer::point(rng.gen_range(0..5));
        let answers = answer_dimensions().map(|d| (d.to_string(), level(&mut rng))).collect();
        let complexity = level(&mut rng);
        let usage = Answer::point(config.usage_level.unwrap_or_else(|| rng.gen_range(1..5)));
        let scenario = ProjectScenario {
            name: Some(format!("synthetic-{i:04}")),
            answers,
            kloc: rng.gen_range(config.kloc_range.0..=config.kloc_range.1),
            complexity,
            hours_booked: rng.gen_range(config.hours_range.0..=config.hours_range.1),
            usage,
            horizon_months: config.horizon_months,
            certified: Some(rng.gen_bool(0.5)),
        };
        let dn = template.instantiate(&scenario)?;
        let states = ancestral_sample(&dn.network, &dn.evidence, &mut rng).map_err(crate::defect::DefectError::from)?;
        let net = &dn.network;
        let latent: BTreeMap<String, String> = net
            .nodes()
            .iter()
            .zip(&states)
            .map(|(n, s)| (n.id().to_string(), n.states().labels()[*s].clone()))
            .collect();
        let observe = |id: &str, rng: &mut ChaCha8Rng| {
            let idx = net.index_of(id).expect("template node");
            let iv = net.node_at(idx).states().intervals().expect("count node")[states[idx]];
            count_in(&iv, rng)
        };
        let found = observe(ids::DEFECTS_FOUND, &mut rng);
        let field = observe(ids::FIELD_DEFECTS, &mut rng);
        out.push(SyntheticRecord {
            record: ProjectRecord {
                scenario,
                observed_found_verification: found,
                observed_field_first_year: config.observe_field.then_some(field),
            },
            latent,
        });
    }
    Ok(out)
}

pub fn synthesize_records(params: &DefectModelParams, seed: u64, count: usize) -> Result<Vec<ProjectRecord>, CalibrationError> {
    Ok(synthesize_records_with(params, &SynthConfig::new(seed, count))?
        .into_iter()
        .map(|s| s.record)
        .collect())
}
