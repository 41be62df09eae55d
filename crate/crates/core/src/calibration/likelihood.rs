//! Per-record likelihood of observed defect counts.
//!
//! Given root evidence, the insertion parents (new-functionality complexity,
//! development quality, problem complexity), verification quality and field
//! usage are mutually independent, so
//!
//! ```text
//! P(found = f, field = y) = sum_I P(I) sum_V P(V) P(f | I, V)
//!                                 * sum_U P(U) P(y | R(I, f), U)
//! ```
//!
//! with `R` the deterministic residual interval. The mixing weights depend
//! only on the parameters the fit holds fixed, so they are computed once per
//! record; the fitted rates and probabilities enter through cheap CPT rows.

use std::collections::BTreeMap;

use crate::bn::{joint_posterior, query_posteriors, InferenceOptions, StateSpace};
use crate::cpd::count::poisson_row;
use crate::cpd::{expand_arith_subtract, expand_binomial_thinning, Cpt};
use crate::defect::{ids, DefectError, DefectModelParams, DefectTemplate, USAGE_LABELS};

use super::ProjectRecord;

/// Count CPTs shared by every record for one parameter value.
pub(crate) struct SharedTables {
    counts: StateSpace,
    tail_factor: f64,
    found: Cpt,
    /// Field CPT per horizon in months.
    field: BTreeMap<u32, Cpt>,
    /// Residual interval index for (inserted, found).
    residual: Vec<usize>,
}

impl SharedTables {
    pub fn new(params: &DefectModelParams, horizons: impl IntoIterator<Item = u32>, tail_factor: f64) -> Result<Self, DefectError> {
        let counts = StateSpace::counts(params.count_intervals.clone())?;
        let sub = expand_arith_subtract(&counts, &[&counts, &counts], tail_factor)
            .map_err(|e| DefectError::InvalidParams(e.to_string()))?;
        let residual = sub
            .rows()
            .map(|r| r.iter().position(|p| *p == 1.0).expect("deterministic row"))
            .collect();
        let mut t = SharedTables {
            found: Cpt::new(counts.len(), vec![]),
            field: horizons.into_iter().map(|h| (h, Cpt::new(counts.len(), vec![]))).collect(),
            counts,
            tail_factor,
            residual,
        };
        t.set_detection(&params.detection)?;
        t.set_manifestation(params)?;
        Ok(t)
    }

    pub fn set_detection(&mut self, detection: &[f64; 5]) -> Result<(), DefectError> {
        let quality = StateSpace::ranked();
        self.found = expand_binomial_thinning(detection, &self.counts, &[&self.counts, &quality], self.tail_factor)
            .map_err(|e| DefectError::InvalidParams(e.to_string()))?;
        Ok(())
    }

    pub fn set_manifestation(&mut self, params: &DefectModelParams) -> Result<(), DefectError> {
        let usage = StateSpace::new(USAGE_LABELS)?;
        for (h, cpt) in self.field.iter_mut() {
            *cpt = expand_binomial_thinning(&params.manifestation_for(*h), &self.counts, &[&self.counts, &usage], self.tail_factor)
                .map_err(|e| DefectError::InvalidParams(e.to_string()))?;
        }
        Ok(())
    }
}

/// Fixed per-record quantities plus the cached insertion mixture.
pub(crate) struct RecordKernel {
    /// Per development-quality state: `(kloc * multiplier * factor, weight)`
    /// for every (complexity, problem complexity) pair with positive weight.
    groups: [Vec<(f64, f64)>; 5],
    verification: Vec<f64>,
    usage: Vec<f64>,
    horizon: u32,
    found_bin: usize,
    field_bin: Option<usize>,
    /// Unnormalized inserted-count mixture contributed by each development
    /// state under the current rates.
    partial: [Vec<f64>; 5],
}

impl RecordKernel {
    pub fn new(template: &DefectTemplate, record: &ProjectRecord) -> Result<Self, DefectError> {
        let dn = template.instantiate(&record.scenario)?;
        let (net, ev) = (&dn.network, &dn.evidence);
        let params = template.params();
        let joint = joint_posterior(
            net,
            ev,
            &[ids::NEW_FUNCTIONALITY_COMPLEXITY, ids::DEVELOPMENT_QUALITY, ids::PROBLEM_COMPLEXITY],
            InferenceOptions::default(),
        )?;
        let mut groups: [Vec<(f64, f64)>; 5] = Default::default();
        let kloc = record.scenario.kloc;
        for (i, w) in joint.probabilities.iter().enumerate() {
            if *w > 0.0 {
                let (nfc, dev, pc) = (i / 25, (i / 5) % 5, i % 5);
                let base = kloc * params.complexity_multipliers[nfc] * params.complexity_rate_factors[pc];
                groups[dev].push((base, *w));
            }
        }
        let r = query_posteriors(net, ev, &[ids::VERIFICATION_QUALITY, ids::FIELD_USAGE])?;
        let counts = net.node(ids::DEFECTS_FOUND)?.states();
        let bin = |k: u64| counts.interval_of_count(k).ok_or(DefectError::CountOutOfRange(k));
        let mut kernel = RecordKernel {
            groups,
            verification: r.posteriors[0].probabilities.clone(),
            usage: r.posteriors[1].probabilities.clone(),
            horizon: record.scenario.horizon_months,
            found_bin: bin(record.observed_found_verification)?,
            field_bin: record.observed_field_first_year.map(bin).transpose()?,
            partial: Default::default(),
        };
        for d in 0..5 {
            kernel.set_rate(d, params.insertion_rates[d], &params.count_intervals);
        }
        Ok(kernel)
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    /// Recompute the mixture for development state `dev` at a new rate.
    pub fn set_rate(&mut self, dev: usize, rate: f64, intervals: &[crate::bn::Interval]) {
        let mut acc = vec![0.0; intervals.len()];
        let mut row = vec![0.0; intervals.len()];
        for &(base, w) in &self.groups[dev] {
            poisson_row((base * rate).max(crate::defect::MIN_INSERTION_RATE), intervals, &mut row);
            for (a, p) in acc.iter_mut().zip(&row) {
                *a += w * p;
            }
        }
        self.partial[dev] = acc;
    }

    pub fn log_likelihood(&self, t: &SharedTables) -> f64 {
        let n = t.counts.len();
        let f = self.found_bin;
        let field = self.field_bin.map(|y| (y, &t.field[&self.horizon]));
        let mut total = 0.0;
        for i in 0..n {
            let p_i: f64 = self.partial.iter().map(|p| p[i]).sum();
            if p_i == 0.0 {
                continue;
            }
            let found: f64 = (0..5).map(|v| self.verification[v] * t.found.row(i * 5 + v)[f]).sum();
            if found == 0.0 {
                continue;
            }
            let g = match field {
                Some((y, cpt)) => {
                    let r = t.residual[i * n + f];
                    (0..5).map(|u| self.usage[u] * cpt.row(r * 5 + u)[y]).sum()
                }
                None => 1.0,
            };
            total += p_i * found * g;
        }
        total.ln()
    }
}
