use serde::{Deserialize, Serialize};

use super::DefectError;
use crate::bn::{default_count_intervals, Interval, StateSpace};

/// Ranked aggregate: one weight per parent, in template parent order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateParams {
    pub weights: Vec<f64>,
    pub variance: f64,
}

/// Parameters of the reference defect template. Arrays indexed by level run
/// VeryLow..VeryHigh (None..VeryHigh for usage). Missing fields take their
/// defaults when deserialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DefectModelParams {
    /// Defects inserted per effective KLoC, by development quality.
    pub insertion_rates: [f64; 5],
    /// Probability that verification finds a given defect, by verification
    /// quality.
    pub detection: [f64; 5],
    /// Probability that a residual defect shows up in the field within 12
    /// months, by usage level. The `None` entry must be 0.
    pub manifestation: [f64; 5],
    /// Effective-KLoC multiplier by new-functionality complexity.
    pub complexity_multipliers: [f64; 5],
    /// Insertion-rate factor by problem complexity.
    pub complexity_rate_factors: [f64; 5],
    /// Upper bounds (exclusive) of effective KLoC for VeryLow..High.
    pub effective_kloc_thresholds: [f64; 4],
    /// Upper bounds (exclusive) of booked hours for VeryLow..High.
    pub hours_thresholds: [f64; 4],
    /// Parents: testing_quality, review_quality, verification_type,
    /// certification.
    pub verification: AggregateParams,
    /// Parents: team_experience, project_management, process_maturity,
    /// tool_quality.
    pub development: AggregateParams,
    /// Parents: new_functionality_complexity, requirements_stability
    /// (reversed), domain_novelty, project_size.
    pub complexity: AggregateParams,
    /// Parents: effective_kloc_level, hours_level.
    pub size: AggregateParams,
    pub count_intervals: Vec<Interval>,
}

impl Default for DefectModelParams {
    fn default() -> Self {
        DefectModelParams {
            insertion_rates: [8.0, 4.0, 2.0, 1.0, 0.5],
            detection: [0.30, 0.50, 0.70, 0.85, 0.95],
            manifestation: [0.0, 0.05, 0.15, 0.30, 0.50],
            complexity_multipliers: [0.5, 0.75, 1.0, 1.5, 2.5],
            complexity_rate_factors: [0.6, 0.8, 1.0, 1.25, 1.5],
            effective_kloc_thresholds: [10.0, 30.0, 80.0, 200.0],
            hours_thresholds: [2000.0, 6000.0, 15000.0, 40000.0],
            verification: AggregateParams { weights: vec![3.0, 2.0, 2.0, 0.5], variance: 0.01 },
            development: AggregateParams { weights: vec![2.0, 1.0, 2.0, 1.0], variance: 0.01 },
            complexity: AggregateParams { weights: vec![2.0, 1.0, 1.5, 1.0], variance: 0.01 },
            size: AggregateParams { weights: vec![2.0, 1.0], variance: 0.02 },
            count_intervals: default_count_intervals(),
        }
    }
}

fn check_probs(name: &str, v: &[f64]) -> Result<(), DefectError> {
    match v.iter().position(|p| !(0.0..=1.0).contains(p)) {
        Some(i) => Err(DefectError::InvalidParams(format!("{name}[{i}] = {} is outside [0, 1]", v[i]))),
        None => Ok(()),
    }
}

fn check_positive(name: &str, v: &[f64]) -> Result<(), DefectError> {
    match v.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
        Some(i) => Err(DefectError::InvalidParams(format!("{name}[{i}] = {} must be > 0", v[i]))),
        None => Ok(()),
    }
}

fn check_increasing(name: &str, v: &[f64]) -> Result<(), DefectError> {
    if v.windows(2).any(|w| w[1] <= w[0]) || v.iter().any(|x| !x.is_finite()) {
        return Err(DefectError::InvalidParams(format!("{name} must be finite and strictly increasing")));
    }
    Ok(())
}

impl DefectModelParams {
    pub fn validate(&self) -> Result<(), DefectError> {
        check_positive("insertion_rates", &self.insertion_rates)?;
        check_probs("detection", &self.detection)?;
        check_probs("manifestation", &self.manifestation)?;
        if self.manifestation[0] != 0.0 {
            return Err(DefectError::InvalidParams(format!(
                "manifestation for usage None must be 0, got {}",
                self.manifestation[0]
            )));
        }
        check_positive("complexity_multipliers", &self.complexity_multipliers)?;
        check_positive("complexity_rate_factors", &self.complexity_rate_factors)?;
        check_increasing("effective_kloc_thresholds", &self.effective_kloc_thresholds)?;
        check_increasing("hours_thresholds", &self.hours_thresholds)?;
        for (name, agg, n) in [
            ("verification", &self.verification, 4),
            ("development", &self.development, 4),
            ("complexity", &self.complexity, 4),
            ("size", &self.size, 2),
        ] {
            if agg.weights.len() != n {
                return Err(DefectError::InvalidParams(format!(
                    "{name}.weights has {} entries, expected {n}",
                    agg.weights.len()
                )));
            }
        }
        let space = StateSpace::counts(self.count_intervals.clone())
            .map_err(|e| DefectError::InvalidParams(format!("count_intervals: {e}")))?;
        let ivs = space.intervals().expect("count space");
        if ivs[0].lo != 0 || !ivs[ivs.len() - 1].is_unbounded() {
            return Err(DefectError::InvalidParams(
                "count_intervals must start at 0 and end with an unbounded interval".into(),
            ));
        }
        Ok(())
    }

    /// Manifestation probabilities over a horizon of `months`, scaled from
    /// the per-year values as `1 - (1 - p12)^(T / 12)`.
    pub fn manifestation_for(&self, months: u32) -> [f64; 5] {
        if months == 12 {
            return self.manifestation;
        }
        let t = months as f64 / 12.0;
        self.manifestation.map(|p| if p == 0.0 { 0.0 } else { 1.0 - (1.0 - p).powf(t) })
    }

    /// Level index of `x` against ascending exclusive upper bounds.
    pub(crate) fn level_of(thresholds: &[f64; 4], x: f64) -> usize {
        thresholds.iter().position(|t| x < *t).unwrap_or(4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        DefectModelParams::default().validate().unwrap();
    }

    #[test]
    fn horizon_scaling() {
        let p = DefectModelParams::default();
        assert_eq!(p.manifestation_for(12), p.manifestation);
        let two_years = p.manifestation_for(24);
        assert!((two_years[3] - (1.0 - 0.7f64 * 0.7)).abs() < 1e-15);
        assert_eq!(two_years[0], 0.0);
    }

    #[test]
    fn rejects_bad_params() {
        let mut p = DefectModelParams::default();
        p.manifestation[0] = 0.01;
        assert!(p.validate().is_err());
        let mut p = DefectModelParams::default();
        p.detection[2] = 1.2;
        assert!(p.validate().is_err());
        let mut p = DefectModelParams::default();
        p.insertion_rates[0] = 0.0;
        assert!(p.validate().is_err());
        let mut p = DefectModelParams::default();
        p.count_intervals.pop();
        assert!(p.validate().is_err());
    }

    #[test]
    fn levels() {
        let t = [10.0, 30.0, 80.0, 200.0];
        assert_eq!(DefectModelParams::level_of(&t, 0.0), 0);
        assert_eq!(DefectModelParams::level_of(&t, 10.0), 1);
        assert_eq!(DefectModelParams::level_of(&t, 250.0), 4);
    }
}
