//! Fitting the defect template's count parameters to completed projects.
//!
//! The fit is a maximum a posteriori coordinate search over the insertion
//! rates, detection probabilities and manifestation probabilities. Everything
//! else (ranked aggregates, thresholds, multipliers) stays at its input value.

mod fit;
mod likelihood;
mod synth;

pub use fit::{fit_parameters, log_likelihood, FitReport, FitSettings, ParameterChange, RecordFit};
pub use synth::{synthesize_records, synthesize_records_with, SynthConfig, SyntheticRecord};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::defect::{DefectError, ProjectScenario};

/// A finished project: its questionnaire plus the defect counts observed in
/// verification and, when known, in the field over the scenario horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectRecord {
    pub scenario: ProjectScenario,
    pub observed_found_verification: u64,
    pub observed_field_first_year: Option<u64>,
}

/// Prior strength and search bounds.
///
/// Without an explicit Beta prior, each fitted probability gets a Beta
/// log-density with mode at its initial value and `pseudo_count` total
/// weight. Each rate gets a Gamma log-density with mode at its initial value
/// and shape `pseudo_count + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Priors {
    pub pseudo_count: f64,
    /// Inclusive search range per insertion rate, VeryLow..VeryHigh.
    pub rate_bounds: [(f64, f64); 5],
    /// Beta `(alpha, beta)` per detection probability.
    pub detection_beta: Option<[(f64, f64); 5]>,
    /// Beta `(alpha, beta)` per manifestation probability; the `None` usage
    /// entry is ignored.
    pub manifestation_beta: Option<[(f64, f64); 5]>,
}

impl Default for Priors {
    fn default() -> Self {
        Priors { pseudo_count: 1.0, rate_bounds: [(0.05, 50.0); 5], detection_beta: None, manifestation_beta: None }
    }
}

impl Priors {
    pub fn with_pseudo_count(pseudo_count: f64) -> Self {
        Priors { pseudo_count, ..Priors::default() }
    }

    pub fn validate(&self) -> Result<(), CalibrationError> {
        if !(self.pseudo_count.is_finite() && self.pseudo_count > 0.0) {
            return Err(CalibrationError::InvalidPriors(format!(
                "pseudo_count = {} must be finite and > 0",
                self.pseudo_count
            )));
        }
        for (i, (lo, hi)) in self.rate_bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && *lo > 0.0 && hi > lo) {
                return Err(CalibrationError::InvalidPriors(format!(
                    "rate_bounds[{i}] = ({lo}, {hi}) must satisfy 0 < lo < hi"
                )));
            }
        }
        for (name, beta) in [("detection_beta", &self.detection_beta), ("manifestation_beta", &self.manifestation_beta)] {
            if let Some(b) = beta {
                if let Some(i) = b.iter().position(|(a, b)| !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0)) {
                    return Err(CalibrationError::InvalidPriors(format!("{name}[{i}] must have positive parameters")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalibrationError {
    #[error("no project records to fit")]
    EmptyRecords,
    #[error("invalid priors: {0}")]
    InvalidPriors(String),
    #[error("invalid fit settings: {0}")]
    InvalidSettings(String),
    #[error(transparent)]
    Defect(#[from] DefectError),
}
