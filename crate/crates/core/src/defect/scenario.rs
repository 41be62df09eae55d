use std::collections::BTreeMap;

use super::questionnaire::{answer_dimensions, Answer};
use super::DefectError;

pub const DEFAULT_HORIZON_MONTHS: u32 = 12;

/// Questionnaire answers and size inputs for one project.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectScenario {
    pub name: Option<String>,
    /// One answer per questionnaire dimension.
    pub answers: BTreeMap<String, Answer>,
    /// New or changed thousands of lines of code.
    pub kloc: f64,
    /// Rating of the new functionality's complexity.
    pub complexity: Answer,
    pub hours_booked: f64,
    /// Rating over None..VeryHigh.
    pub usage: Answer,
    pub horizon_months: u32,
    /// Whether the product goes through safety certification; `None` when
    /// undecided.
    pub certified: Option<bool>,
}

impl ProjectScenario {
    /// Every dimension and the complexity rating answered with the same
    /// point level.
    pub fn uniform(level: usize, kloc: f64, hours_booked: f64, usage: Answer) -> Self {
        ProjectScenario {
            name: None,
            answers: answer_dimensions().map(|d| (d.to_string(), Answer::point(level))).collect(),
            kloc,
            complexity: Answer::point(level),
            hours_booked,
            usage,
            horizon_months: DEFAULT_HORIZON_MONTHS,
            certified: None,
        }
    }

    pub fn with_answer(mut self, dimension: &str, answer: Answer) -> Self {
        self.answers.insert(dimension.to_string(), answer);
        self
    }

    pub fn validate(&self) -> Result<(), DefectError> {
        for d in answer_dimensions() {
            if !self.answers.contains_key(d) {
                return Err(DefectError::MissingDimension(d.to_string()));
            }
        }
        if let Some(extra) = self.answers.keys().find(|k| !answer_dimensions().any(|d| d == k.as_str())) {
            return Err(DefectError::SchemaMismatch(format!("unknown dimension '{extra}'")));
        }
        if !(self.kloc.is_finite() && self.kloc >= 0.0) {
            return Err(DefectError::NegativeInput(format!("kloc = {}", self.kloc)));
        }
        if !(self.hours_booked.is_finite() && self.hours_booked >= 0.0) {
            return Err(DefectError::NegativeInput(format!("hours_booked = {}", self.hours_booked)));
        }
        if self.horizon_months == 0 {
            return Err(DefectError::SchemaMismatch("horizon_months must be positive".into()));
        }
        Ok(())
    }
}
