use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{join, read_document, to_canonical_json, IoError, ParseOptions, FORMAT_VERSION};
use crate::bn::RANKED_LABELS;
use crate::calibration::ProjectRecord;
use crate::defect::{answer_dimensions, level_labels, Answer, ProjectScenario, DEFAULT_HORIZON_MONTHS, USAGE_LABELS};

/// A rating: a single level name, or weights by level name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnswerDoc {
    Level(String),
    Weights(IndexMap<String, f64>),
}

impl AnswerDoc {
    fn from_answer(a: &Answer, labels: &[&str; 5]) -> Self {
        match a.point_level() {
            Some(i) => AnswerDoc::Level(labels[i].to_string()),
            None => AnswerDoc::Weights(
                labels
                    .iter()
                    .zip(a.probs())
                    .filter(|(_, w)| **w != 0.0)
                    .map(|(l, w)| (l.to_string(), *w))
                    .collect(),
            ),
        }
    }

    fn to_answer(&self, labels: &[&str; 5], path: &str) -> Result<Answer, IoError> {
        match self {
            AnswerDoc::Level(l) => labels
                .iter()
                .position(|x| x == l)
                .map(Answer::point)
                .ok_or_else(|| IoError::validation(path, format!("unknown level '{l}', expected one of {labels:?}"))),
            AnswerDoc::Weights(m) => {
                if let Some(l) = m.keys().find(|l| !labels.contains(&l.as_str())) {
                    return Err(IoError::validation(join(path, l), format!("unknown level '{l}', expected one of {labels:?}")));
                }
                Answer::from_pairs(labels, m.iter().map(|(l, w)| (l.as_str(), *w))).map_err(|e| IoError::validation(path, e))
            }
        }
    }
}

fn default_horizon() -> u32 {
    DEFAULT_HORIZON_MONTHS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kloc: f64,
    pub hours_booked: f64,
    #[serde(default = "default_horizon")]
    pub horizon_months: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certified: Option<bool>,
    /// New-functionality complexity.
    pub complexity: AnswerDoc,
    /// Field usage, None..VeryHigh.
    pub usage: AnswerDoc,
    pub answers: BTreeMap<String, AnswerDoc>,
}

impl ScenarioDocument {
    pub fn from_scenario(s: &ProjectScenario, versioned: bool) -> Self {
        ScenarioDocument {
            format_version: versioned.then_some(FORMAT_VERSION),
            name: s.name.clone(),
            kloc: s.kloc,
            hours_booked: s.hours_booked,
            horizon_months: s.horizon_months,
            certified: s.certified,
            complexity: AnswerDoc::from_answer(&s.complexity, &RANKED_LABELS),
            usage: AnswerDoc::from_answer(&s.usage, &USAGE_LABELS),
            answers: s
                .answers
                .iter()
                .map(|(d, a)| (d.clone(), AnswerDoc::from_answer(a, level_labels(d))))
                .collect(),
        }
    }

    /// Validated scenario; error paths are relative to `prefix`.
    pub fn to_scenario(&self, prefix: &str) -> Result<ProjectScenario, IoError> {
        let at = |f: &str| join(prefix, f);
        if let Some(v) = self.format_version {
            if v != FORMAT_VERSION {
                return Err(IoError::schema(at("format_version"), format!("unsupported version {v}")));
            }
        }
        if !(self.kloc.is_finite() && self.kloc >= 0.0) {
            return Err(IoError::validation(at("kloc"), format!("kloc = {} must be >= 0", self.kloc)));
        }
        if !(self.hours_booked.is_finite() && self.hours_booked >= 0.0) {
            return Err(IoError::validation(
                at("hours_booked"),
                format!("hours_booked = {} must be >= 0", self.hours_booked),
            ));
        }
        if self.horizon_months == 0 {
            return Err(IoError::validation(at("horizon_months"), "horizon_months must be positive"));
        }
        let answers_path = at("answers");
        if let Some(extra) = self.answers.keys().find(|k| !answer_dimensions().any(|d| d == k.as_str())) {
            return Err(IoError::validation(join(&answers_path, extra), format!("unknown dimension '{extra}'")));
        }
        let mut answers = BTreeMap::new();
        for d in answer_dimensions() {
            let path = join(&answers_path, d);
            let doc = self
                .answers
                .get(d)
                .ok_or_else(|| IoError::validation(&path, format!("missing answer for '{d}'")))?;
            answers.insert(d.to_string(), doc.to_answer(level_labels(d), &path)?);
        }
        Ok(ProjectScenario {
            name: self.name.clone(),
            answers,
            kloc: self.kloc,
            complexity: self.complexity.to_answer(&RANKED_LABELS, &at("complexity"))?,
            hours_booked: self.hours_booked,
            usage: self.usage.to_answer(&USAGE_LABELS, &at("usage"))?,
            horizon_months: self.horizon_months,
            certified: self.certified,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordDoc {
    pub scenario: ScenarioDocument,
    pub observed_found_verification: u64,
    /// Absent when not yet known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed_field_first_year: Option<u64>,
}

fn format_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordsDocument {
    #[serde(default = "format_version")]
    pub format_version: u32,
    pub records: Vec<RecordDoc>,
}

impl RecordsDocument {
    pub fn from_records(records: &[ProjectRecord]) -> Self {
        RecordsDocument {
            format_version: FORMAT_VERSION,
            records: records
                .iter()
                .map(|r| RecordDoc {
                    scenario: ScenarioDocument::from_scenario(&r.scenario, false),
                    observed_found_verification: r.observed_found_verification,
                    observed_field_first_year: r.observed_field_first_year,
                })
                .collect(),
        }
    }

    pub fn to_records(&self) -> Result<Vec<ProjectRecord>, IoError> {
        if self.format_version != FORMAT_VERSION {
            return Err(IoError::schema("format_version", format!("unsupported version {}", self.format_version)));
        }
        self.records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                Ok(ProjectRecord {
                    scenario: r.scenario.to_scenario(&format!("records[{i}].scenario"))?,
                    observed_found_verification: r.observed_found_verification,
                    observed_field_first_year: r.observed_field_first_year,
                })
            })
            .collect()
    }
}

pub fn parse_scenario(text: &str, opts: ParseOptions) -> Result<ProjectScenario, IoError> {
    read_document::<ScenarioDocument>(text, opts)?.to_scenario("$")
}

pub fn serialize_scenario(s: &ProjectScenario) -> String {
    to_canonical_json(&ScenarioDocument::from_scenario(s, true))
}

pub fn parse_records(text: &str, opts: ParseOptions) -> Result<Vec<ProjectRecord>, IoError> {
    read_document::<RecordsDocument>(text, opts)?.to_records()
}

pub fn serialize_records(records: &[ProjectRecord]) -> String {
    to_canonical_json(&RecordsDocument::from_records(records))
}
