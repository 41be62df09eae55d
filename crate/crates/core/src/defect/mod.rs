//! Defect-prediction template: questionnaire, parameters, network
//! instantiation, forward prediction and diagnosis from verification counts.

mod params;
mod predict;
mod questionnaire;
mod scenario;
mod template;

pub use params::{AggregateParams, DefectModelParams};
pub use predict::{
    diagnose_from_verification, diagnose_with, effective_size, predict_defects, predict_with, EffectiveSize,
    DIAGNOSIS_TARGETS, PREDICTION_TARGETS,
};
pub use questionnaire::{
    answer_dimensions, level_labels, rating_scales, Answer, RatingScale, ScaleLevel, COMPLEXITY_DIMENSIONS,
    DEVELOPMENT_DIMENSIONS, USAGE_LABELS, VERIFICATION_DIMENSIONS,
};
pub use scenario::{ProjectScenario, DEFAULT_HORIZON_MONTHS};
pub use template::{build_defect_network, ids, DefectNetwork, DefectTemplate, MIN_INSERTION_RATE};

use thiserror::Error;

use crate::bn::BnError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DefectError {
    #[error("scenario is missing an answer for '{0}'")]
    MissingDimension(String),
    #[error("scenario does not match the questionnaire: {0}")]
    SchemaMismatch(String),
    #[error("negative input: {0}")]
    NegativeInput(String),
    #[error("invalid answer: {0}")]
    InvalidAnswer(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("count {0} is not covered by the count intervals")]
    CountOutOfRange(u64),
    #[error(transparent)]
    Network(#[from] BnError),
}
