//! Error classification shared by the CLI (exit codes) and the HTTP service
//! (status codes). Both emit the same serialized report.

use serde::Serialize;

use super::IoError;
use crate::bn::BnError;
use crate::calibration::CalibrationError;
use crate::defect::DefectError;
use crate::fault_tree::FaultTreeError;
use crate::sensitivity::SensitivityError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Syntax,
    Schema,
    Validation,
    UnknownNode,
    UnknownSession,
    ImpossibleEvidence,
    Runtime,
}

impl ErrorKind {
    /// Input problems as opposed to failures while computing.
    pub fn is_input_error(self) -> bool {
        !matches!(self, ErrorKind::ImpossibleEvidence | ErrorKind::Runtime)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorReport {
    pub kind: ErrorKind,
    /// Document path, or the node id for errors raised by a model.
    pub path: String,
    pub message: String,
}

impl ErrorReport {
    pub fn new(kind: ErrorKind, path: impl Into<String>, message: impl ToString) -> Self {
        ErrorReport { kind, path: path.into(), message: message.to_string() }
    }

    /// Same report with `prefix` (e.g. a file name) in front of the path.
    pub fn in_document(mut self, prefix: &str) -> Self {
        self.path = if self.path == "$" { prefix.to_string() } else { format!("{prefix}:{}", self.path) };
        self
    }
}

impl std::fmt::Display for ErrorReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl From<IoError> for ErrorReport {
    fn from(e: IoError) -> Self {
        let kind = match e {
            IoError::Syntax { .. } => ErrorKind::Syntax,
            IoError::Schema { .. } => ErrorKind::Schema,
            IoError::Validation { .. } => ErrorKind::Validation,
        };
        let message = match &e {
            IoError::Syntax { line, column, message, .. } => format!("line {line} column {column}: {message}"),
            IoError::Schema { message, .. } | IoError::Validation { message, .. } => message.clone(),
        };
        ErrorReport::new(kind, e.path(), message)
    }
}

impl From<BnError> for ErrorReport {
    fn from(e: BnError) -> Self {
        let kind = match e {
            BnError::UnknownNode(_) => ErrorKind::UnknownNode,
            BnError::ZeroProbabilityEvidence => ErrorKind::ImpossibleEvidence,
            BnError::TooLarge { .. } => ErrorKind::Runtime,
            _ => ErrorKind::Validation,
        };
        ErrorReport::new(kind, e.node().unwrap_or("$"), &e)
    }
}

impl From<DefectError> for ErrorReport {
    fn from(e: DefectError) -> Self {
        match e {
            DefectError::Network(b) => b.into(),
            other => ErrorReport::new(ErrorKind::Validation, "$", other),
        }
    }
}

impl From<FaultTreeError> for ErrorReport {
    fn from(e: FaultTreeError) -> Self {
        match e {
            FaultTreeError::Network(b) => b.into(),
            other => ErrorReport::new(ErrorKind::Validation, "$", other),
        }
    }
}

impl From<SensitivityError> for ErrorReport {
    fn from(e: SensitivityError) -> Self {
        match e {
            SensitivityError::Network(b) => b.into(),
            SensitivityError::TargetNotSummarizable(ref n) | SensitivityError::InputIsTarget(ref n) => {
                ErrorReport::new(ErrorKind::Validation, n.clone(), &e)
            }
        }
    }
}

impl From<CalibrationError> for ErrorReport {
    fn from(e: CalibrationError) -> Self {
        match e {
            CalibrationError::Defect(d) => d.into(),
            other => ErrorReport::new(ErrorKind::Validation, "$", other),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(ErrorReport::from(BnError::ZeroProbabilityEvidence).kind, ErrorKind::ImpossibleEvidence);
        let r = ErrorReport::from(BnError::UnknownNode("q".into()));
        assert_eq!((r.kind, r.path.as_str()), (ErrorKind::UnknownNode, "q"));
        let r = ErrorReport::from(IoError::schema("nodes[2].cpd", "bad")).in_document("m.json");
        assert_eq!(r.to_string(), "m.json:nodes[2].cpd: bad");
        assert!(!ErrorKind::Runtime.is_input_error());
    }
}
