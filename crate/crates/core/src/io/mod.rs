//! JSON document formats and the result renderings shared by the CLI and
//! the HTTP service.
//!
//! Every document serializes canonically: fields in declaration order, maps
//! in a fixed order, shortest round-trip decimals, two-space indentation and
//! a trailing newline. Parsing is strict by default; unknown fields are
//! rejected with their path.

mod evidence;
mod fault_tree;
mod model;
mod params;
pub mod render;
mod report;
mod scenario;

pub use evidence::{evidence_document, parse_evidence, serialize_evidence, EvidenceDocument, FindingDoc, SoftDoc};
pub use fault_tree::{parse_fault_tree, serialize_fault_tree, FaultTreeDocument, GateDoc, GateKindDoc};
pub use model::{model_document, parse_model, parse_model_document, serialize_model, CpdDoc, ModelDocument, NodeDoc};
pub use params::{parse_params, parse_priors, serialize_params, serialize_priors, validate_params_at};
pub use report::{ErrorKind, ErrorReport};
pub use scenario::{
    parse_records, parse_scenario, serialize_records, serialize_scenario, AnswerDoc, RecordDoc, RecordsDocument,
    ScenarioDocument,
};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

/// Version written into every versioned document.
pub const FORMAT_VERSION: u32 = 1;

/// Environment variable that switches parsing to permissive mode when set
/// to `0`.
pub const STRICT_ENV: &str = "HEISENBN_STRICT";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseOptions {
    /// Reject unknown fields.
    pub strict: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { strict: true }
    }
}

impl ParseOptions {
    pub fn permissive() -> Self {
        ParseOptions { strict: false }
    }

    /// Strict unless `HEISENBN_STRICT=0`.
    pub fn from_env() -> Self {
        ParseOptions { strict: std::env::var(STRICT_ENV).map(|v| v.trim() != "0").unwrap_or(true) }
    }
}

/// Document error. Every variant carries the path of the offending element,
/// `$` for the document root.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("{path}: syntax error at line {line} column {column}: {message}")]
    Syntax { path: String, line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {message}")]
    Validation { path: String, message: String },
}

impl IoError {
    pub fn path(&self) -> &str {
        match self {
            IoError::Syntax { path, .. } | IoError::Schema { path, .. } | IoError::Validation { path, .. } => path,
        }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        IoError::Schema { path: path.into(), message: message.into() }
    }

    pub(crate) fn validation(path: impl Into<String>, message: impl ToString) -> Self {
        IoError::Validation { path: path.into(), message: message.to_string() }
    }
}

/// Join a path prefix and a child segment.
pub(crate) fn join(prefix: &str, child: &str) -> String {
    match (prefix, child) {
        ("$" | "", c) => c.to_string(),
        (p, c) if c.starts_with('[') => format!("{p}{c}"),
        (p, c) => format!("{p}.{c}"),
    }
}

fn ignored_path(p: &serde_ignored::Path) -> String {
    use serde_ignored::Path;
    match p {
        Path::Root => "$".to_string(),
        Path::Seq { parent, index } => join(&ignored_path(parent), &format!("[{index}]")),
        Path::Map { parent, key } => join(&ignored_path(parent), key),
        Path::Some { parent } | Path::NewtypeStruct { parent } | Path::NewtypeVariant { parent } => ignored_path(parent),
    }
}

fn error_path(p: &serde_path_to_error::Path) -> String {
    let s = p.to_string();
    if s == "." || s.is_empty() {
        "$".to_string()
    } else {
        s
    }
}

/// Deserialize `text`, tracking the path of the first error and of any
/// unknown field.
pub fn read_document<T: DeserializeOwned>(text: &str, opts: ParseOptions) -> Result<T, IoError> {
    let mut unknown = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let value: Result<T, _> = {
        let mut record = |p: serde_ignored::Path| unknown.push(ignored_path(&p));
        let ignoring = serde_ignored::Deserializer::new(&mut de, &mut record);
        serde_path_to_error::deserialize(ignoring)
    };
    let value = value.map_err(|e| {
        let path = error_path(e.path());
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            IoError::Syntax { path, line: inner.line(), column: inner.column(), message: strip_position(&inner) }
        } else {
            IoError::Schema { path, message: strip_position(&inner) }
        }
    })?;
    de.end().map_err(|e| IoError::Syntax {
        path: "$".into(),
        line: e.line(),
        column: e.column(),
        message: strip_position(&e),
    })?;
    if opts.strict {
        if let Some(path) = unknown.into_iter().next() {
            return Err(IoError::schema(path, "unknown field"));
        }
    }
    Ok(value)
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

/// Canonical JSON text of any serializable value.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize without error");
    s.push('\n');
    s
}
