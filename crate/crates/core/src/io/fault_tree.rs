use serde::{Deserialize, Serialize};

use super::{read_document, to_canonical_json, IoError, ParseOptions, FORMAT_VERSION};
use crate::fault_tree::{BasicEvent, FaultTree, FaultTreeError, Gate, GateKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKindDoc {
    And,
    Or,
    NoisyOr { q: Vec<f64>, leak: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateDoc {
    pub id: String,
    pub kind: GateKindDoc,
    pub children: Vec<String>,
}

fn format_version() -> u32 {
    FORMAT_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultTreeDocument {
    #[serde(default = "format_version")]
    pub format_version: u32,
    pub top: String,
    pub basic_events: Vec<BasicEvent>,
    pub gates: Vec<GateDoc>,
}

impl From<&FaultTree> for FaultTreeDocument {
    fn from(t: &FaultTree) -> Self {
        FaultTreeDocument {
            format_version: FORMAT_VERSION,
            top: t.top.clone(),
            basic_events: t.basic_events.clone(),
            gates: t
                .gates
                .iter()
                .map(|g| GateDoc {
                    id: g.id.clone(),
                    kind: match &g.kind {
                        GateKind::And => GateKindDoc::And,
                        GateKind::Or => GateKindDoc::Or,
                        GateKind::NoisyOr { q, leak } => GateKindDoc::NoisyOr { q: q.clone(), leak: *leak },
                    },
                    children: g.children.clone(),
                })
                .collect(),
        }
    }
}

impl FaultTreeDocument {
    fn locate(&self, err: FaultTreeError) -> IoError {
        let event = |id: &str| self.basic_events.iter().position(|e| e.id == id);
        let gate = |id: &str| self.gates.iter().position(|g| g.id == id);
        let element = |id: &str| match (event(id), gate(id)) {
            (Some(i), _) => format!("basic_events[{i}]"),
            (None, Some(i)) => format!("gates[{i}]"),
            _ => "$".to_string(),
        };
        let path = match &err {
            FaultTreeError::DuplicateId(id) => {
                let hits: Vec<String> = self
                    .basic_events
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| &e.id == id)
                    .map(|(i, _)| format!("basic_events[{i}].id"))
                    .chain(
                        self.gates.iter().enumerate().filter(|(_, g)| &g.id == id).map(|(i, _)| format!("gates[{i}].id")),
                    )
                    .collect();
                hits.get(1).cloned().unwrap_or_else(|| "$".into())
            }
            FaultTreeError::UnknownChild { gate: g, .. } | FaultTreeError::EmptyGate(g) => {
                format!("{}.children", element(g))
            }
            FaultTreeError::UnknownTop(_) => "top".into(),
            FaultTreeError::Unreachable(id) => element(id),
            FaultTreeError::ProbabilityOutOfRange { id, .. } => format!("{}.probability", element(id)),
            FaultTreeError::EvidenceNotOnTop { .. } => "top".into(),
            FaultTreeError::Network(e) => match e.node() {
                Some(n) if gate(n).is_some() => format!("{}.kind", element(n)),
                Some(n) => element(n),
                None => "$".into(),
            },
        };
        IoError::validation(path, err)
    }

    /// Validated tree; the tree is also compiled once so that noisy-or
    /// parameter errors surface here.
    pub fn to_fault_tree(&self) -> Result<FaultTree, IoError> {
        if self.format_version != FORMAT_VERSION {
            return Err(IoError::schema("format_version", format!("unsupported version {}", self.format_version)));
        }
        let tree = FaultTree {
            top: self.top.clone(),
            basic_events: self.basic_events.clone(),
            gates: self
                .gates
                .iter()
                .map(|g| Gate {
                    id: g.id.clone(),
                    kind: match &g.kind {
                        GateKindDoc::And => GateKind::And,
                        GateKindDoc::Or => GateKind::Or,
                        GateKindDoc::NoisyOr { q, leak } => GateKind::NoisyOr { q: q.clone(), leak: *leak },
                    },
                    children: g.children.clone(),
                })
                .collect(),
        };
        tree.compile().map_err(|e| self.locate(e))?;
        Ok(tree)
    }
}

pub fn parse_fault_tree(text: &str, opts: ParseOptions) -> Result<FaultTree, IoError> {
    read_document::<FaultTreeDocument>(text, opts)?.to_fault_tree()
}

pub fn serialize_fault_tree(tree: &FaultTree) -> String {
    to_canonical_json(&FaultTreeDocument::from(tree))
}
