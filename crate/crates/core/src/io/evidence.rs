use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{join, read_document, to_canonical_json, IoError, ParseOptions};
use crate::bn::{BnError, Evidence, Finding, Network};

/// Findings keyed by node id, e.g.
/// `{"testing_quality": {"soft": {"High": 0.8, "Medium": 0.2}}, "X": {"state": "true"}}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvidenceDocument(pub BTreeMap<String, FindingDoc>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingDoc {
    State(String),
    Soft(SoftDoc),
}

/// Soft likelihoods by state label (missing labels get zero) or as a vector
/// in state order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SoftDoc {
    Labels(IndexMap<String, f64>),
    Vector(Vec<f64>),
}

impl EvidenceDocument {
    /// Resolve labels against `net`.
    pub fn resolve(&self, net: &Network) -> Result<Evidence, IoError> {
        let mut ev = Evidence::new();
        for (id, finding) in &self.0 {
            let node = net.node(id).map_err(|e| IoError::validation(id.as_str(), e))?;
            let states = node.states();
            let f = match finding {
                FindingDoc::State(s) => {
                    if states.index_of(s).is_none() {
                        return Err(IoError::validation(
                            join(id, "state"),
                            BnError::UnknownState { node: id.clone(), state: s.clone() },
                        ));
                    }
                    Finding::Hard(s.clone())
                }
                FindingDoc::Soft(SoftDoc::Vector(v)) => Finding::Soft(v.clone()),
                FindingDoc::Soft(SoftDoc::Labels(m)) => {
                    let mut v = vec![0.0; states.len()];
                    for (label, w) in m {
                        let i = states.index_of(label).ok_or_else(|| {
                            IoError::validation(
                                join(&join(id, "soft"), label),
                                BnError::UnknownState { node: id.clone(), state: label.clone() },
                            )
                        })?;
                        v[i] += w;
                    }
                    Finding::Soft(v)
                }
            };
            ev.insert(id.clone(), f);
        }
        ev.validate(net).map_err(|e| {
            let path = match e.node() {
                Some(n) => match self.0.get(n) {
                    Some(FindingDoc::Soft(_)) => join(n, "soft"),
                    Some(FindingDoc::State(_)) => join(n, "state"),
                    None => n.to_string(),
                },
                None => "$".to_string(),
            };
            IoError::validation(path, e)
        })?;
        Ok(ev)
    }
}

/// Document form of `ev`, with soft findings written by label and zero
/// entries left out.
pub fn evidence_document(ev: &Evidence, net: &Network) -> Result<EvidenceDocument, BnError> {
    ev.validate(net)?;
    let mut out = BTreeMap::new();
    for (id, f) in ev.iter() {
        let doc = match f {
            Finding::Hard(s) => FindingDoc::State(s.clone()),
            Finding::Soft(v) => {
                let labels = net.node(id)?.states().labels();
                FindingDoc::Soft(SoftDoc::Labels(
                    labels.iter().zip(v).filter(|(_, w)| **w != 0.0).map(|(l, w)| (l.clone(), *w)).collect(),
                ))
            }
        };
        out.insert(id.to_string(), doc);
    }
    Ok(EvidenceDocument(out))
}

pub fn parse_evidence(text: &str, opts: ParseOptions) -> Result<EvidenceDocument, IoError> {
    read_document(text, opts)
}

pub fn serialize_evidence(doc: &EvidenceDocument) -> String {
    to_canonical_json(doc)
}
