use serde::{Deserialize, Serialize};

use super::{join, read_document, to_canonical_json, IoError, ParseOptions, FORMAT_VERSION};
use crate::bn::{BnError, Interval, Network, NodeKind, NodeSpec, StateSpace, DEFAULT_TAIL_FACTOR, RANKED_LABELS};
use crate::cpd::{Cpd, NoisyOrCpd, RankedCpd};
use crate::defect::DefectModelParams;

fn format_version() -> u32 {
    FORMAT_VERSION
}

fn default_tail() -> f64 {
    DEFAULT_TAIL_FACTOR
}

fn is_default_tail(t: &f64) -> bool {
    *t == DEFAULT_TAIL_FACTOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    #[serde(default = "format_version")]
    pub format_version: u32,
    #[serde(default = "default_tail", skip_serializing_if = "is_default_tail")]
    pub tail_factor: f64,
    pub nodes: Vec<NodeDoc>,
    /// Parameters the network was generated from, when it is an instance of
    /// the reference defect template.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub template: Option<DefectModelParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeDoc {
    pub id: String,
    pub kind: NodeKind,
    /// Labeled nodes only; ranked nodes always use VeryLow..VeryHigh.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<String>>,
    /// Count nodes only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<Interval>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub parents: Vec<String>,
    pub cpd: CpdDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CpdDoc {
    Table(Vec<Vec<f64>>),
    NoisyOr(NoisyOrCpd),
    Ranked(RankedCpd),
    Poisson { rate_table: Vec<f64> },
    Binomial { p_table: Vec<f64> },
    Subtract,
}

impl From<&Cpd> for CpdDoc {
    fn from(c: &Cpd) -> Self {
        match c {
            Cpd::Table(rows) => CpdDoc::Table(rows.clone()),
            Cpd::NoisyOr(n) => CpdDoc::NoisyOr(n.clone()),
            Cpd::Ranked(r) => CpdDoc::Ranked(r.clone()),
            Cpd::Poisson { rates } => CpdDoc::Poisson { rate_table: rates.clone() },
            Cpd::Binomial { p } => CpdDoc::Binomial { p_table: p.clone() },
            Cpd::Subtract => CpdDoc::Subtract,
        }
    }
}

impl From<CpdDoc> for Cpd {
    fn from(c: CpdDoc) -> Self {
        match c {
            CpdDoc::Table(rows) => Cpd::Table(rows),
            CpdDoc::NoisyOr(n) => Cpd::NoisyOr(n),
            CpdDoc::Ranked(r) => Cpd::Ranked(r),
            CpdDoc::Poisson { rate_table } => Cpd::Poisson { rates: rate_table },
            CpdDoc::Binomial { p_table } => Cpd::Binomial { p: p_table },
            CpdDoc::Subtract => Cpd::Subtract,
        }
    }
}

impl NodeDoc {
    fn to_spec(&self, path: &str) -> Result<NodeSpec, IoError> {
        let states = match self.kind {
            NodeKind::Labeled => {
                if self.intervals.is_some() {
                    return Err(IoError::schema(join(path, "intervals"), "labeled nodes take states, not intervals"));
                }
                let labels = self
                    .states
                    .clone()
                    .ok_or_else(|| IoError::schema(join(path, "states"), "labeled node needs states"))?;
                StateSpace::new(labels).map_err(|e| IoError::validation(join(path, "states"), e))?
            }
            NodeKind::Ranked5 => {
                if self.intervals.is_some() {
                    return Err(IoError::schema(join(path, "intervals"), "ranked nodes take no intervals"));
                }
                if let Some(s) = &self.states {
                    if s.iter().map(String::as_str).ne(RANKED_LABELS) {
                        return Err(IoError::schema(
                            join(path, "states"),
                            format!("ranked states must be {RANKED_LABELS:?}"),
                        ));
                    }
                }
                StateSpace::ranked()
            }
            NodeKind::Count => {
                if self.states.is_some() {
                    return Err(IoError::schema(join(path, "states"), "count nodes take intervals, not states"));
                }
                let ivs = self
                    .intervals
                    .clone()
                    .ok_or_else(|| IoError::schema(join(path, "intervals"), "count node needs intervals"))?;
                StateSpace::counts(ivs).map_err(|e| IoError::validation(join(path, "intervals"), e))?
            }
        };
        Ok(NodeSpec {
            id: self.id.clone(),
            kind: self.kind,
            states,
            parents: self.parents.clone(),
            cpd: self.cpd.clone().into(),
        })
    }
}

/// Map a build error to the document element it came from.
fn locate(doc: &ModelDocument, err: BnError) -> IoError {
    let index = |id: &str| doc.nodes.iter().position(|n| n.id == id);
    let at = |id: &str, field: &str| match index(id) {
        Some(i) => join(&format!("nodes[{i}]"), field),
        None => "nodes".to_string(),
    };
    let path = match &err {
        BnError::DuplicateNode(id) => match doc.nodes.iter().enumerate().filter(|(_, n)| &n.id == id).nth(1) {
            Some((i, _)) => format!("nodes[{i}].id"),
            None => "nodes".to_string(),
        },
        BnError::UnknownParent { node, .. } | BnError::CycleDetected(node) => at(node, "parents"),
        BnError::CpdShapeMismatch { node, .. } | BnError::RowNotNormalized { node, .. } | BnError::Cpd { node, .. } => {
            at(node, "cpd")
        }
        other => match other.node() {
            Some(n) => at(n, ""),
            None => "$".to_string(),
        },
    };
    IoError::validation(path.trim_end_matches('.'), err)
}

impl ModelDocument {
    pub fn to_network(&self) -> Result<Network, IoError> {
        if self.format_version != FORMAT_VERSION {
            return Err(IoError::schema(
                "format_version",
                format!("unsupported version {}, expected {FORMAT_VERSION}", self.format_version),
            ));
        }
        let specs = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| n.to_spec(&format!("nodes[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(t) = &self.template {
            t.validate().map_err(|e| super::params::locate_params(e, "template"))?;
        }
        Network::build_with_tail_factor(specs, self.tail_factor).map_err(|e| match e {
            BnError::InvalidStateSpace(_) => IoError::validation("tail_factor", e),
            e => locate(self, e),
        })
    }
}

pub fn model_document(net: &Network, template: Option<&DefectModelParams>) -> ModelDocument {
    ModelDocument {
        format_version: FORMAT_VERSION,
        tail_factor: net.tail_factor(),
        nodes: net
            .specs()
            .into_iter()
            .map(|s| NodeDoc {
                states: (s.kind == NodeKind::Labeled).then(|| s.states.labels().to_vec()),
                intervals: s.states.intervals().map(<[Interval]>::to_vec),
                id: s.id,
                kind: s.kind,
                parents: s.parents,
                cpd: (&s.cpd).into(),
            })
            .collect(),
        template: template.cloned(),
    }
}

pub fn parse_model_document(text: &str, opts: ParseOptions) -> Result<ModelDocument, IoError> {
    read_document(text, opts)
}

pub fn parse_model(text: &str, opts: ParseOptions) -> Result<Network, IoError> {
    parse_model_document(text, opts)?.to_network()
}

pub fn serialize_model(net: &Network) -> String {
    to_canonical_json(&model_document(net, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = r#"{
  "format_version": 1,
  "nodes": [
    {"id": "A", "kind": "labeled", "states": ["true", "false"], "cpd": {"table": [[0.3, 0.7]]}},
    {"id": "B", "kind": "labeled", "states": ["true", "false"], "parents": ["A"],
     "cpd": {"table": [[0.9, 0.1], [0.2, 0.8]]}}
  ]
}"#;

    #[test]
    fn parses_and_round_trips() {
        let net = parse_model(CHAIN, ParseOptions::default()).unwrap();
        assert_eq!(net.len(), 2);
        let text = serialize_model(&net);
        let again = parse_model(&text, ParseOptions::default()).unwrap();
        assert!(again == net);
        assert_eq!(serialize_model(&again), text);
    }

    #[test]
    fn wrong_arity_names_the_node() {
        let bad = CHAIN.replace("[[0.9, 0.1], [0.2, 0.8]]", "[[0.9, 0.1]]");
        let err = parse_model(&bad, ParseOptions::default()).unwrap_err();
        assert_eq!(err.path(), "nodes[1].cpd");
        assert!(err.to_string().contains("'B'"), "{err}");
    }

    #[test]
    fn structural_errors_have_paths() {
        let dup = CHAIN.replace("\"id\": \"B\"", "\"id\": \"A\"");
        assert_eq!(parse_model(&dup, ParseOptions::default()).unwrap_err().path(), "nodes[1].id");
        let unknown = CHAIN.replace("\"parents\": [\"A\"]", "\"parents\": [\"Z\"]");
        assert_eq!(parse_model(&unknown, ParseOptions::default()).unwrap_err().path(), "nodes[1].parents");
        let no_states = CHAIN.replacen("\"states\": [\"true\", \"false\"], ", "", 1);
        assert_eq!(parse_model(&no_states, ParseOptions::default()).unwrap_err().path(), "nodes[0].states");
        let extra = CHAIN.replace("\"kind\": \"labeled\", \"states\"", "\"kind\": \"labeled\", \"colour\": 1, \"states\"");
        assert_eq!(parse_model(&extra, ParseOptions::default()).unwrap_err().path(), "nodes[0].colour");
        assert!(parse_model(&extra, ParseOptions::permissive()).is_ok());
    }

    #[test]
    fn count_and_ranked_nodes() {
        let text = r#"{
  "nodes": [
    {"id": "q", "kind": "ranked5", "cpd": {"table": [[0.2, 0.2, 0.2, 0.2, 0.2]]}},
    {"id": "n", "kind": "count", "intervals": ["0", "1-2", "3+"], "cpd": {"table": [[0.5, 0.3, 0.2]]}},
    {"id": "k", "kind": "count", "intervals": ["0", "1-2", "3+"], "parents": ["n", "q"],
     "cpd": {"binomial": {"p_table": [0.1, 0.3, 0.5, 0.7, 0.9]}}}
  ]
}"#;
        let net = parse_model(text, ParseOptions::default()).unwrap();
        assert_eq!(net.node("n").unwrap().states().labels(), ["0", "1-2", "3+"]);
        let back = parse_model(&serialize_model(&net), ParseOptions::default()).unwrap();
        assert!(back == net);
    }
}
