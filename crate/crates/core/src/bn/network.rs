use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{BnError, StateSpace, DEFAULT_TAIL_FACTOR};
use crate::cpd::{Cpd, Cpt};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Labeled,
    Ranked5,
    Count,
}

/// Unvalidated node description consumed by [`Network::build`].
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpec {
    pub id: String,
    pub kind: NodeKind,
    pub states: StateSpace,
    pub parents: Vec<String>,
    pub cpd: Cpd,
}

impl NodeSpec {
    pub fn labeled(id: impl Into<String>, states: StateSpace) -> Self {
        NodeSpec { id: id.into(), kind: NodeKind::Labeled, states, parents: Vec::new(), cpd: Cpd::Table(Vec::new()) }
    }

    pub fn ranked(id: impl Into<String>) -> Self {
        NodeSpec {
            id: id.into(),
            kind: NodeKind::Ranked5,
            states: StateSpace::ranked(),
            parents: Vec::new(),
            cpd: Cpd::Table(Vec::new()),
        }
    }

    pub fn count(id: impl Into<String>, states: StateSpace) -> Self {
        NodeSpec { id: id.into(), kind: NodeKind::Count, states, parents: Vec::new(), cpd: Cpd::Table(Vec::new()) }
    }

    pub fn parents<S: Into<String>>(mut self, parents: impl IntoIterator<Item = S>) -> Self {
        self.parents = parents.into_iter().map(Into::into).collect();
        self
    }

    pub fn cpd(mut self, cpd: impl Into<Cpd>) -> Self {
        self.cpd = cpd.into();
        self
    }

    pub fn table(self, rows: Vec<Vec<f64>>) -> Self {
        self.cpd(Cpd::Table(rows))
    }

    /// Uniform table over the node's states for every parent configuration.
    pub fn uniform(self, parent_configs: usize) -> Self {
        let n = self.states.len();
        let rows = vec![vec![1.0 / n as f64; n]; parent_configs];
        self.table(rows)
    }
}

/// A validated node with its CPD expanded to tabular form.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    id: String,
    kind: NodeKind,
    states: StateSpace,
    parents: Vec<usize>,
    cpd: Cpd,
    cpt: Arc<Cpt>,
}

impl Node {
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> NodeKind {
        self.kind
    }

    pub fn states(&self) -> &StateSpace {
        &self.states
    }

    pub fn card(&self) -> usize {
        self.states.len()
    }

    /// Parent indices into the network's node list.
    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn cpd(&self) -> &Cpd {
        &self.cpd
    }

    pub fn cpt(&self) -> &Cpt {
        &self.cpt
    }
}

/// Immutable directed acyclic graph of discrete nodes.
#[derive(Debug, Clone)]
pub struct Network {
    nodes: Vec<Node>,
    index: HashMap<String, usize>,
    topo: Vec<usize>,
    tail_factor: f64,
}

impl PartialEq for Network {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.tail_factor == other.tail_factor
    }
}

impl Network {
    pub fn build(specs: Vec<NodeSpec>) -> Result<Self, BnError> {
        Self::build_with_tail_factor(specs, DEFAULT_TAIL_FACTOR)
    }

    /// Build with a non-default representative multiplier for unbounded
    /// count intervals.
    pub fn build_with_tail_factor(specs: Vec<NodeSpec>, tail_factor: f64) -> Result<Self, BnError> {
        if !(tail_factor.is_finite() && tail_factor >= 1.0) {
            return Err(BnError::InvalidStateSpace(format!("tail factor {tail_factor} must be >= 1")));
        }
        let mut index = HashMap::with_capacity(specs.len());
        for (i, s) in specs.iter().enumerate() {
            if index.insert(s.id.clone(), i).is_some() {
                return Err(BnError::DuplicateNode(s.id.clone()));
            }
        }
        let mut parent_idx = Vec::with_capacity(specs.len());
        for s in &specs {
            let mut ps = Vec::with_capacity(s.parents.len());
            for p in &s.parents {
                let pi = *index
                    .get(p)
                    .ok_or_else(|| BnError::UnknownParent { node: s.id.clone(), parent: p.clone() })?;
                if ps.contains(&pi) {
                    return Err(BnError::CpdShapeMismatch {
                        node: s.id.clone(),
                        detail: format!("parent '{p}' listed twice"),
                    });
                }
                ps.push(pi);
            }
            parent_idx.push(ps);
        }
        let topo = topological_order(&parent_idx).map_err(|i| BnError::CycleDetected(specs[i].id.clone()))?;

        let mut nodes = Vec::with_capacity(specs.len());
        for (spec, parents) in specs.iter().zip(&parent_idx) {
            let parent_spaces: Vec<&StateSpace> = parents.iter().map(|&p| &specs[p].states).collect();
            let mut cpt = spec
                .cpd
                .expand(&spec.states, &parent_spaces, tail_factor)
                .map_err(|e| BnError::from_cpd(&spec.id, e))?;
            cpt.normalize_rows().map_err(|e| BnError::RowNotNormalized {
                node: spec.id.clone(),
                row: e.row,
                sum: e.sum,
            })?;
            nodes.push(Node {
                id: spec.id.clone(),
                kind: spec.kind,
                states: spec.states.clone(),
                parents: parents.clone(),
                cpd: spec.cpd.clone(),
                cpt: Arc::new(cpt),
            });
        }
        Ok(Network { nodes, index, topo, tail_factor })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn tail_factor(&self) -> f64 {
        self.tail_factor
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn node(&self, id: &str) -> Result<&Node, BnError> {
        self.index_of(id).map(|i| &self.nodes[i]).ok_or_else(|| BnError::UnknownNode(id.to_string()))
    }

    pub fn node_at(&self, i: usize) -> &Node {
        &self.nodes[i]
    }

    /// Node indices with every parent before its children.
    pub fn topological_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn children_of(&self, i: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&c| self.nodes[c].parents.contains(&i)).collect()
    }

    /// Specs that rebuild this network exactly.
    pub fn specs(&self) -> Vec<NodeSpec> {
        self.nodes
            .iter()
            .map(|n| NodeSpec {
                id: n.id.clone(),
                kind: n.kind,
                states: n.states.clone(),
                parents: n.parents.iter().map(|&p| self.nodes[p].id.clone()).collect(),
                cpd: n.cpd.clone(),
            })
            .collect()
    }

    /// A copy of the network with one node's CPD replaced and re-expanded.
    pub fn replace_cpd(&self, id: &str, cpd: Cpd) -> Result<Network, BnError> {
        let i = self.index_of(id).ok_or_else(|| BnError::UnknownNode(id.to_string()))?;
        let node = &self.nodes[i];
        let parent_spaces: Vec<&StateSpace> = node.parents.iter().map(|&p| &self.nodes[p].states).collect();
        let mut cpt = cpd
            .expand(&node.states, &parent_spaces, self.tail_factor)
            .map_err(|e| BnError::from_cpd(id, e))?;
        cpt.normalize_rows().map_err(|e| BnError::RowNotNormalized { node: id.to_string(), row: e.row, sum: e.sum })?;
        Ok(self.with_expanded(i, cpd, Arc::new(cpt)))
    }

    /// Swap in an already-expanded CPT for node `i`. The caller guarantees
    /// `cpt` was expanded from `cpd` against this node's parents.
    pub(crate) fn with_expanded(&self, i: usize, cpd: Cpd, cpt: Arc<Cpt>) -> Network {
        let mut net = self.clone();
        net.nodes[i].cpd = cpd;
        net.nodes[i].cpt = cpt;
        net
    }

    /// `seeds` plus all their ancestors, as a membership mask.
    pub(crate) fn ancestral_closure(&self, seeds: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut mask = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = seeds.into_iter().collect();
        while let Some(i) = stack.pop() {
            if !mask[i] {
                mask[i] = true;
                stack.extend(self.nodes[i].parents.iter().copied());
            }
        }
        mask
    }
}

/// Kahn's algorithm; on a cycle returns a node on it.
fn topological_order(parents: &[Vec<usize>]) -> Result<Vec<usize>, usize> {
    let n = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = queue.pop_front() {
        order.push(i);
        for &c in &children[i] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                queue.push_back(c);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        let placed: HashSet<usize> = order.into_iter().collect();
        Err((0..n).find(|i| !placed.contains(i)).expect("some node is unplaced"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binary(id: &str) -> NodeSpec {
        NodeSpec::labeled(id, StateSpace::binary())
    }

    #[test]
    fn single_node() {
        let net = Network::build(vec![binary("A").table(vec![vec![0.3, 0.7]])]).unwrap();
        assert_eq!(net.len(), 1);
        assert_eq!(net.node("A").unwrap().cpt().row(0), &[0.3, 0.7]);
    }

    #[test]
    fn cycle_detected() {
        let specs = vec![
            binary("A").parents(["B"]).table(vec![vec![0.5, 0.5]; 2]),
            binary("B").parents(["A"]).table(vec![vec![0.5, 0.5]; 2]),
        ];
        assert!(matches!(Network::build(specs), Err(BnError::CycleDetected(_))));
    }

    #[test]
    fn row_not_normalized() {
        let err = Network::build(vec![binary("A").table(vec![vec![0.5, 0.6]])]).unwrap_err();
        assert_eq!(err, BnError::RowNotNormalized { node: "A".into(), row: 0, sum: 1.1 });
    }

    #[test]
    fn unknown_parent_and_duplicates() {
        let err = Network::build(vec![binary("A").parents(["Z"]).table(vec![vec![0.5, 0.5]; 2])]).unwrap_err();
        assert!(matches!(err, BnError::UnknownParent { .. }));
        let err = Network::build(vec![
            binary("A").table(vec![vec![0.5, 0.5]]),
            binary("A").table(vec![vec![0.5, 0.5]]),
        ])
        .unwrap_err();
        assert_eq!(err, BnError::DuplicateNode("A".into()));
    }

    #[test]
    fn shape_mismatch_names_node() {
        let err = Network::build(vec![
            binary("A").table(vec![vec![0.5, 0.5]]),
            binary("B").parents(["A"]).table(vec![vec![0.5, 0.5]]),
        ])
        .unwrap_err();
        assert_eq!(err.node(), Some("B"));
        assert!(matches!(err, BnError::CpdShapeMismatch { .. }));
    }

    #[test]
    fn small_drift_is_renormalized() {
        let net = Network::build(vec![binary("A").table(vec![vec![0.3, 0.7 + 1e-10]])]).unwrap();
        let s: f64 = net.node("A").unwrap().cpt().row(0).iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn specs_round_trip() {
        let net = Network::build(vec![
            binary("A").table(vec![vec![0.3, 0.7]]),
            binary("B").parents(["A"]).table(vec![vec![0.9, 0.1], vec![0.2, 0.8]]),
        ])
        .unwrap();
        assert_eq!(Network::build(net.specs()).unwrap(), net);
    }
}
