//! Full-joint enumeration. Exponential; only for small networks and tests.

use super::{BnError, Evidence, Network, Resolved};

pub const DEFAULT_JOINT_CAP: usize = 1 << 20;

/// Unnormalized joint over every node (network order), evidence folded in.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    pub nodes: Vec<String>,
    pub cards: Vec<usize>,
    /// Row-major, last node fastest.
    pub values: Vec<f64>,
    /// Sum of `values`.
    pub z: f64,
}

impl JointTable {
    /// Normalized marginal of one node.
    pub fn marginal(&self, node: &str) -> Result<Vec<f64>, BnError> {
        let k = self.nodes.iter().position(|n| n == node).ok_or_else(|| BnError::UnknownNode(node.to_string()))?;
        if self.z <= 0.0 {
            return Err(BnError::ZeroProbabilityEvidence);
        }
        let inner: usize = self.cards[k + 1..].iter().product();
        let mut out = vec![0.0; self.cards[k]];
        for (i, v) in self.values.iter().enumerate() {
            out[(i / inner) % self.cards[k]] += v;
        }
        Ok(out.into_iter().map(|v| v / self.z).collect())
    }
}

pub fn brute_force_joint(net: &Network, ev: &Evidence) -> Result<JointTable, BnError> {
    brute_force_joint_with_cap(net, ev, DEFAULT_JOINT_CAP)
}

pub fn brute_force_joint_with_cap(net: &Network, ev: &Evidence, cap: usize) -> Result<JointTable, BnError> {
    let cards: Vec<usize> = net.nodes().iter().map(|n| n.card()).collect();
    let entries: u128 = cards.iter().map(|&c| c as u128).product();
    if entries > cap as u128 {
        return Err(BnError::TooLarge { entries, cap });
    }
    let n = cards.len();
    let mut lik: Vec<Vec<f64>> = cards.iter().map(|&c| vec![1.0; c]).collect();
    for (i, r) in ev.resolve(net)? {
        match r {
            Resolved::Hard(s) => {
                lik[i].iter_mut().enumerate().for_each(|(k, v)| *v = if k == s { 1.0 } else { 0.0 });
            }
            Resolved::Soft(l) => lik[i] = l,
        }
    }

    let mut values = Vec::with_capacity(entries as usize);
    let mut assign = vec![0usize; n];
    loop {
        let mut p = 1.0;
        for (i, node) in net.nodes().iter().enumerate() {
            let mut row = 0;
            for &pa in node.parents() {
                row = row * cards[pa] + assign[pa];
            }
            p *= node.cpt().row(row)[assign[i]] * lik[i][assign[i]];
        }
        values.push(p);
        let mut l = n;
        loop {
            if l == 0 {
                let z = values.iter().sum();
                return Ok(JointTable { nodes: net.nodes().iter().map(|n| n.id().to_string()).collect(), cards, values, z });
            }
            l -= 1;
            assign[l] += 1;
            if assign[l] < cards[l] {
                break;
            }
            assign[l] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::{NodeSpec, StateSpace};

    #[test]
    fn single_node() {
        let net = Network::build(vec![NodeSpec::labeled("A", StateSpace::binary()).table(vec![vec![0.3, 0.7]])]).unwrap();
        let j = brute_force_joint(&net, &Evidence::new()).unwrap();
        assert_eq!(j.values, vec![0.3, 0.7]);
        assert_eq!(j.z, 1.0);
    }

    #[test]
    fn chain_with_evidence() {
        let net = Network::build(vec![
            NodeSpec::labeled("A", StateSpace::binary()).table(vec![vec![0.3, 0.7]]),
            NodeSpec::labeled("B", StateSpace::binary()).parents(["A"]).table(vec![vec![0.9, 0.1], vec![0.2, 0.8]]),
        ])
        .unwrap();
        let j = brute_force_joint(&net, &Evidence::new().with_hard("B", "true")).unwrap();
        assert!((j.z - 0.41).abs() < 1e-15);
    }

    #[test]
    fn independent_nodes_factorize() {
        let net = Network::build(vec![
            NodeSpec::labeled("X", StateSpace::binary()).table(vec![vec![0.3, 0.7]]),
            NodeSpec::labeled("Y", StateSpace::new(["a", "b", "c"]).unwrap()).table(vec![vec![0.2, 0.5, 0.3]]),
        ])
        .unwrap();
        let j = brute_force_joint(&net, &Evidence::new()).unwrap();
        let px = [0.3, 0.7];
        let py = [0.2, 0.5, 0.3];
        for x in 0..2 {
            for y in 0..3 {
                assert!((j.values[x * 3 + y] - px[x] * py[y]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn too_large() {
        let specs: Vec<NodeSpec> = (0..21)
            .map(|i| NodeSpec::labeled(format!("n{i}"), StateSpace::binary()).table(vec![vec![0.5, 0.5]]))
            .collect();
        let net = Network::build(specs).unwrap();
        assert!(matches!(brute_force_joint(&net, &Evidence::new()), Err(BnError::TooLarge { .. })));
    }
}
