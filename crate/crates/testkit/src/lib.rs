//! Seeded generators of random networks, evidence, fault trees and
//! scenarios, shared by the property tests and the acceptance harness.

use heisenbn::bn::{Evidence, Finding, Network, NodeSpec, StateSpace};
use heisenbn::cpd::NoisyOrCpd;
use heisenbn::defect::{answer_dimensions, Answer, ProjectScenario};
use heisenbn::fault_tree::{BasicEvent, FaultTree, Gate, GateKind};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random probability vector; with `zeros` some entries may be exactly 0.
pub fn simplex(rng: &mut impl Rng, n: usize, zeros: bool) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n)
            .map(|_| if zeros && rng.gen_bool(0.15) { 0.0 } else { rng.gen_range(0.01..1.0) })
            .collect();
        let s: f64 = v.iter().sum();
        if s > 0.0 {
            v.iter_mut().for_each(|x| *x /= s);
            return v;
        }
    }
}

/// Random DAG of `2..=max_nodes` labeled nodes with `2..=max_states`
/// states and at most three parents each. Binary nodes over binary parents
/// are sometimes Noisy-OR; the rest are tables, occasionally with zeros.
pub fn random_network(rng: &mut impl Rng, max_nodes: usize, max_states: usize) -> Network {
    let n = rng.gen_range(2..=max_nodes);
    let mut cards = Vec::with_capacity(n);
    let mut specs = Vec::with_capacity(n);
    for i in 0..n {
        let card = rng.gen_range(2..=max_states);
        let states = if card == 2 {
            StateSpace::binary()
        } else {
            StateSpace::new((0..card).map(|s| format!("s{s}"))).unwrap()
        };
        let mut candidates: Vec<usize> = (0..i).collect();
        candidates.shuffle(rng);
        let k = rng.gen_range(0..=candidates.len().min(3));
        let parents: Vec<usize> = candidates[..k].to_vec();
        let spec = NodeSpec::labeled(format!("n{i}"), states).parents(parents.iter().map(|p| format!("n{p}")));
        let all_binary = card == 2 && !parents.is_empty() && parents.iter().all(|&p| cards[p] == 2);
        let spec = if all_binary && rng.gen_bool(0.3) {
            let q = (0..parents.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
            spec.cpd(NoisyOrCpd::new(q, rng.gen_range(0.0..0.2)))
        } else {
            let rows: usize = parents.iter().map(|&p| cards[p]).product();
            spec.table((0..rows).map(|_| simplex(rng, card, true)).collect())
        };
        cards.push(card);
        specs.push(spec);
    }
    Network::build(specs).unwrap()
}

/// Each node independently gets a hard finding, a soft finding or nothing.
pub fn random_evidence(rng: &mut impl Rng, net: &Network) -> Evidence {
    let mut ev = Evidence::new();
    for node in net.nodes() {
        let r: f64 = rng.gen();
        if r < 0.2 {
            let labels = node.states().labels();
            ev.insert(node.id(), Finding::Hard(labels[rng.gen_range(0..labels.len())].clone()));
        } else if r < 0.45 {
            let mut v = simplex(rng, node.card(), true);
            let scale = rng.gen_range(0.1..10.0);
            v.iter_mut().for_each(|x| *x *= scale);
            ev.insert(node.id(), Finding::Soft(v));
        }
    }
    ev
}

/// AND/OR tree in which every basic event appears once, with its
/// top-event probability computed by the product rules.
pub fn random_and_or_tree(rng: &mut impl Rng, max_depth: usize) -> (FaultTree, f64) {
    struct Builder {
        events: Vec<BasicEvent>,
        gates: Vec<Gate>,
    }
    fn grow(b: &mut Builder, rng: &mut dyn rand::RngCore, depth: usize) -> (String, f64) {
        if depth == 0 || (b.events.len() + b.gates.len() > 0 && rng.gen_bool(0.3)) {
            let id = format!("e{}", b.events.len());
            let p = rng.gen_range(0.0..1.0);
            b.events.push(BasicEvent { id: id.clone(), probability: p });
            return (id, p);
        }
        let id = format!("g{}", b.gates.len());
        b.gates.push(Gate { id: id.clone(), kind: GateKind::And, children: Vec::new() });
        let slot = b.gates.len() - 1;
        let and = rng.gen_bool(0.5);
        let arity = rng.gen_range(1..=4);
        let mut children = Vec::with_capacity(arity);
        let mut probs = Vec::with_capacity(arity);
        for _ in 0..arity {
            let (c, p) = grow(b, rng, depth - 1);
            children.push(c);
            probs.push(p);
        }
        let p = if and {
            probs.iter().product()
        } else {
            1.0 - probs.iter().map(|p| 1.0 - p).product::<f64>()
        };
        b.gates[slot].kind = if and { GateKind::And } else { GateKind::Or };
        b.gates[slot].children = children;
        (id, p)
    }
    let mut b = Builder { events: Vec::new(), gates: Vec::new() };
    let (top, p) = grow(&mut b, rng, max_depth);
    (FaultTree { top, basic_events: b.events, gates: b.gates }, p)
}

/// Rating answer: a point level half the time, otherwise a spread.
pub fn random_answer(rng: &mut impl Rng) -> Answer {
    if rng.gen_bool(0.5) {
        Answer::point(rng.gen_range(0..5))
    } else {
        let v = simplex(rng, 5, true);
        Answer::new([v[0], v[1], v[2], v[3], v[4]]).unwrap()
    }
}

pub fn random_scenario(rng: &mut impl Rng) -> ProjectScenario {
    let usage = random_answer(rng);
    let mut s = ProjectScenario::uniform(2, rng.gen_range(0.5..80.0), rng.gen_range(100.0..80000.0), usage);
    for d in answer_dimensions() {
        s.answers.insert(d.to_string(), random_answer(rng));
    }
    s.complexity = random_answer(rng);
    s.certified = [None, Some(true), Some(false)][rng.gen_range(0..3)];
    s.horizon_months = [6, 12, 24][rng.gen_range(0..3)];
    s
}
