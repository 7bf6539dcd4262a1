//! Seeded graph families. Randomness comes from `ChaCha8Rng::seed_from_u64`,
//! so a seed reproduces the same graph on every platform.

use std::collections::BTreeSet;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::LabError;
use crate::graph::{Graph, NodeId};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn is_prime(q: u64) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

fn pair(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    (a.min(b), a.max(b))
}

fn max_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Adds uniformly random new edges to `set` until it has `target` edges
/// (or the graph is complete).
fn fill_random(set: &mut BTreeSet<(NodeId, NodeId)>, n: usize, target: usize, rng: &mut ChaCha8Rng) {
    let target = target.min(max_edges(n));
    while set.len() < target {
        let a = rng.gen_range(0..n as NodeId);
        let b = rng.gen_range(0..n as NodeId);
        if a != b {
            set.insert(pair(a, b));
        }
    }
}

/// Erdős–Rényi polarity graph of `PG(2, q)`: projective points, adjacent when
/// orthogonal, self-orthogonal points left without loops.
pub fn polarity(q: u64) -> Result<Graph, LabError> {
    if !is_prime(q) {
        return Err(LabError::BadParams(format!("polarity graph needs a prime q, got {q}")));
    }
    let mut points: Vec<[u64; 3]> = Vec::new();
    for a in 0..q {
        for b in 0..q {
            points.push([1, a, b]);
        }
    }
    for b in 0..q {
        points.push([0, 1, b]);
    }
    points.push([0, 0, 1]);
    let dot = |p: &[u64; 3], r: &[u64; 3]| (p[0] * r[0] + p[1] * r[1] + p[2] * r[2]) % q;
    let mut edges = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if dot(&points[i], &points[j]) == 0 {
                edges.push((i as NodeId, j as NodeId));
            }
        }
    }
    Ok(Graph::from_edges(points.len(), edges)?)
}

/// A `twok`-cycle on random vertices plus `extra` random further edges.
pub fn planted(n: usize, twok: usize, extra: usize, seed: u64) -> Result<Graph, LabError> {
    if twok < 3 || n < twok {
        return Err(LabError::BadParams(format!("cannot plant a {twok}-cycle in {n} nodes")));
    }
    let mut r = rng(seed);
    let on: Vec<NodeId> = sample(&mut r, n, twok).into_iter().map(|v| v as NodeId).collect();
    let mut set: BTreeSet<_> = (0..twok).map(|i| pair(on[i], on[(i + 1) % twok])).collect();
    fill_random(&mut set, n, twok + extra, &mut r);
    Ok(Graph::from_edge_set(n, &set)?)
}

/// `m` distinct edges chosen uniformly at random.
pub fn random(n: usize, m: usize, seed: u64) -> Result<Graph, LabError> {
    let mut set = BTreeSet::new();
    fill_random(&mut set, n, m, &mut rng(seed));
    Ok(Graph::from_edge_set(n, &set)?)
}

/// Each pair independently with probability `p`.
pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph, LabError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(LabError::BadParams(format!("edge probability {p} outside [0, 1]")));
    }
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for a in 0..n as NodeId {
        for b in a + 1..n as NodeId {
            if r.gen_bool(p) {
                edges.push((a, b));
            }
        }
    }
    Ok(Graph::from_edges(n, edges)?)
}

/// Random recursive tree under a random labeling.
pub fn tree(n: usize, seed: u64) -> Result<Graph, LabError> {
    let mut r = rng(seed);
    let label: Vec<NodeId> = sample(&mut r, n, n).into_iter().map(|v| v as NodeId).collect();
    let edges: Vec<_> = (1..n).map(|i| (label[r.gen_range(0..i)], label[i])).collect();
    Ok(Graph::from_edges(n, edges)?)
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let (a, b) = (a as NodeId, b as NodeId);
    Graph::from_edges((a + b) as usize, (0..a).flat_map(|x| (a..a + b).map(move |y| (x, y)))).unwrap()
}

pub fn cycle(n: usize) -> Result<Graph, LabError> {
    if n < 3 {
        return Err(LabError::BadParams(format!("a cycle needs 3 nodes, got {n}")));
    }
    let n32 = n as NodeId;
    Ok(Graph::from_edges(n, (0..n32).map(|i| (i, (i + 1) % n32)))?)
}

pub fn complete(n: usize) -> Graph {
    let n32 = n as NodeId;
    Graph::from_edges(n, (0..n32).flat_map(|a| (a + 1..n32).map(move |b| (a, b)))).unwrap()
}

/// One concrete family member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Generator {
    Polarity { q: u64 },
    Planted { n: usize, twok: usize, extra: usize },
    Random { n: usize, m: usize },
    Gnp { n: usize, p: f64 },
    Tree { n: usize },
    CompleteBipartite { a: usize, b: usize },
    Cycle { n: usize },
    Complete { n: usize },
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::Polarity { .. } => "polarity",
            Generator::Planted { .. } => "planted",
            Generator::Random { .. } => "random",
            Generator::Gnp { .. } => "gnp",
            Generator::Tree { .. } => "tree",
            Generator::CompleteBipartite { .. } => "complete_bipartite",
            Generator::Cycle { .. } => "cycle",
            Generator::Complete { .. } => "complete",
        }
    }

    pub fn build(&self, seed: u64) -> Result<Graph, LabError> {
        match *self {
            Generator::Polarity { q } => polarity(q),
            Generator::Planted { n, twok, extra } => planted(n, twok, extra, seed),
            Generator::Random { n, m } => random(n, m, seed),
            Generator::Gnp { n, p } => gnp(n, p, seed),
            Generator::Tree { n } => tree(n, seed),
            Generator::CompleteBipartite { a, b } => Ok(complete_bipartite(a, b)),
            Generator::Cycle { n } => cycle(n),
            Generator::Complete { n } => Ok(complete(n)),
        }
    }

    /// Whether every member contains a `twok`-cycle, when the family alone
    /// decides it.
    pub fn known_cycle(&self, twok: usize) -> Option<bool> {
        match *self {
            Generator::Polarity { .. } if twok == 4 => Some(false),
            Generator::Planted { twok: t, .. } if t == twok => Some(true),
            Generator::Tree { .. } => Some(false),
            Generator::CompleteBipartite { a, b } => Some(2 * a.min(b) >= twok),
            Generator::Cycle { n } => Some(n == twok),
            Generator::Complete { n } => Some(n >= twok),
            _ => None,
        }
    }
}
