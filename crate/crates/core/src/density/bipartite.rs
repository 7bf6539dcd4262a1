//! The bipartite host `H` carved out around the reach set of `v`.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::DensityError;
use crate::graph::{reach_exact, Graph, NodeId};

/// Greedy two-coloring of an edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    /// Side (0 or 1) of every vertex touched by the input.
    pub side: BTreeMap<NodeId, u8>,
    /// Edges with endpoints on different sides, in input order.
    pub crossing: Vec<(NodeId, NodeId)>,
}

/// Places vertices by ascending id on the side where they have fewer
/// already-placed neighbors (ties to side 0). Each vertex keeps at least half
/// of its edges to earlier vertices crossing, so at least `m/2` edges cross.
pub fn max_cut_bipartition(edges: &[(NodeId, NodeId)]) -> Cut {
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for &(a, b) in edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut side: BTreeMap<NodeId, u8> = BTreeMap::new();
    for (&v, nbrs) in &adj {
        let mut count = [0usize; 2];
        for u in nbrs {
            if let Some(&s) = side.get(u) {
                count[s as usize] += 1;
            }
        }
        side.insert(v, u8::from(count[1] < count[0]));
    }
    let crossing = edges.iter().copied().filter(|(a, b)| side[a] != side[b]).collect();
    Cut { side, crossing }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HSource {
    /// Cut edges inside the reach set.
    Internal,
    /// Edges leaving the reach set.
    External,
}

/// Bipartite subgraph `(X, Y, E_H)` with `X` inside the reach set.
#[derive(Debug, Clone)]
pub struct BipartiteH {
    pub x: BTreeSet<NodeId>,
    pub y: BTreeSet<NodeId>,
    /// Edges as `(x, y)` pairs, sorted; an edge's id is its index.
    pub edges: Vec<(NodeId, NodeId)>,
    pub source: HSource,
    pub reach: BTreeSet<NodeId>,
    /// `|F|`, `|F_int|`, `|F'_int|`, `|F_ext|`.
    pub f_sizes: [usize; 4],
    incident: Vec<FixedBitSet>,
    in_x: Vec<bool>,
}

impl BipartiteH {
    fn assemble(
        n: usize,
        mut edges: Vec<(NodeId, NodeId)>,
        source: HSource,
        reach: BTreeSet<NodeId>,
        f_sizes: [usize; 4],
    ) -> Self {
        edges.sort_unstable();
        let x: BTreeSet<_> = edges.iter().map(|e| e.0).collect();
        let y: BTreeSet<_> = edges.iter().map(|e| e.1).collect();
        let mut incident = vec![FixedBitSet::with_capacity(edges.len()); n];
        for (id, &(a, b)) in edges.iter().enumerate() {
            incident[a as usize].insert(id);
            incident[b as usize].insert(id);
        }
        let mut in_x = vec![false; n];
        for &a in &x {
            in_x[a as usize] = true;
        }
        BipartiteH { x, y, edges, source, reach, f_sizes, incident, in_x }
    }

    /// Builds `H` directly from `(x, y)` pairs.
    pub fn from_parts(n: usize, edges: Vec<(NodeId, NodeId)>, source: HSource) -> Self {
        let reach = edges.iter().map(|e| e.0).collect();
        let m = edges.len();
        Self::assemble(n, edges, source, reach, [m, 0, 0, m])
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_x(&self, v: NodeId) -> bool {
        self.in_x[v as usize]
    }

    /// `E_H(v)` as a bitset over edge ids.
    pub fn incident(&self, v: NodeId) -> &FixedBitSet {
        &self.incident[v as usize]
    }

    pub fn edge(&self, id: usize) -> (NodeId, NodeId) {
        self.edges[id]
    }

    pub fn edge_id(&self, x: NodeId, y: NodeId) -> Option<usize> {
        self.edges.binary_search(&(x, y)).ok()
    }
}

/// `H` for `v` at distance `ell`: the cut of the edges inside `R_ell(v)` or
/// the edges leaving it, whichever is larger.
pub fn build_h(g: &Graph, v: NodeId, ell: usize) -> Result<BipartiteH, DensityError> {
    let reach = reach_exact(g, v, ell)?;
    let mut in_r = vec![false; g.n()];
    for &u in &reach {
        in_r[u as usize] = true;
    }
    let mut f_int = Vec::new();
    let mut f_ext = Vec::new();
    for (a, b) in g.edges() {
        match (in_r[a as usize], in_r[b as usize]) {
            (true, true) => f_int.push((a, b)),
            (true, false) => f_ext.push((a, b)),
            (false, true) => f_ext.push((b, a)),
            (false, false) => {}
        }
    }
    let cut = max_cut_bipartition(&f_int);
    let sizes = [f_int.len() + f_ext.len(), f_int.len(), cut.crossing.len(), f_ext.len()];
    if cut.crossing.len() >= f_ext.len() {
        let least = |s: u8| cut.crossing.iter().flat_map(|&(a, b)| [a, b]).filter(|u| cut.side[u] == s).min();
        let x_side = match (least(0), least(1)) {
            (Some(a), Some(b)) if b < a => 1,
            _ => 0,
        };
        let edges = cut.crossing.iter().map(|&(a, b)| if cut.side[&a] == x_side { (a, b) } else { (b, a) }).collect();
        Ok(BipartiteH::assemble(g.n(), edges, HSource::Internal, reach, sizes))
    } else {
        Ok(BipartiteH::assemble(g.n(), f_ext, HSource::External, reach, sizes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn crossing(edges: &[(NodeId, NodeId)]) -> usize {
        max_cut_bipartition(edges).crossing.len()
    }

    #[test]
    fn cut_examples() {
        assert_eq!(crossing(&[(0, 1), (1, 2), (0, 2)]), 2);
        assert_eq!(crossing(&[(0, 1), (1, 2), (2, 3), (0, 3)]), 4);
        assert_eq!(crossing(&[(4, 9)]), 1);
        assert_eq!(crossing(&[]), 0);
    }

    #[test]
    fn star_from_center() {
        let g = Graph::from_edges(6, (1..6).map(|i| (0, i))).unwrap();
        let h = build_h(&g, 0, 1).unwrap();
        assert_eq!(h.source, HSource::External);
        assert_eq!(h.x, (1..6).collect());
        assert_eq!(h.y, BTreeSet::from([0]));
        assert_eq!(h.m(), 5);
    }

    #[test]
    fn k50_50_has_enough_edges() {
        let edges = (0..50).flat_map(|a| (50..100).map(move |b| (a, b)));
        let g = Graph::from_edges(100, edges).unwrap();
        let h = build_h(&g, 0, 1).unwrap();
        assert_eq!(h.f_sizes[0], 2500);
        assert!(h.m() >= 400);
        assert!(h.x.iter().all(|u| h.reach.contains(u)));
        assert!(h.x.is_disjoint(&h.y));
    }

    #[test]
    fn internal_side_with_least_id() {
        // Reach set of 0 at distance 1 is {1..=4}; it induces a 4-cycle and
        // nothing leaves it except the edges back to 0.
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (2, 3), (3, 4), (1, 4), (1, 3)]).unwrap();
        let h = build_h(&g, 0, 1).unwrap();
        assert_eq!(h.source, HSource::Internal);
        assert!(h.x.contains(&1));
        for &(a, b) in &h.edges {
            assert!(h.is_x(a) && !h.is_x(b));
            assert!(g.has_edge(a, b));
        }
    }
}
