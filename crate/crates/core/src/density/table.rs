//! IN/OUT edge tables of the virtual broadcast of `H` through `G`, and the
//! peeling that produces core graphs.

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::bipartite::BipartiteH;
use super::DensityError;
use crate::graph::{check_path_len, Graph, NodeId};

/// Result of peeling a bipartite edge list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Peeling {
    /// Indices (into the input) of edges that survive.
    pub core: Vec<usize>,
    /// Y vertex → indices of the edges removed together with it.
    pub removed_with_y: BTreeMap<NodeId, Vec<usize>>,
    /// X vertices removed, in removal order.
    pub removed_x: Vec<NodeId>,
    pub iterations: usize,
}

/// Repeatedly drops X vertices of degree below `k`, then Y vertices of
/// degree below `k`, until nothing changes. Edges are `(x, y)` pairs; within
/// a substep vertices go in ascending id order.
pub fn peel(edges: &[(NodeId, NodeId)], k: usize) -> Peeling {
    let size = edges.iter().map(|&(x, y)| x.max(y) as usize + 1).max().unwrap_or(0);
    let mut alive = vec![true; edges.len()];
    let mut x_inc: Vec<Vec<usize>> = vec![Vec::new(); size];
    let mut y_inc: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (i, &(x, y)) in edges.iter().enumerate() {
        x_inc[x as usize].push(i);
        y_inc[y as usize].push(i);
    }
    let mut x_deg: Vec<usize> = x_inc.iter().map(Vec::len).collect();
    let mut y_deg: Vec<usize> = y_inc.iter().map(Vec::len).collect();
    let mut x_in: Vec<bool> = x_deg.iter().map(|&d| d > 0).collect();
    let mut y_in: Vec<bool> = y_deg.iter().map(|&d| d > 0).collect();
    let mut out = Peeling::default();

    loop {
        out.iterations += 1;
        let mut changed = false;

        let drop_x: Vec<usize> = (0..size).filter(|&v| x_in[v] && x_deg[v] < k).collect();
        for x in drop_x {
            changed = true;
            x_in[x] = false;
            out.removed_x.push(x as NodeId);
            for &e in &x_inc[x] {
                if std::mem::replace(&mut alive[e], false) {
                    y_deg[edges[e].1 as usize] -= 1;
                }
            }
        }

        let drop_y: Vec<usize> = (0..size).filter(|&v| y_in[v] && y_deg[v] < k).collect();
        for y in drop_y {
            changed = true;
            y_in[y] = false;
            let mut taken = Vec::new();
            for &e in &y_inc[y] {
                if std::mem::replace(&mut alive[e], false) {
                    taken.push(e);
                    x_deg[edges[e].0 as usize] -= 1;
                }
            }
            out.removed_with_y.insert(y as NodeId, taken);
        }

        if !changed {
            break;
        }
    }
    out.core = (0..edges.len()).filter(|&e| alive[e]).collect();
    out
}

/// Nonempty fixed point of the peeling at level `i` for node `u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreGraph {
    pub i: usize,
    pub u: NodeId,
    pub x: BTreeSet<NodeId>,
    pub y: BTreeSet<NodeId>,
    /// H edge ids.
    pub edges: Vec<usize>,
}

impl CoreGraph {
    pub fn neighbors(&self, h: &BipartiteH, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .edges
            .iter()
            .map(|&e| h.edge(e))
            .filter_map(|(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, h: &BipartiteH, v: NodeId) -> usize {
        self.edges.iter().filter(|&&e| h.edge(e).0 == v || h.edge(e).1 == v).count()
    }
}

/// `IN_i(u)` and `OUT_i(u)` for `i ∈ 0..=ell` and every node, as bitsets over
/// the edge ids of `H`.
#[derive(Debug, Clone)]
pub struct InOutTable {
    pub k: usize,
    pub ell: usize,
    inn: Vec<Vec<FixedBitSet>>,
    out: Vec<Vec<FixedBitSet>>,
    /// `qualify[i][u]`: neighbors `w` with an `(i−1)`-edge simple path from
    /// `X` to `w` that extends through `u`.
    qualify: Vec<Vec<Vec<NodeId>>>,
    pub cores: Vec<CoreGraph>,
}

impl InOutTable {
    pub fn inn(&self, i: usize, u: NodeId) -> &FixedBitSet {
        &self.inn[i][u as usize]
    }

    pub fn out(&self, i: usize, u: NodeId) -> &FixedBitSet {
        &self.out[i][u as usize]
    }

    pub fn qualifying(&self, i: usize, u: NodeId) -> &[NodeId] {
        &self.qualify[i][u as usize]
    }

    /// `|IN_i(w, u)|`.
    pub fn in_slice(&self, h: &BipartiteH, i: usize, w: NodeId, u: NodeId) -> usize {
        self.inn[i][u as usize].intersection(h.incident(w)).count()
    }

    /// `|OUT_i(w, u)|`.
    pub fn out_slice(&self, h: &BipartiteH, i: usize, w: NodeId, u: NodeId) -> usize {
        self.out[i][u as usize].intersection(h.incident(w)).count()
    }

    pub fn core(&self, i: usize, u: NodeId) -> Option<&CoreGraph> {
        self.cores.iter().find(|c| c.i == i && c.u == u)
    }

    /// Checks every structural fact the extraction relies on.
    pub fn check_invariants(&self, g: &Graph, h: &BipartiteH) -> Result<(), DensityError> {
        let k = self.k;
        let fail = |msg: String| Err(DensityError::Invariant(msg));
        for u in g.nodes() {
            let expect = if h.is_x(u) { h.incident(u).clone() } else { FixedBitSet::with_capacity(h.m()) };
            if self.out[0][u as usize] != expect {
                return fail(format!("OUT_0({u}) differs from E_H({u})"));
            }
        }
        for i in 1..=self.ell {
            let cap = (2 * k).pow(i as u32);
            for u in g.nodes() {
                let inn = &self.inn[i][u as usize];
                let out = &self.out[i][u as usize];
                if !out.is_subset(inn) {
                    return fail(format!("OUT_{i}({u}) is not inside IN_{i}({u})"));
                }
                for &w in &self.qualify[i][u as usize] {
                    if !self.out[i - 1][w as usize].is_subset(inn) {
                        return fail(format!("OUT_{}({w}) is not inside IN_{i}({u})", i - 1));
                    }
                }
                let core = self.core(i, u);
                let mut in_count = vec![0usize; g.n()];
                let mut out_count = vec![0usize; g.n()];
                let mut core_deg = vec![0usize; g.n()];
                for (set, count) in [(inn, &mut in_count), (out, &mut out_count)] {
                    for e in set.ones() {
                        let (x, y) = h.edge(e);
                        count[x as usize] += 1;
                        count[y as usize] += 1;
                    }
                }
                for &e in core.map_or(&[][..], |c| &c.edges) {
                    let (x, y) = h.edge(e);
                    core_deg[x as usize] += 1;
                    core_deg[y as usize] += 1;
                }
                for &y in &h.y {
                    if out_count[y as usize] >= cap {
                        return fail(format!("|OUT_{i}({y},{u})| reaches {cap}"));
                    }
                }
                for &x in &h.x {
                    let (lhs, rhs) = (in_count[x as usize], out_count[x as usize] + core_deg[x as usize] + k - 1);
                    if lhs > rhs {
                        return fail(format!("|IN_{i}({x},{u})| = {lhs} exceeds {rhs}"));
                    }
                }
                if let Some(c) = core {
                    for &y in &c.y {
                        if in_count[y as usize] < cap {
                            return fail(format!("core vertex {y} has |IN_{i}({y},{u})| below {cap}"));
                        }
                    }
                    for &w in c.x.iter().chain(&c.y) {
                        if core_deg[w as usize] < k {
                            return fail(format!("core vertex {w} of level {i} at {u} has degree below {k}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Nodes common to every `len`-edge simple path from `w` to `X`, or `None`
/// when there is no such path. Stops early once only `w` is left.
fn common_nodes(g: &Graph, h: &BipartiteH, w: NodeId, len: usize) -> Option<Vec<NodeId>> {
    fn go(
        g: &Graph,
        h: &BipartiteH,
        left: usize,
        stack: &mut Vec<NodeId>,
        on: &mut [bool],
        acc: &mut Option<Vec<NodeId>>,
    ) -> bool {
        let tip = *stack.last().unwrap();
        if left == 0 {
            if h.is_x(tip) {
                let mut nodes = stack.clone();
                nodes.sort_unstable();
                *acc = Some(match acc.take() {
                    None => nodes,
                    Some(prev) => prev.into_iter().filter(|v| nodes.binary_search(v).is_ok()).collect(),
                });
            }
            return acc.as_ref().is_some_and(|a| a.len() == 1);
        }
        for &next in g.neighbors(tip) {
            if on[next as usize] {
                continue;
            }
            on[next as usize] = true;
            stack.push(next);
            let done = go(g, h, left - 1, stack, on, acc);
            stack.pop();
            on[next as usize] = false;
            if done {
                return true;
            }
        }
        false
    }

    let mut on = vec![false; g.n()];
    on[w as usize] = true;
    let mut acc = None;
    go(g, h, len, &mut vec![w], &mut on, &mut acc);
    acc
}

/// Fills the table level by level and records every nonempty core.
pub fn compute_in_out(g: &Graph, h: &BipartiteH, ell: usize, k: usize) -> Result<InOutTable, DensityError> {
    check_path_len(ell)?;
    let n = g.n();
    let m = h.m();
    let empty = FixedBitSet::with_capacity(m);
    let mut inn = vec![vec![empty.clone(); n]];
    let mut out = vec![g.nodes().map(|u| if h.is_x(u) { h.incident(u).clone() } else { empty.clone() }).collect::<Vec<_>>()];
    let mut qualify = vec![vec![Vec::new(); n]];
    let mut cores = Vec::new();

    for i in 1..=ell {
        let cap = (2 * k).pow(i as u32);
        let common: Vec<Option<Vec<NodeId>>> = g.nodes().map(|w| common_nodes(g, h, w, i - 1)).collect();
        let mut in_i = Vec::with_capacity(n);
        let mut out_i = Vec::with_capacity(n);
        let mut q_i = Vec::with_capacity(n);
        for u in g.nodes() {
            let quals: Vec<NodeId> = g
                .neighbors(u)
                .iter()
                .copied()
                .filter(|&w| common[w as usize].as_ref().is_some_and(|c| c.binary_search(&u).is_err()))
                .collect();
            let mut set = empty.clone();
            for &w in &quals {
                set.union_with(&out[i - 1][w as usize]);
            }

            let mut per_y = vec![0usize; n];
            for e in set.ones() {
                per_y[h.edge(e).1 as usize] += 1;
            }
            let mut o = empty.clone();
            let mut large = Vec::new();
            for e in set.ones() {
                if per_y[h.edge(e).1 as usize] < cap {
                    o.insert(e);
                } else {
                    large.push(e);
                }
            }
            let pairs: Vec<_> = large.iter().map(|&e| h.edge(e)).collect();
            let peeled = peel(&pairs, k);
            for ids in peeled.removed_with_y.values() {
                o.extend(ids.iter().map(|&j| large[j]));
            }
            if !peeled.core.is_empty() {
                let edges: Vec<usize> = peeled.core.iter().map(|&j| large[j]).collect();
                cores.push(CoreGraph {
                    i,
                    u,
                    x: edges.iter().map(|&e| h.edge(e).0).collect(),
                    y: edges.iter().map(|&e| h.edge(e).1).collect(),
                    edges,
                });
            }
            in_i.push(set);
            out_i.push(o);
            q_i.push(quals);
        }
        inn.push(in_i);
        out.push(out_i);
        qualify.push(q_i);
    }
    Ok(InOutTable { k, ell, inn, out, qualify, cores })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kkk(k: NodeId) -> Vec<(NodeId, NodeId)> {
        (0..k).flat_map(|x| (k..2 * k).map(move |y| (x, y))).collect()
    }

    #[test]
    fn complete_bipartite_is_its_own_core() {
        for k in 2..5 {
            let e = kkk(k);
            let p = peel(&e, k as usize);
            assert_eq!(p.core.len(), e.len());
            assert!(p.removed_with_y.is_empty());
        }
    }

    #[test]
    fn single_edge_peels_away() {
        let p = peel(&[(0, 1)], 2);
        assert!(p.core.is_empty());
        assert_eq!(p.removed_x, vec![0]);
        // x goes first, so y leaves with nothing attached.
        assert_eq!(p.removed_with_y.get(&1), Some(&vec![]));
    }

    #[test]
    fn y_keeps_edges_when_only_y_is_short() {
        // Two X vertices of degree 2 sharing Y vertices 5 and 6; Y vertex 7
        // hangs off x=0 only, so x=0 keeps degree 3.
        let e = [(0, 5), (0, 6), (0, 7), (1, 5), (1, 6)];
        let p = peel(&e, 2);
        assert_eq!(p.removed_with_y.get(&7), Some(&vec![2]));
        assert_eq!(p.core, vec![0, 1, 3, 4]);
    }

    #[test]
    fn pendant_y_is_stripped() {
        let mut e = kkk(3);
        e.push((0, 9));
        let p = peel(&e, 3);
        assert_eq!(p.core.len(), 9);
        assert_eq!(p.removed_with_y.get(&9), Some(&vec![9]));
        assert!(p.removed_x.is_empty());
    }
}
