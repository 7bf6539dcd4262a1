//! Simple undirected graphs, bounded-length simple paths and brute-force
//! cycle oracles.
//!
//! Everything here is deterministic: adjacency lists are sorted, paths are
//! produced in lexicographic node order, and the cycle oracle returns the
//! lexicographically least witness.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigUint;
use num_traits::Pow;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node identifier. Ids of an `n`-node graph are exactly `0..n`.
pub type NodeId = u32;

/// Longest path length (in edges) accepted by the path enumerators.
pub const PATH_LEN_CAP: usize = 6;

/// Largest graph the brute-force cycle oracle agrees to search.
pub const ORACLE_MAX_NODES: usize = 200;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("path length {len} exceeds the enumeration cap {cap}")]
    PathCapExceeded { len: usize, cap: usize },
    #[error("cycle length {0} unsupported: must be even and within 4..=12")]
    BadCycleLength(usize),
    #[error("graph has {n} nodes; brute-force oracle is limited to {limit}")]
    OracleTooLarge { n: usize, limit: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A simple undirected graph on nodes `0..n` with sorted adjacency lists.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    m: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph {{ n: {}, m: {} }}", self.n(), self.m)
    }
}

impl Graph {
    /// The edgeless graph on `n` nodes.
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    /// Builds a graph, rejecting self-loops, duplicates and out-of-range ids.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut adj = vec![Vec::new(); n];
        let mut m = 0;
        for (u, v) in edges {
            for node in [u, v] {
                if node as usize >= n {
                    return Err(GraphError::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
            m += 1;
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (u as NodeId, w[0]);
                return Err(GraphError::DuplicateEdge(a.min(b), a.max(b)));
            }
        }
        Ok(Graph { adj, m })
    }

    /// Builds a graph from a set of edges, silently normalizing orientation.
    /// Used by generators, which already guarantee distinctness.
    pub fn from_edge_set(n: usize, edges: &BTreeSet<(NodeId, NodeId)>) -> Result<Self, GraphError> {
        Self::from_edges(n, edges.iter().copied())
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        (u as usize) < self.n() && self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.n() as NodeId
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = u as NodeId;
            list.iter().filter(move |&&v| u < v).map(move |&v| (u, v))
        })
    }

    /// Parses the edge-list text format: a header line `n m`, then `m` lines
    /// `u v` with `u < v < n`. Blank lines and `#` comments are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let parse_pair = |line: usize, l: &str| -> Result<(u64, u64), GraphError> {
            let mut it = l.split_whitespace();
            let bad = |msg: &str| GraphError::Parse { line, msg: msg.to_string() };
            let a = it.next().ok_or_else(|| bad("expected two integers"))?;
            let b = it.next().ok_or_else(|| bad("expected two integers"))?;
            if it.next().is_some() {
                return Err(bad("trailing tokens"));
            }
            let a = a.parse().map_err(|_| bad("not an unsigned integer"))?;
            let b = b.parse().map_err(|_| bad("not an unsigned integer"))?;
            Ok((a, b))
        };
        let (line, header) = lines.next().ok_or(GraphError::Parse { line: 0, msg: "missing header".into() })?;
        let (n, m) = parse_pair(line, header)?;
        if n > NodeId::MAX as u64 {
            return Err(GraphError::Parse { line, msg: "node count too large".into() });
        }
        let mut edges = Vec::with_capacity(m as usize);
        for (line, l) in lines {
            let (u, v) = parse_pair(line, l)?;
            if u >= v || v >= n {
                return Err(GraphError::Parse { line, msg: format!("edge {u} {v} violates u < v < n") });
            }
            edges.push((u as NodeId, v as NodeId));
        }
        if edges.len() as u64 != m {
            return Err(GraphError::Parse {
                line: 0,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        Self::from_edges(n as usize, edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{} {}\n", self.n(), self.m());
        for (u, v) in self.edges() {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }

    /// Relabels node `v` as `perm[v]`.
    pub fn relabel(&self, perm: &[NodeId]) -> Graph {
        let edges = self.edges().map(|(u, v)| (perm[u as usize], perm[v as usize]));
        Graph::from_edges(self.n(), edges).expect("relabeling preserves simplicity")
    }
}

/// A simple path, stored as its node sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SimplePath(pub Vec<NodeId>);

impl SimplePath {
    pub fn single(v: NodeId) -> Self {
        SimplePath(vec![v])
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn origin(&self) -> NodeId {
        self.0[0]
    }

    pub fn end(&self) -> NodeId {
        *self.0.last().expect("paths have at least one node")
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.contains(&v)
    }

    pub fn extended(&self, v: NodeId) -> SimplePath {
        let mut nodes = self.0.clone();
        nodes.push(v);
        SimplePath(nodes)
    }

    /// Distinct nodes, consecutive nodes adjacent in `g`.
    pub fn is_valid_in(&self, g: &Graph) -> bool {
        if self.0.is_empty() || self.0.iter().any(|&v| v as usize >= g.n()) {
            return false;
        }
        let distinct: BTreeSet<_> = self.0.iter().collect();
        distinct.len() == self.0.len() && self.0.windows(2).all(|w| g.has_edge(w[0], w[1]))
    }
}

impl fmt::Display for SimplePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.0)
    }
}

/// An ordered list of distinct nodes claimed to form a cycle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CycleWitness(pub Vec<NodeId>);

impl CycleWitness {
    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for CycleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.0)
    }
}

fn write_joined(f: &mut fmt::Formatter<'_>, nodes: &[NodeId]) -> fmt::Result {
    for (i, v) in nodes.iter().enumerate() {
        if i > 0 {
            f.write_str("-")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

pub fn check_path_len(len: usize) -> Result<(), GraphError> {
    if len > PATH_LEN_CAP {
        Err(GraphError::PathCapExceeded { len, cap: PATH_LEN_CAP })
    } else {
        Ok(())
    }
}

/// Every simple path with exactly `len` edges starting at `v`, in
/// lexicographic order.
pub fn enumerate_simple_paths(g: &Graph, v: NodeId, len: usize) -> Result<Vec<SimplePath>, GraphError> {
    check_path_len(len)?;
    let mut out = Vec::new();
    let mut stack = vec![v];
    let mut on_path = vec![false; g.n()];
    on_path[v as usize] = true;
    extend_paths(g, len, &mut stack, &mut on_path, &mut |p| out.push(SimplePath(p.to_vec())));
    Ok(out)
}

fn extend_paths(
    g: &Graph,
    remaining: usize,
    stack: &mut Vec<NodeId>,
    on_path: &mut [bool],
    emit: &mut dyn FnMut(&[NodeId]),
) {
    if remaining == 0 {
        emit(stack);
        return;
    }
    let tip = *stack.last().unwrap();
    for &w in g.neighbors(tip) {
        if on_path[w as usize] {
            continue;
        }
        on_path[w as usize] = true;
        stack.push(w);
        extend_paths(g, remaining - 1, stack, on_path, emit);
        stack.pop();
        on_path[w as usize] = false;
    }
}

/// Nodes reachable from `v` by a simple path of exactly `len` edges.
pub fn reach_exact(g: &Graph, v: NodeId, len: usize) -> Result<BTreeSet<NodeId>, GraphError> {
    check_path_len(len)?;
    let mut out = BTreeSet::new();
    let mut stack = vec![v];
    let mut on_path = vec![false; g.n()];
    on_path[v as usize] = true;
    extend_paths(g, len, &mut stack, &mut on_path, &mut |p| {
        out.insert(*p.last().unwrap());
    });
    Ok(out)
}

/// Sum of degrees over the exact-length reach set of `v`.
pub fn local_density(g: &Graph, v: NodeId, len: usize) -> Result<u64, GraphError> {
    Ok(reach_exact(g, v, len)?.iter().map(|&u| g.degree(u) as u64).sum())
}

/// Lexicographically least cycle of exactly `twok` nodes, if any.
pub fn find_cycle_bruteforce(g: &Graph, twok: usize) -> Result<Option<CycleWitness>, GraphError> {
    if twok % 2 != 0 || !(4..=12).contains(&twok) {
        return Err(GraphError::BadCycleLength(twok));
    }
    if g.n() > ORACLE_MAX_NODES {
        return Err(GraphError::OracleTooLarge { n: g.n(), limit: ORACLE_MAX_NODES });
    }
    // When starting from `s`, no smaller node lies on any `twok`-cycle (the
    // search would have returned already), so the search stays above `s`.
    let mut on_path = vec![false; g.n()];
    for s in g.nodes() {
        let mut stack = vec![s];
        on_path[s as usize] = true;
        if cycle_dfs(g, s, twok, &mut stack, &mut on_path) {
            return Ok(Some(CycleWitness(stack)));
        }
        on_path[s as usize] = false;
    }
    Ok(None)
}

fn cycle_dfs(g: &Graph, s: NodeId, twok: usize, stack: &mut Vec<NodeId>, on_path: &mut [bool]) -> bool {
    let tip = *stack.last().unwrap();
    if stack.len() == twok {
        return g.has_edge(tip, s);
    }
    for &w in g.neighbors(tip) {
        if w <= s || on_path[w as usize] {
            continue;
        }
        on_path[w as usize] = true;
        stack.push(w);
        if cycle_dfs(g, s, twok, stack, on_path) {
            return true;
        }
        stack.pop();
        on_path[w as usize] = false;
    }
    false
}

/// True iff `w` lists exactly `twok` distinct nodes forming a closed cycle.
pub fn verify_cycle(g: &Graph, w: &CycleWitness, twok: usize) -> bool {
    let nodes = w.nodes();
    if nodes.len() != twok || twok < 3 {
        return false;
    }
    if nodes.iter().any(|&v| v as usize >= g.n()) {
        return false;
    }
    let distinct: BTreeSet<_> = nodes.iter().collect();
    if distinct.len() != twok {
        return false;
    }
    (0..twok).all(|i| g.has_edge(nodes[i], nodes[(i + 1) % twok]))
}

/// `deg >= n^(1/k)`, decided as `deg^k >= n` in exact integers.
pub fn is_heavy(deg: u64, n: u64, k: u32) -> bool {
    BigUint::from(deg).pow(k) >= BigUint::from(n)
}

/// Largest degree that is still light, i.e. the largest `d` with `d^k < n`.
pub fn max_light_degree(n: u64, k: u32) -> u64 {
    if n <= 1 {
        return 0;
    }
    // floor((n-1)^(1/k)) is the largest d with d^k <= n-1.
    num_integer::Roots::nth_root(&BigUint::from(n - 1), k)
        .try_into()
        .expect("root of a u64 fits in u64")
}
