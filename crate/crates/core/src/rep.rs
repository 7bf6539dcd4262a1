//! q-representative subfamilies of bounded-size set families.
//!
//! `compute_representative` keeps a set only when some blocker `X` of size at
//! most `q` avoids it while hitting everything kept so far. The kept sets and
//! their blockers form a skew set-pair system, so at most `C(p+q, p)` sets
//! survive, and every discarded set is dominated by a kept one for each
//! blocker it avoids.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{NodeId, SimplePath};

/// Upper limit on blockers enumerated by [`verify_representative`].
pub const VERIFY_MAX_BLOCKERS: u64 = 5_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("set {index} has {size} elements, more than p = {p}")]
    SetTooLarge { index: usize, size: usize, p: usize },
    #[error("p + q = {sum} exceeds the universe size {universe}")]
    UniverseTooSmall { sum: usize, universe: usize },
    #[error("exhaustive check needs {blockers} blockers, limit is {limit}")]
    TooLarge { blockers: u64, limit: u64 },
    #[error("paths of one family must share origin and length")]
    MixedPaths,
}

/// A sorted, duplicate-free set of node ids.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct NodeSet(Vec<NodeId>);

impl NodeSet {
    pub fn empty() -> Self {
        NodeSet(Vec::new())
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        while let (Some(&&x), Some(&&y)) = (a.peek(), b.peek()) {
            match x.cmp(&y) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    fn insert(&mut self, v: NodeId) {
        if let Err(i) = self.0.binary_search(&v) {
            self.0.insert(i, v);
        }
    }

    fn remove(&mut self, v: NodeId) {
        if let Ok(i) = self.0.binary_search(&v) {
            self.0.remove(i);
        }
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        let mut v: Vec<NodeId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        NodeSet(v)
    }
}

impl<const N: usize> From<[NodeId; N]> for NodeSet {
    fn from(a: [NodeId; N]) -> Self {
        a.into_iter().collect()
    }
}

impl fmt::Display for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetFamily {
    pub universe: usize,
    pub p: usize,
    pub q: usize,
    pub sets: Vec<NodeSet>,
}

impl SetFamily {
    pub fn new(universe: usize, p: usize, q: usize, sets: Vec<NodeSet>) -> Result<Self, RepError> {
        if p + q > universe {
            return Err(RepError::UniverseTooSmall { sum: p + q, universe });
        }
        if let Some((index, s)) = sets.iter().enumerate().find(|(_, s)| s.len() > p) {
            return Err(RepError::SetTooLarge { index, size: s.len(), p });
        }
        Ok(SetFamily { universe, p, q, sets })
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// Paths from a common origin, all of the same length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathFamily {
    pub origin: NodeId,
    pub paths: Vec<SimplePath>,
}

impl PathFamily {
    pub fn new(origin: NodeId, paths: Vec<SimplePath>) -> Result<Self, RepError> {
        let len = paths.first().map(SimplePath::len);
        if paths.iter().any(|p| p.origin() != origin || Some(p.len()) != len) {
            return Err(RepError::MixedPaths);
        }
        Ok(PathFamily { origin, paths })
    }

    pub fn as_sets(&self) -> Vec<NodeSet> {
        self.paths.iter().map(|p| p.nodes().iter().copied().collect()).collect()
    }
}

/// A blocker proving `candidate` must be kept, if one exists.
///
/// The result has at most `q` elements, avoids `candidate` and meets every set
/// in `kept`.
pub fn needs(candidate: &NodeSet, kept: &[NodeSet], q: usize) -> Option<NodeSet> {
    fn search(candidate: &NodeSet, kept: &[NodeSet], x: &mut NodeSet, budget: usize) -> bool {
        let Some(b) = kept.iter().find(|b| b.is_disjoint(x)) else {
            return true;
        };
        if budget == 0 {
            return false;
        }
        for &e in b.as_slice() {
            if candidate.contains(e) {
                continue;
            }
            x.insert(e);
            if search(candidate, kept, x, budget - 1) {
                return true;
            }
            x.remove(e);
        }
        false
    }

    let mut x = NodeSet::empty();
    if !search(candidate, kept, &mut x, q) {
        return None;
    }
    assert!(x.len() <= q && x.is_disjoint(candidate), "blocker {x} is not disjoint from {candidate}");
    assert!(kept.iter().all(|b| !b.is_disjoint(&x)), "blocker {x} misses a kept set");
    Some(x)
}

/// Indices of the sets kept by the greedy pass, in input order.
pub fn representative_indices(sets: &[NodeSet], q: usize) -> Vec<usize> {
    let mut kept_sets: Vec<NodeSet> = Vec::new();
    let mut kept = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        if needs(s, &kept_sets, q).is_some() {
            kept_sets.push(s.clone());
            kept.push(i);
        }
    }
    kept
}

pub fn compute_representative(fam: &SetFamily) -> SetFamily {
    let sets = representative_indices(&fam.sets, fam.q).into_iter().map(|i| fam.sets[i].clone()).collect();
    SetFamily { sets, ..fam.clone() }
}

/// Exhaustive check that `sub` is a `fam.q`-representative of `fam`.
///
/// Blockers range over subsets of the union of `sub`: elements outside it
/// cannot help a blocker meet the sets of `sub`, so dropping them preserves
/// any counterexample.
pub fn verify_representative(fam: &SetFamily, sub: &SetFamily) -> Result<bool, RepError> {
    if !sub.sets.iter().all(|s| fam.sets.contains(s)) {
        return Ok(false);
    }
    let mut universe: Vec<NodeId> = sub.sets.iter().flat_map(|s| s.as_slice().iter().copied()).collect();
    universe.sort_unstable();
    universe.dedup();
    let q = fam.q.min(universe.len());
    let blockers: u64 = (0..=q).map(|j| binomial(universe.len() as u64, j as u64)).sum();
    if universe.len() > 63 || blockers > VERIFY_MAX_BLOCKERS {
        return Err(RepError::TooLarge { blockers, limit: VERIFY_MAX_BLOCKERS });
    }
    let mask = |s: &NodeSet| -> u64 {
        s.as_slice()
            .iter()
            .filter_map(|v| universe.binary_search(v).ok())
            .fold(0u64, |m, i| m | (1 << i))
    };
    let fam_masks: Vec<u64> = fam.sets.iter().map(mask).collect();
    let sub_masks: Vec<u64> = sub.sets.iter().map(mask).collect();

    let mut ok = true;
    for_each_subset(universe.len(), q, &mut |x| {
        let fam_avoids = fam_masks.iter().any(|a| a & x == 0);
        let sub_avoids = sub_masks.iter().any(|b| b & x == 0);
        if fam_avoids && !sub_avoids {
            ok = false;
        }
        ok
    });
    Ok(ok)
}

/// Calls `f` on every subset of `{0..u}` with at most `q` elements until it
/// returns false.
fn for_each_subset(u: usize, q: usize, f: &mut dyn FnMut(u64) -> bool) {
    fn go(start: usize, u: usize, left: usize, cur: u64, f: &mut dyn FnMut(u64) -> bool) -> bool {
        if !f(cur) {
            return false;
        }
        if left == 0 {
            return true;
        }
        (start..u).all(|i| go(i + 1, u, left - 1, cur | (1 << i), f))
    }
    go(0, u, q, 0, f);
}

/// Keeps a `(2k − p)`-representative subfamily of `pf`, `p` being the node
/// count of its paths.
pub fn filter_paths(pf: &PathFamily, k: usize) -> PathFamily {
    let Some(first) = pf.paths.first() else {
        return pf.clone();
    };
    let p = first.len() + 1;
    let q = (2 * k).saturating_sub(p);
    let paths = representative_indices(&pf.as_sets(), q).into_iter().map(|i| pf.paths[i].clone()).collect();
    PathFamily { origin: pf.origin, paths }
}

pub fn binomial(n: u64, r: u64) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{find_cycle_bruteforce, Graph};

    fn fam(p: usize, q: usize, universe: usize, sets: &[&[NodeId]]) -> SetFamily {
        SetFamily::new(universe, p, q, sets.iter().map(|s| s.iter().copied().collect()).collect()).unwrap()
    }

    #[test]
    fn needs_examples() {
        assert_eq!(needs(&[3].into(), &[[1].into(), [2].into()], 1), None);
        assert_eq!(needs(&[1].into(), &[], 1), Some(NodeSet::empty()));
        assert_eq!(needs(&[2].into(), &[[1].into()], 1), Some([1].into()));
    }

    #[test]
    fn representative_examples() {
        let f = fam(1, 1, 4, &[&[1], &[2], &[3]]);
        let r = compute_representative(&f);
        assert_eq!(r.sets, vec![NodeSet::from([1]), NodeSet::from([2])]);
        assert!(verify_representative(&f, &r).unwrap());

        let single = fam(2, 2, 5, &[&[0, 4]]);
        assert_eq!(compute_representative(&single), single);
    }

    #[test]
    fn all_pairs_of_four_are_irreducible() {
        let mut sets = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                sets.push(NodeSet::from([a, b]));
            }
        }
        let f = SetFamily::new(4, 2, 2, sets).unwrap();
        let r = compute_representative(&f);
        assert_eq!(r, f);
        assert_eq!(r.len(), binomial(4, 2) as usize);
    }

    #[test]
    fn verify_examples() {
        let f = fam(1, 1, 4, &[&[1], &[2], &[3]]);
        assert!(verify_representative(&f, &fam(1, 1, 4, &[&[1], &[2]])).unwrap());
        let g = fam(1, 1, 4, &[&[1], &[2]]);
        assert!(!verify_representative(&g, &fam(1, 1, 4, &[&[1]])).unwrap());
        assert!(verify_representative(&g, &g).unwrap());
        assert!(!verify_representative(&g, &fam(1, 1, 4, &[&[3]])).unwrap());
    }

    #[test]
    fn family_validation() {
        assert!(matches!(SetFamily::new(3, 2, 2, vec![]), Err(RepError::UniverseTooSmall { .. })));
        assert!(matches!(
            SetFamily::new(9, 1, 2, vec![[1, 2].into()]),
            Err(RepError::SetTooLarge { index: 0, .. })
        ));
        assert!(PathFamily::new(0, vec![SimplePath(vec![0, 1]), SimplePath(vec![0, 1, 2])]).is_err());
    }

    #[test]
    fn filter_keeps_single_path() {
        let pf = PathFamily::new(3, vec![SimplePath(vec![3, 1])]).unwrap();
        assert_eq!(filter_paths(&pf, 2), pf);
    }

    #[test]
    fn filter_shrinks_unit_paths_to_six() {
        let paths: Vec<_> = (1..20).map(|u| SimplePath(vec![0, u])).collect();
        let pf = PathFamily::new(0, paths).unwrap();
        let out = filter_paths(&pf, 2);
        assert!(out.paths.len() <= 6);
        let f = SetFamily::new(20, 2, 2, pf.as_sets()).unwrap();
        let s = SetFamily::new(20, 2, 2, out.as_sets()).unwrap();
        assert!(verify_representative(&f, &s).unwrap());
    }

    /// K_{2,4} with origin w = 0 on the small side. Every 1-edge path from w
    /// reaches the far side; after filtering at an intermediate node some
    /// kept path still closes a 4-cycle with every completion that works for
    /// the full family.
    #[test]
    fn filter_preserves_c4_completion_on_k24() {
        let edges = (0..2).flat_map(|a| (2..6).map(move |b| (a, b)));
        let g = Graph::from_edges(6, edges).unwrap();
        assert!(find_cycle_bruteforce(&g, 4).unwrap().is_some());
        let w = 0;
        // Paths w-b-1 arriving at node 1 from every b.
        let paths: Vec<_> = (2..6).map(|b| SimplePath(vec![w, b, 1])).collect();
        let pf = PathFamily::new(w, paths).unwrap();
        let kept = filter_paths(&pf, 2);
        // Completion: 1 back to w via a b not used by the path.
        for b in 2..6 {
            let x: NodeSet = [b].into();
            let full = pf.as_sets().iter().any(|a| a.is_disjoint(&x));
            let filtered = kept.as_sets().iter().any(|a| a.is_disjoint(&x));
            assert_eq!(full, filtered);
            if filtered {
                let a = kept.as_sets().into_iter().find(|a| a.is_disjoint(&x)).unwrap();
                let mid = a.as_slice().iter().copied().find(|&v| v != w && v != 1).unwrap();
                assert!(g.has_edge(w, mid) && g.has_edge(mid, 1) && g.has_edge(1, b) && g.has_edge(b, w));
            }
        }
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(6, 3), 20);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(12, 0), 1);
    }
}
