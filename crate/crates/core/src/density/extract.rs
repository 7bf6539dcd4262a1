//! Turning a nonempty core into a `2k`-cycle.

use std::collections::BTreeSet;

use super::bipartite::BipartiteH;
use super::table::{CoreGraph, InOutTable};
use super::DensityError;
use crate::graph::{verify_cycle, CycleWitness, Graph, NodeId, SimplePath};

/// A simple path `(x = u_0, …, u_i = u)` in `G` with edge `e` in
/// `OUT_j(u_j)` for every `j < i`. Searches neighbors by ascending id and
/// returns the first such path.
pub fn reconstruct_path(
    g: &Graph,
    h: &BipartiteH,
    t: &InOutTable,
    e: usize,
    i: usize,
    u: NodeId,
) -> Result<SimplePath, DensityError> {
    fn go(g: &Graph, t: &InOutTable, e: usize, j: usize, rev: &mut Vec<NodeId>, x: NodeId) -> bool {
        let tip = *rev.last().unwrap();
        if j == 0 {
            return tip == x;
        }
        for &w in g.neighbors(tip) {
            if rev.contains(&w) || !t.out(j - 1, w).contains(e) {
                continue;
            }
            rev.push(w);
            if go(g, t, e, j - 1, rev, x) {
                return true;
            }
            rev.pop();
        }
        false
    }

    let (x, y) = h.edge(e);
    if !t.inn(i, u).contains(e) && !(i == 0 && u == x) {
        return Err(DensityError::Invariant(format!("edge {{{x},{y}}} is not in IN_{i}({u})")));
    }
    let mut rev = vec![u];
    if go(g, t, e, i, &mut rev, x) {
        rev.reverse();
        Ok(SimplePath(rev))
    } else {
        Err(DensityError::Invariant(format!("no simple path carries {{{x},{y}}} from {x} to {u} in {i} steps")))
    }
}

/// Builds `P`, `P'`, `P''` around a core edge and closes them into a
/// `2k`-cycle through `core.u`. Core edges are tried in order until one
/// admits a simple carrying path.
pub fn extract_cycle_from_core(
    g: &Graph,
    h: &BipartiteH,
    t: &InOutTable,
    core: &CoreGraph,
    k: usize,
) -> Result<CycleWitness, DensityError> {
    let mut last = DensityError::Invariant(format!("core at level {} for {} has no edges", core.i, core.u));
    for &e in &core.edges {
        match cycle_through(g, h, t, core, k, e) {
            Ok(c) => return Ok(c),
            Err(err) => last = err,
        }
    }
    Err(last)
}

fn cycle_through(
    g: &Graph,
    h: &BipartiteH,
    t: &InOutTable,
    core: &CoreGraph,
    k: usize,
    e: usize,
) -> Result<CycleWitness, DensityError> {
    let (i, u) = (core.i, core.u);
    let p = reconstruct_path(g, h, t, e, i, u)?;
    let mut used: BTreeSet<NodeId> = p.nodes().iter().copied().collect();

    // P' alternates X and Y inside the core, starting at x_0 = x.
    let mut p2 = vec![p.origin()];
    for step in 0..2 * (k - i) - 1 {
        let tip = *p2.last().unwrap();
        let next = core
            .neighbors(h, tip)
            .into_iter()
            .find(|w| !used.contains(w))
            .ok_or_else(|| DensityError::Invariant(format!("P' stuck at step {step} from {tip}")))?;
        used.insert(next);
        p2.push(next);
    }
    let y_end = *p2.last().unwrap();

    let mut a = BTreeSet::new();
    for &w in &used {
        for j in 1..i {
            a.extend(t.out(j, w).intersection(h.incident(y_end)));
        }
    }
    let x_bad = used.iter().filter(|&&w| h.is_x(w)).count();
    let cap = (2 * k).pow(i as u32);
    if a.len() + x_bad >= cap {
        return Err(DensityError::Invariant(format!("|A| + |X_bad| = {} reaches {cap}", a.len() + x_bad)));
    }

    let e2 = t
        .inn(i, u)
        .intersection(h.incident(y_end))
        .find(|id| !a.contains(id) && !used.contains(&h.edge(*id).0))
        .ok_or_else(|| DensityError::Invariant(format!("no closing edge at {y_end}")))?;
    let p3 = reconstruct_path(g, h, t, e2, i, u)?;

    let mut cycle: Vec<NodeId> = p.nodes().iter().rev().copied().collect();
    cycle.extend(&p2[1..]);
    cycle.extend(&p3.nodes()[..i]);
    let w = CycleWitness(cycle);
    if verify_cycle(g, &w, 2 * k) {
        Ok(w)
    } else {
        Err(DensityError::Invariant(format!("assembled walk {w} is not a {}-cycle", 2 * k)))
    }
}
