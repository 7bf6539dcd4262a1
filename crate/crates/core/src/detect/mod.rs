//! Distributed even-cycle detection programs and their shared predicates.

mod c2k;
mod c4;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{Pow, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::graph::{CycleWitness, Graph, NodeId, SimplePath};
use crate::rep::{filter_paths, PathFamily};
use crate::sim::{global_verdict, NodeVerdict, RunReport, Verdict, VerdictError};

pub use c2k::{run_c2k, C2kNode, C2kProtocol, C2kSchedule, C2kSummary};
pub use c4::{run_c4, C4Node, C4Protocol, C4Schedule, C4Summary};

/// Why a node rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Rejection {
    /// A cycle through light nodes only.
    LightCycle,
    /// Too many origins reached at heavy iteration `ell`.
    Threshold { ell: u32 },
    HeavyCycle,
}

/// `count > 6·(2k)^ℓ·n^(1−1/k)`, compared as `count^k > 6^k·(2k)^(ℓk)·n^(k−1)`.
pub fn threshold_exceeded(count: u64, k: u32, ell: u32, n: u64) -> bool {
    BigUint::from(count).pow(k) > threshold_power(k, ell, n)
}

/// Largest origin count that does not trip the threshold.
pub fn threshold_cap(k: u32, ell: u32, n: u64) -> u64 {
    threshold_power(k, ell, n).nth_root(k).to_u64().unwrap_or(u64::MAX)
}

fn threshold_power(k: u32, ell: u32, n: u64) -> BigUint {
    let six = BigUint::from(6u32).pow(k);
    let base = BigUint::from(2 * k).pow(ell * k);
    let nn = BigUint::from(n).pow(k - 1);
    six * base * nn
}

/// If `a` and `b` share both endpoints and nothing else, the cycle they form.
pub fn closing_cycle(a: &SimplePath, b: &SimplePath) -> Option<CycleWitness> {
    if a.len() != b.len() || a.len() < 2 || a.origin() != b.origin() || a.end() != b.end() {
        return None;
    }
    let inner_a = &a.nodes()[1..a.nodes().len() - 1];
    let inner_b = &b.nodes()[1..b.nodes().len() - 1];
    if inner_a.iter().any(|v| inner_b.contains(v)) {
        return None;
    }
    let mut nodes = a.nodes().to_vec();
    nodes.extend(inner_b.iter().rev());
    Some(CycleWitness(nodes))
}

/// First pair (in input order) of paths closing a cycle.
pub fn find_closing_pair<'a, I>(paths: I) -> Option<CycleWitness>
where
    I: IntoIterator<Item = &'a SimplePath>,
    I::IntoIter: Clone,
{
    let it = paths.into_iter();
    for (i, a) in it.clone().enumerate() {
        for b in it.clone().skip(i + 1) {
            if let Some(c) = closing_cycle(a, b) {
                return Some(c);
            }
        }
    }
    None
}

/// Filters one origin's family to a representative for `2k`-cycle completion.
pub fn filter_family(origin: NodeId, paths: &BTreeSet<SimplePath>, k: u32) -> Vec<SimplePath> {
    let pf = PathFamily { origin, paths: paths.iter().cloned().collect() };
    filter_paths(&pf, k as usize).paths
}

/// Centralized replay of the heavy-phase flooding from a single origin `w`,
/// with or without filtering. Returns the first node (by id) that closes a
/// `2k`-cycle, with the cycle.
pub fn origin_flood(g: &Graph, w: NodeId, k: u32, filtered: bool) -> Option<(NodeId, CycleWitness)> {
    let n = g.n();
    let mut q: Vec<BTreeSet<SimplePath>> = vec![BTreeSet::new(); n];
    for &v in g.neighbors(w) {
        q[v as usize].insert(SimplePath(vec![w, v]));
    }
    for _ell in 1..k {
        let sent: Vec<Vec<SimplePath>> = q
            .iter()
            .map(|fam| if filtered { filter_family(w, fam, k) } else { fam.iter().cloned().collect() })
            .collect();
        let mut next: Vec<BTreeSet<SimplePath>> = vec![BTreeSet::new(); n];
        for u in g.nodes() {
            for &v in g.neighbors(u) {
                for p in &sent[v as usize] {
                    if !p.contains(u) {
                        next[u as usize].insert(p.extended(u));
                    }
                }
            }
        }
        q = next;
    }
    g.nodes().find_map(|v| find_closing_pair(&q[v as usize]).map(|c| (v, c)))
}

/// Network-level outcome of one detection run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionOutcome {
    pub verdict: Verdict,
    pub rounds_used: u64,
    pub light_rounds: u64,
    pub heavy_rounds: u64,
    /// Least rejecting node and iteration whose threshold fired, if any.
    pub threshold_fired: Option<(NodeId, u32)>,
    /// Cycle reported by the least node that rejected by detection.
    pub witness: Option<CycleWitness>,
}

pub(crate) fn outcome_from<S>(
    report: &RunReport<S>,
    light_rounds: u64,
    heavy_rounds: u64,
    rejection: impl Fn(&S) -> (Option<Rejection>, Option<&CycleWitness>),
) -> Result<DetectionOutcome, VerdictError> {
    let verdict = global_verdict(report)?;
    let mut threshold_fired = None;
    let mut witness = None;
    for (v, s) in report.summaries.iter().enumerate() {
        if report.verdicts[v] != NodeVerdict::Reject {
            continue;
        }
        let (why, w) = rejection(s);
        if let (None, Some(Rejection::Threshold { ell })) = (threshold_fired, why) {
            threshold_fired = Some((v as NodeId, ell));
        }
        if witness.is_none() {
            witness = w.cloned();
        }
    }
    Ok(DetectionOutcome {
        verdict,
        rounds_used: report.rounds_used,
        light_rounds,
        heavy_rounds,
        threshold_fired,
        witness,
    })
}
