//! C4-freeness in `O(√n)` rounds.
//!
//! Round 1 exchanges degrees. Light nodes (`deg² ≤ 2n`) then broadcast the
//! ids of their light neighbors; a node hearing the same id from two
//! different neighbors has a 4-cycle. In the second phase every node
//! broadcasts its heavy neighbors, rejecting outright if it has more than
//! `√(2n)` of them.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Roots;
use serde::{Deserialize, Serialize};

use super::{outcome_from, DetectionOutcome, Rejection};
use crate::graph::{CycleWitness, Graph, NodeId};
use crate::sim::{run, Decoded, Delivery, NodeProgram, Protocol, RoundContext, SimConfig, SimFault, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct C4Schedule {
    pub n: usize,
    /// `⌊√(2n)⌋`, the largest light degree.
    pub bound: u64,
}

impl C4Schedule {
    pub fn new(n: usize) -> Self {
        C4Schedule { n, bound: (2 * n as u64).sqrt() }
    }

    pub fn is_light(&self, deg: usize) -> bool {
        deg as u64 <= self.bound
    }

    fn phase1(&self) -> u64 {
        2
    }

    fn phase2(&self) -> u64 {
        2 + self.bound
    }

    pub fn end(&self) -> u64 {
        2 + 2 * self.bound
    }
}

pub struct C4Protocol {
    sched: Arc<C4Schedule>,
}

impl C4Protocol {
    pub fn new(n: usize) -> Self {
        C4Protocol { sched: Arc::new(C4Schedule::new(n)) }
    }
}

impl Protocol for C4Protocol {
    type Node = C4Node;

    fn k(&self) -> u32 {
        2
    }

    fn spawn(&self, id: NodeId) -> C4Node {
        C4Node {
            id,
            sched: Arc::clone(&self.sched),
            light: false,
            nbr_light: BTreeMap::new(),
            heard: BTreeMap::new(),
            summary: C4Summary::default(),
        }
    }

    fn round_budget(&self) -> u64 {
        self.sched.end()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct C4Summary {
    pub light: bool,
    pub heavy_neighbors: usize,
    pub rejection: Option<Rejection>,
    pub witness: Option<CycleWitness>,
    pub phase1_words: u64,
    pub phase2_words: u64,
}

pub struct C4Node {
    id: NodeId,
    sched: Arc<C4Schedule>,
    light: bool,
    nbr_light: BTreeMap<NodeId, bool>,
    /// Received id → forwarding neighbors, for the current phase.
    heard: BTreeMap<NodeId, Vec<NodeId>>,
    summary: C4Summary,
}

impl C4Node {
    fn detect(&self) -> Option<CycleWitness> {
        self.heard.iter().find_map(|(&w, from)| {
            let mut others = from.iter().copied().filter(|&u| u != w);
            match (others.next(), others.next()) {
                (Some(u), Some(u2)) if w != self.id => Some(CycleWitness(vec![self.id, u, w, u2])),
                _ => None,
            }
        })
    }

    fn reject(&mut self, ctx: &mut RoundContext<'_>, why: Rejection, witness: Option<CycleWitness>) {
        self.summary.rejection = Some(why);
        self.summary.witness = witness;
        ctx.decide(Verdict::Reject);
    }
}

impl NodeProgram for C4Node {
    type Summary = C4Summary;

    fn init(&mut self, ctx: &mut RoundContext<'_>) {
        let w = ctx.format().degree_word(ctx.degree());
        ctx.broadcast(w);
        ctx.wake_at(self.sched.phase1());
    }

    fn on_round(&mut self, ctx: &mut RoundContext<'_>, inbox: &[Delivery]) {
        let r = ctx.round();
        let fmt = ctx.format();
        for d in inbox {
            match fmt.decode(d.word) {
                Decoded::Degree(deg) if r == 2 => {
                    self.nbr_light.insert(d.from, self.sched.is_light(deg));
                }
                Decoded::Id(w) if r > 2 => self.heard.entry(w).or_default().push(d.from),
                other => return ctx.fail(format!("unexpected word {other:?}")),
            }
        }

        if r == self.sched.phase1() {
            self.light = self.sched.is_light(ctx.degree());
            self.summary.light = self.light;
            if self.light {
                let ids: Vec<_> = self.nbr_light.iter().filter(|(_, &l)| l).map(|(&u, _)| fmt.id_word(u)).collect();
                self.summary.phase1_words = ids.len() as u64;
                ctx.enqueue(ids);
            }
            ctx.wake_at(self.sched.phase2());
        } else if r == self.sched.phase2() {
            if ctx.outbox_len() > 0 {
                return ctx.fail("phase 1 window overrun");
            }
            if self.light {
                if let Some(c) = self.detect() {
                    return self.reject(ctx, Rejection::LightCycle, Some(c));
                }
            }
            self.heard.clear();
            let heavy: Vec<NodeId> = self.nbr_light.iter().filter(|(_, &l)| !l).map(|(&u, _)| u).collect();
            self.summary.heavy_neighbors = heavy.len();
            if (heavy.len() as u64).pow(2) > 2 * self.sched.n as u64 {
                return self.reject(ctx, Rejection::Threshold { ell: 1 }, None);
            }
            self.summary.phase2_words = heavy.len() as u64;
            ctx.enqueue(heavy.into_iter().map(|u| fmt.id_word(u)));
            ctx.wake_at(self.sched.end());
        } else if r == self.sched.end() {
            if ctx.outbox_len() > 0 {
                return ctx.fail("phase 2 window overrun");
            }
            match self.detect() {
                Some(c) => self.reject(ctx, Rejection::HeavyCycle, Some(c)),
                None => ctx.decide(Verdict::Accept),
            }
        }
    }

    fn summary(&self) -> C4Summary {
        self.summary.clone()
    }
}

/// Runs the C4 program to completion and summarizes the network outcome.
pub fn run_c4(g: &Graph, trace: bool) -> Result<(DetectionOutcome, crate::sim::RunReport<C4Summary>), SimFault> {
    let proto = C4Protocol::new(g.n());
    let config = SimConfig { max_rounds: proto.round_budget(), trace };
    let report = run(g, &proto, &config)?;
    let light = 2 + report.summaries.iter().map(|s| s.phase1_words).max().unwrap_or(0);
    let heavy = report.summaries.iter().map(|s| s.phase2_words).max().unwrap_or(0);
    let outcome = outcome_from(&report, light, heavy, |s| (s.rejection, s.witness.as_ref()))
        .expect("fixed schedule decides every node");
    Ok((outcome, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{find_cycle_bruteforce, verify_cycle};

    fn check(g: &Graph, expect_cycle: bool) {
        let (out, _) = run_c4(g, false).unwrap();
        assert_eq!(out.verdict == Verdict::Reject, expect_cycle);
        if let Some(c) = &out.witness {
            assert!(verify_cycle(g, c, 4), "bad witness {c}");
        }
    }

    #[test]
    fn c4_rejects() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        check(&g, true);
    }

    #[test]
    fn path_accepts() {
        let g = Graph::from_edges(5, (0..4).map(|i| (i, i + 1))).unwrap();
        check(&g, false);
    }

    #[test]
    fn big_star_accepts() {
        let g = Graph::from_edges(61, (1..61).map(|i| (0, i))).unwrap();
        assert_eq!(find_cycle_bruteforce(&g, 4).unwrap(), None);
        check(&g, false);
    }

    #[test]
    fn heavy_cycle_through_hub() {
        // A hub plus the path 1-2-3 closes 0-1-2-3.
        let mut edges: Vec<_> = (1..40).map(|i| (0, i)).collect();
        edges.extend([(1, 2), (2, 3)]);
        let g = Graph::from_edges(40, edges).unwrap();
        assert!(find_cycle_bruteforce(&g, 4).unwrap().is_some());
        check(&g, true);
    }

    #[test]
    fn rounds_follow_schedule() {
        let g = Graph::from_edges(8, [(0, 1), (1, 2)]).unwrap();
        let (out, _) = run_c4(&g, false).unwrap();
        assert_eq!(out.rounds_used, 2 + 2 * 4);
    }
}
