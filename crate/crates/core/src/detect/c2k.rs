//! C2k-freeness in `O(n^(1−1/k))` rounds.
//!
//! After a degree exchange, light nodes (`deg^k < n`) flood simple paths for
//! `k` iterations through the light subgraph and look for two paths from one
//! origin that close a cycle through themselves. Then every node seeds one
//! path per heavy neighbor and runs `k − 1` filtered flooding iterations,
//! rejecting when too many origins reach it, and finally looks for two
//! internally disjoint `k`-edge paths between itself and some origin.
//!
//! Every phase has a fixed round window derived from `(n, k)`; a node whose
//! outbox has not drained when its window closes faults the run.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{filter_family, find_closing_pair, outcome_from, threshold_cap, threshold_exceeded, DetectionOutcome, Rejection};
use crate::graph::{is_heavy, max_light_degree, CycleWitness, Graph, NodeId, SimplePath};
use crate::rep::binomial;
use crate::sim::{
    charge_phase, run, serialize_path, Decoded, Delivery, NodeProgram, PathDemux, Protocol, RoundContext, RunReport,
    SimConfig, SimFault, Verdict,
};

/// Round boundaries shared by all nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct C2kSchedule {
    pub n: usize,
    pub k: u32,
    /// Largest light degree.
    pub light_degree: u64,
    /// Start rounds of light iterations `0..k`, then the light detection round.
    pub light: Vec<u64>,
    /// Start rounds of heavy iterations `1..k`, then the final detection round.
    pub heavy: Vec<u64>,
}

impl C2kSchedule {
    pub fn new(n: usize, k: u32) -> Self {
        assert!(k >= 2, "k must be at least 2");
        let d = max_light_degree(n as u64, k);
        let mut light = vec![2u64];
        for p in 0..k {
            let window = if p == 0 {
                2
            } else {
                let paths = d.saturating_mul(d.saturating_sub(1).saturating_pow(p - 1));
                (p as u64 + 2).saturating_mul(paths).max(1)
            };
            light.push(light.last().unwrap() + window);
        }
        let mut heavy = vec![*light.last().unwrap()];
        for ell in 1..k {
            heavy.push(heavy.last().unwrap() + Self::heavy_window(n, k, ell));
        }
        C2kSchedule { n, k, light_degree: d, light, heavy }
    }

    /// Rounds for heavy iteration `ell`: every admissible origin forwarding
    /// a full representative family of `ell`-edge paths.
    pub fn heavy_window(n: usize, k: u32, ell: u32) -> u64 {
        let origins = threshold_cap(k, ell, n as u64).max(1);
        let family = binomial(2 * k as u64, ell as u64 + 1);
        origins.saturating_mul(family).saturating_mul(ell as u64 + 2)
    }

    pub fn light_rounds(&self) -> u64 {
        self.light[self.k as usize] - self.light[0]
    }

    pub fn end(&self) -> u64 {
        *self.heavy.last().unwrap()
    }

    /// Bound on `|P(w)|` at heavy iteration `ell`.
    pub fn family_bound(&self, ell: u32) -> usize {
        binomial(2 * self.k as u64, ell as u64 + 1) as usize
    }

    /// Bound on words one origin costs a node at heavy iteration `ell`.
    pub fn origin_word_bound(&self, ell: u32) -> u64 {
        (ell as u64 + 3) * binomial(2 * self.k as u64, ell as u64 + 1)
    }
}

pub struct C2kProtocol {
    sched: Arc<C2kSchedule>,
}

impl C2kProtocol {
    pub fn new(n: usize, k: u32) -> Self {
        C2kProtocol { sched: Arc::new(C2kSchedule::new(n, k)) }
    }

    pub fn schedule(&self) -> &C2kSchedule {
        &self.sched
    }
}

impl Protocol for C2kProtocol {
    type Node = C2kNode;

    fn k(&self) -> u32 {
        self.sched.k
    }

    fn spawn(&self, id: NodeId) -> C2kNode {
        let k = self.sched.k as usize;
        C2kNode {
            id,
            sched: Arc::clone(&self.sched),
            heavy_nbrs: Vec::new(),
            demux: PathDemux::default(),
            received: Vec::new(),
            q: BTreeMap::new(),
            summary: C2kSummary {
                light_words: vec![0; k],
                heavy_words: vec![0; k - 1],
                max_family: vec![0; k - 1],
                max_origin_words: vec![0; k - 1],
                ..C2kSummary::default()
            },
        }
    }

    fn round_budget(&self) -> u64 {
        self.sched.end()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct C2kSummary {
    pub light: bool,
    pub rejection: Option<Rejection>,
    pub witness: Option<CycleWitness>,
    /// Words queued at each light iteration.
    pub light_words: Vec<u64>,
    /// Words queued at each heavy iteration.
    pub heavy_words: Vec<u64>,
    /// Largest `|W(v)|` seen.
    pub max_origins: usize,
    /// Largest filtered family forwarded for one origin, per heavy iteration.
    pub max_family: Vec<usize>,
    /// Largest word cost of one origin's family, per heavy iteration.
    pub max_origin_words: Vec<u64>,
}

pub struct C2kNode {
    id: NodeId,
    sched: Arc<C2kSchedule>,
    heavy_nbrs: Vec<NodeId>,
    demux: PathDemux,
    /// Paths completed in the current window, with their sender.
    received: Vec<(NodeId, SimplePath)>,
    /// Origin → paths from it ending here.
    q: BTreeMap<NodeId, BTreeSet<SimplePath>>,
    summary: C2kSummary,
}

impl C2kNode {
    fn reject(&mut self, ctx: &mut RoundContext<'_>, why: Rejection, witness: Option<CycleWitness>) {
        self.summary.rejection = Some(why);
        self.summary.witness = witness;
        ctx.decide(Verdict::Reject);
    }

    /// Closes the current window and returns its paths, each checked to have
    /// `edges` edges and to end at its sender.
    fn take_window(&mut self, ctx: &mut RoundContext<'_>, edges: usize) -> Option<Vec<SimplePath>> {
        if ctx.outbox_len() > 0 {
            ctx.fail(format!("window overrun with {} words queued", ctx.outbox_len()));
            return None;
        }
        if let Err(e) = self.demux.finish() {
            ctx.fail(format!("truncated path stream: {e}"));
            return None;
        }
        let mut out = Vec::with_capacity(self.received.len());
        for (from, p) in self.received.drain(..) {
            let distinct: BTreeSet<_> = p.nodes().iter().collect();
            if p.len() != edges || p.end() != from || distinct.len() != p.nodes().len() {
                ctx.fail(format!("malformed path {p} from {from}"));
                return None;
            }
            out.push(p);
        }
        Some(out)
    }

    fn light_step(&mut self, ctx: &mut RoundContext<'_>, iter: usize) {
        let fmt = ctx.format();
        let k = self.sched.k as usize;
        if iter == 0 {
            let words = serialize_path(&SimplePath::single(self.id), &fmt);
            self.summary.light_words[0] = words.len() as u64;
            ctx.enqueue(words);
            return;
        }
        let Some(paths) = self.take_window(ctx, iter - 1) else {
            return;
        };
        let extended: Vec<SimplePath> = paths.iter().filter(|p| !p.contains(self.id)).map(|p| p.extended(self.id)).collect();
        if iter < k {
            let words: Vec<_> = extended.iter().flat_map(|p| serialize_path(p, &fmt)).collect();
            self.summary.light_words[iter] = words.len() as u64;
            ctx.enqueue(words);
            return;
        }
        let mut by_origin: BTreeMap<NodeId, Vec<SimplePath>> = BTreeMap::new();
        for p in extended {
            by_origin.entry(p.origin()).or_default().push(p);
        }
        if let Some(c) = by_origin.values().find_map(find_closing_pair) {
            self.reject(ctx, Rejection::LightCycle, Some(c));
        }
    }

    /// Heavy iteration `ell` in `1..k`, or the final detection when `ell == k`.
    fn heavy_step(&mut self, ctx: &mut RoundContext<'_>, ell: u32) {
        let k = self.sched.k;
        if ell == 1 {
            self.q = self.heavy_nbrs.iter().map(|&w| (w, BTreeSet::from([SimplePath(vec![w, self.id])]))).collect();
        } else {
            let Some(paths) = self.take_window(ctx, ell as usize - 1) else {
                return;
            };
            self.q.clear();
            for p in paths {
                if !p.contains(self.id) {
                    self.q.entry(p.origin()).or_default().insert(p.extended(self.id));
                }
            }
        }
        if ell == k {
            if let Some(c) = self.q.values().find_map(find_closing_pair) {
                self.reject(ctx, Rejection::HeavyCycle, Some(c));
            } else {
                ctx.decide(Verdict::Accept);
            }
            return;
        }

        let origins = self.q.len();
        self.summary.max_origins = self.summary.max_origins.max(origins);
        if threshold_exceeded(origins as u64, k, ell, self.sched.n as u64) {
            return self.reject(ctx, Rejection::Threshold { ell }, None);
        }
        let fmt = ctx.format();
        let family_bound = self.sched.family_bound(ell);
        let word_bound = self.sched.origin_word_bound(ell);
        let mut words = Vec::new();
        for (&w, fam) in &self.q {
            let kept = filter_family(w, fam, k);
            let before = words.len();
            words.extend(kept.iter().flat_map(|p| serialize_path(p, &fmt)));
            let cost = (words.len() - before) as u64;
            let i = ell as usize - 1;
            self.summary.max_family[i] = self.summary.max_family[i].max(kept.len());
            self.summary.max_origin_words[i] = self.summary.max_origin_words[i].max(cost);
            if kept.len() > family_bound {
                return ctx.fail(format!("origin {w} keeps {} paths, bound {family_bound}", kept.len()));
            }
            if cost > word_bound {
                return ctx.fail(format!("origin {w} costs {cost} words, bound {word_bound}"));
            }
        }
        self.summary.heavy_words[ell as usize - 1] = words.len() as u64;
        ctx.enqueue(words);
    }
}

impl NodeProgram for C2kNode {
    type Summary = C2kSummary;

    fn init(&mut self, ctx: &mut RoundContext<'_>) {
        let w = ctx.format().degree_word(ctx.degree());
        ctx.broadcast(w);
        ctx.wake_at(self.sched.light[0]);
    }

    fn on_round(&mut self, ctx: &mut RoundContext<'_>, inbox: &[Delivery]) {
        let r = ctx.round();
        let fmt = ctx.format();
        let (n, k) = (self.sched.n as u64, self.sched.k);
        let light_end = self.sched.light[k as usize];

        if r == self.sched.light[0] {
            for d in inbox {
                let Decoded::Degree(deg) = fmt.decode(d.word) else {
                    return ctx.fail(format!("expected a degree from {}", d.from));
                };
                if is_heavy(deg as u64, n, k) {
                    self.heavy_nbrs.push(d.from);
                }
            }
            self.summary.light = !is_heavy(ctx.degree() as u64, n, k);
        } else if self.summary.light || r > light_end {
            for d in inbox {
                match self.demux.push(d.from, d.word, &fmt) {
                    Ok(Some(p)) => self.received.push((d.from, p)),
                    Ok(None) => {}
                    Err(e) => return ctx.fail(format!("bad stream from {}: {e}", d.from)),
                }
            }
        }

        if self.summary.light {
            if let Some(iter) = self.sched.light.iter().position(|&s| s == r) {
                self.light_step(ctx, iter);
                if self.summary.rejection.is_some() {
                    return;
                }
                if iter < k as usize {
                    ctx.wake_at(self.sched.light[iter + 1]);
                }
            }
        } else if r == self.sched.light[0] {
            ctx.wake_at(light_end);
        }

        if let Some(i) = self.sched.heavy.iter().position(|&s| s == r) {
            if self.summary.rejection.is_some() {
                return;
            }
            let ell = i as u32 + 1;
            self.heavy_step(ctx, ell);
            if ell < k && self.summary.rejection.is_none() {
                ctx.wake_at(self.sched.heavy[i + 1]);
            }
        }
    }

    fn summary(&self) -> C2kSummary {
        self.summary.clone()
    }
}

/// Runs the C2k program and summarizes the network outcome.
pub fn run_c2k(g: &Graph, k: u32, trace: bool) -> Result<(DetectionOutcome, RunReport<C2kSummary>), SimFault> {
    let proto = C2kProtocol::new(g.n(), k);
    let config = SimConfig { max_rounds: proto.round_budget(), trace };
    let report = run(g, &proto, &config)?;
    let light = (0..k as usize).map(|i| charge_phase(report.summaries.iter().map(|s| s.light_words[i]))).sum();
    let heavy = (0..k as usize - 1).map(|i| charge_phase(report.summaries.iter().map(|s| s.heavy_words[i]))).sum();
    let outcome = outcome_from(&report, light, heavy, |s| (s.rejection, s.witness.as_ref()))
        .expect("fixed schedule decides every node");
    Ok((outcome, report))
}
