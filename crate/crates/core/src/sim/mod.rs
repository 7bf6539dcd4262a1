//! Deterministic synchronous Broadcast CONGEST simulator.
//!
//! Each round every live node receives the words its neighbors broadcast in
//! the previous round (grouped by sender), computes, and may hand words to
//! its outbox. At the end of the round the simulator transmits at most one
//! word per node, identical for all neighbors. Multi-word messages drain
//! from the outbox over consecutive rounds.
//!
//! A node's `on_round` runs only in rounds where it has mail or has asked to
//! be woken with [`RoundContext::wake_at`]. Rounds in which nothing is in
//! flight and nobody is scheduled are skipped without changing any round
//! count, so long fixed-budget phases cost nothing to simulate.

mod word;

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

pub use word::{
    deserialize_path, serialize_path, DecodeError, Decoded, PathDemux, PathStream, Word, WordFormat, TAG_BITS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Accept,
    Reject,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeVerdict {
    Accept,
    Reject,
    Undecided,
}

impl From<Verdict> for NodeVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Accept => NodeVerdict::Accept,
            Verdict::Reject => NodeVerdict::Reject,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accept => "accept",
            Verdict::Reject => "reject",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaultKind {
    #[error("second broadcast in one round")]
    DoubleBroadcast,
    #[error("word {word:#x} exceeds the {width}-bit capacity")]
    WordTooWide { word: u64, width: u32 },
    #[error("decided twice")]
    DoubleDecision,
    #[error("wake-up requested for past round {0}")]
    WakeInPast(u64),
    #[error("program fault: {0}")]
    Program(String),
}

/// A run aborted because a node broke the model's rules.
#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[error("node {node} in round {round}: {kind}")]
pub struct SimFault {
    pub round: u64,
    pub node: NodeId,
    pub kind: FaultKind,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerdictError {
    #[error("timeout: {undecided} nodes undecided")]
    Timeout { undecided: usize },
}

/// Per-node behavior. The struct implementing this is the node's state.
pub trait NodeProgram {
    /// Program-specific per-node data surfaced through [`RunReport`].
    type Summary;

    fn init(&mut self, ctx: &mut RoundContext<'_>);
    fn on_round(&mut self, ctx: &mut RoundContext<'_>, inbox: &[Delivery]);
    fn summary(&self) -> Self::Summary;
}

/// Spawns one [`NodeProgram`] per node and fixes the parameters every node
/// knows up front.
pub trait Protocol {
    type Node: NodeProgram;

    fn k(&self) -> u32;
    fn spawn(&self, id: NodeId) -> Self::Node;
    /// Rounds the protocol needs to finish on any `n`-node graph.
    fn round_budget(&self) -> u64;
}

/// A word received from a neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Delivery {
    pub from: NodeId,
    pub word: Word,
}

/// What a node sees and may do during one callback.
pub struct RoundContext<'a> {
    id: NodeId,
    degree: usize,
    n: usize,
    k: u32,
    round: u64,
    format: WordFormat,
    slot: &'a mut NodeSlot,
}

impl RoundContext<'_> {
    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn format(&self) -> WordFormat {
        self.format
    }

    /// Sends `word` this round. Faults if anything else goes out this round.
    pub fn broadcast(&mut self, word: Word) {
        if self.slot.direct.is_some() || !self.slot.outbox.is_empty() {
            self.fault(FaultKind::DoubleBroadcast);
        } else if self.check_width(word) {
            self.slot.direct = Some(word);
        }
    }

    /// Queues words; the simulator sends one per round, starting this round.
    pub fn enqueue<I: IntoIterator<Item = Word>>(&mut self, words: I) {
        for w in words {
            if !self.check_width(w) {
                return;
            }
            self.slot.outbox.push_back(w);
        }
    }

    pub fn outbox_len(&self) -> usize {
        self.slot.outbox.len() + usize::from(self.slot.direct.is_some())
    }

    /// Terminal output. The node stops and its unsent words are dropped.
    pub fn decide(&mut self, verdict: Verdict) {
        if self.slot.verdict.is_some() {
            self.fault(FaultKind::DoubleDecision);
        } else {
            self.slot.verdict = Some(verdict);
        }
    }

    pub fn wake_at(&mut self, round: u64) {
        if round <= self.round {
            self.fault(FaultKind::WakeInPast(round));
        } else {
            self.slot.wakes.push(round);
        }
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.fault(FaultKind::Program(msg.into()));
    }

    fn fault(&mut self, kind: FaultKind) {
        if self.slot.fault.is_none() {
            self.slot.fault = Some(kind);
        }
    }

    fn check_width(&mut self, word: Word) -> bool {
        if self.format.fits(word) {
            true
        } else {
            let width = self.format.width();
            self.fault(FaultKind::WordTooWide { word: word.0, width });
            false
        }
    }
}

#[derive(Default)]
struct NodeSlot {
    outbox: VecDeque<Word>,
    direct: Option<Word>,
    verdict: Option<Verdict>,
    wakes: Vec<u64>,
    fault: Option<FaultKind>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub max_rounds: u64,
    pub trace: bool,
}

impl SimConfig {
    pub fn new(max_rounds: u64) -> Self {
        SimConfig { max_rounds, trace: false }
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = true;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub round: u64,
    pub node: NodeId,
    pub word: Word,
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "round={} node={} word={:x}", self.round, self.node, self.word)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport<S> {
    pub n: usize,
    pub k: u32,
    pub word_bits: u32,
    pub verdicts: Vec<NodeVerdict>,
    pub rounds_used: u64,
    pub timed_out: bool,
    pub words_sent: Vec<u64>,
    pub peak_outbox: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trace: Option<Vec<TraceEvent>>,
    pub summaries: Vec<S>,
}

impl<S> RunReport<S> {
    pub fn total_words(&self) -> u64 {
        self.words_sent.iter().sum()
    }

    pub fn rejecting_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.verdicts
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == NodeVerdict::Reject)
            .map(|(i, _)| i as NodeId)
    }

    /// Trace lines in the `round=<t> node=<v> word=<hex>` format.
    pub fn trace_lines(&self) -> Vec<String> {
        self.trace.iter().flatten().map(ToString::to_string).collect()
    }
}

/// Reject iff some node rejected, accept iff all accepted.
pub fn global_verdict<S>(report: &RunReport<S>) -> Result<Verdict, VerdictError> {
    let undecided = report.verdicts.iter().filter(|v| **v == NodeVerdict::Undecided).count();
    if undecided > 0 {
        return Err(VerdictError::Timeout { undecided });
    }
    if report.verdicts.contains(&NodeVerdict::Reject) {
        Ok(Verdict::Reject)
    } else {
        Ok(Verdict::Accept)
    }
}

/// Rounds a flooding phase takes when every node drains its queue one word
/// per round in lockstep.
pub fn charge_phase<I: IntoIterator<Item = u64>>(words_per_node: I) -> u64 {
    words_per_node.into_iter().max().unwrap_or(0)
}

/// Runs `protocol` on `g` until every node decided or `max_rounds` passed.
pub fn run<P: Protocol>(
    g: &Graph,
    protocol: &P,
    config: &SimConfig,
) -> Result<RunReport<<P::Node as NodeProgram>::Summary>, SimFault> {
    assert!(config.max_rounds >= 1, "max_rounds must be at least 1");
    let n = g.n();
    let k = protocol.k();
    let format = WordFormat::for_nodes(n);

    let mut nodes: Vec<P::Node> = g.nodes().map(|v| protocol.spawn(v)).collect();
    let mut slots: Vec<NodeSlot> = (0..n).map(|_| NodeSlot::default()).collect();
    let mut decided = vec![false; n];
    let mut undecided = n;
    let mut inbox: Vec<Vec<Delivery>> = vec![Vec::new(); n];
    let mut next_inbox: Vec<Vec<Delivery>> = vec![Vec::new(); n];
    let mut mail: Vec<NodeId> = Vec::new();
    let mut wakes: BinaryHeap<Reverse<(u64, NodeId)>> = BinaryHeap::new();
    let mut senders: BTreeSet<NodeId> = BTreeSet::new();
    let mut words_sent = vec![0u64; n];
    let mut peak_outbox = 0usize;
    let mut trace = config.trace.then(Vec::new);

    let mut round = 1u64;
    let mut callees: Vec<NodeId> = g.nodes().collect();
    let timed_out = loop {
        // Compute.
        for &v in &callees {
            let vi = v as usize;
            let mut ctx = RoundContext { id: v, degree: g.degree(v), n, k, round, format, slot: &mut slots[vi] };
            if round == 1 {
                nodes[vi].init(&mut ctx);
            } else {
                nodes[vi].on_round(&mut ctx, &inbox[vi]);
            }
            let slot = &mut slots[vi];
            if let Some(kind) = slot.fault.take() {
                return Err(SimFault { round, node: v, kind });
            }
            for w in slot.wakes.drain(..) {
                wakes.push(Reverse((w, v)));
            }
            if slot.verdict.is_some() {
                decided[vi] = true;
                undecided -= 1;
                slot.outbox.clear();
                slot.direct = None;
                senders.remove(&v);
            } else {
                peak_outbox = peak_outbox.max(slot.outbox.len() + usize::from(slot.direct.is_some()));
                if !slot.outbox.is_empty() || slot.direct.is_some() {
                    senders.insert(v);
                }
            }
        }
        for &v in &mail {
            inbox[v as usize].clear();
        }
        mail.clear();

        if undecided == 0 {
            break false;
        }

        // Transmit: one word per sender, identical for all neighbors.
        let mut drained = Vec::new();
        for &v in &senders {
            let slot = &mut slots[v as usize];
            let word = match slot.direct.take() {
                Some(w) => w,
                None => slot.outbox.pop_front().expect("senders have queued words"),
            };
            if slot.outbox.is_empty() {
                drained.push(v);
            }
            words_sent[v as usize] += 1;
            if let Some(t) = trace.as_mut() {
                t.push(TraceEvent { round, node: v, word });
            }
            for &u in g.neighbors(v) {
                if decided[u as usize] {
                    continue;
                }
                let target = &mut next_inbox[u as usize];
                if target.is_empty() {
                    mail.push(u);
                }
                target.push(Delivery { from: v, word });
            }
        }
        for v in drained {
            senders.remove(&v);
        }
        std::mem::swap(&mut inbox, &mut next_inbox);

        // Next round with anything to do.
        let next = if !mail.is_empty() || !senders.is_empty() {
            Some(round + 1)
        } else {
            loop {
                match wakes.peek() {
                    Some(Reverse((r, v))) if decided[*v as usize] => {
                        let _ = r;
                        wakes.pop();
                    }
                    Some(Reverse((r, _))) => break Some(*r),
                    None => break None,
                }
            }
        };
        match next {
            Some(r) if r <= config.max_rounds => round = r,
            _ => {
                round = config.max_rounds;
                break true;
            }
        }

        mail.sort_unstable();
        callees.clear();
        callees.extend(mail.iter().copied());
        while let Some(Reverse((r, v))) = wakes.peek().copied() {
            if r > round {
                break;
            }
            wakes.pop();
            if !decided[v as usize] {
                callees.push(v);
            }
        }
        callees.sort_unstable();
        callees.dedup();
    };

    let verdicts = slots
        .iter()
        .map(|s| s.verdict.map_or(NodeVerdict::Undecided, NodeVerdict::from))
        .collect();
    Ok(RunReport {
        n,
        k,
        word_bits: format.width(),
        verdicts,
        rounds_used: round,
        timed_out,
        words_sent,
        peak_outbox,
        trace,
        summaries: nodes.iter().map(NodeProgram::summary).collect(),
    })
}
