//! C interface to the evencycle detectors.
//!
//! Graphs and reports are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns an
//! [`EcStatus`]; on failure [`ec_last_error`] describes what went wrong on
//! the calling thread.
//!
//! Node lists are written into caller buffers. When a buffer is too small the
//! call returns `BUFFER_TOO_SMALL` and still stores the required length, so
//! callers can size the buffer and retry.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use evencycle::density::{density_extract, DensityError};
use evencycle::detect::{run_c2k, run_c4, DetectionOutcome};
use evencycle::graph::{find_cycle_bruteforce, verify_cycle, CycleWitness, Graph, GraphError, NodeId};
use evencycle::sim::Verdict;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EcStatus {
    Ok = 0,
    /// The search finished without finding a cycle.
    NotFound = 1,
    InvalidArgument = 2,
    ParseError = 3,
    /// Density extraction was asked about a node below the bound.
    Precondition = 4,
    /// A simulated node broke the model's rules.
    Fault = 5,
    /// The run needed more rounds than the caller allowed.
    Timeout = 6,
    BufferTooSmall = 7,
    /// A bug: an internal check failed or the library panicked.
    Internal = 8,
    /// The input is larger than the exhaustive oracle accepts.
    Limit = 9,
}

/// An immutable simple graph.
pub struct EcGraph(Graph);

/// Result of one simulated detection run.
pub struct EcReport {
    algorithm: &'static str,
    k: u32,
    n: usize,
    outcome: DetectionOutcome,
    words_sent: u64,
    peak_outbox: usize,
}

/// Fixed-size view of an [`EcReport`]. Fields that do not apply are zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct EcOutcome {
    /// 1 when some node rejected, 0 when all accepted.
    pub reject: u8,
    /// 1 when a heavy-phase threshold fired.
    pub threshold_fired: u8,
    pub threshold_node: u32,
    pub threshold_level: u32,
    pub rounds_used: u64,
    pub light_rounds: u64,
    pub heavy_rounds: u64,
    pub words_sent: u64,
    /// Node count of the reported cycle, 0 when none.
    pub witness_len: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

struct Fail(EcStatus, String);

impl From<GraphError> for Fail {
    fn from(e: GraphError) -> Self {
        let status = match e {
            GraphError::Parse { .. } => EcStatus::ParseError,
            GraphError::OracleTooLarge { .. } => EcStatus::Limit,
            _ => EcStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn invalid(msg: &str) -> Fail {
    Fail(EcStatus::InvalidArgument, msg.to_string())
}

/// Runs `f`, turning errors and panics into a status plus a message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> EcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            EcStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {msg}"));
            EcStatus::Internal
        }
    }
}

unsafe fn graph_ref<'a>(g: *const EcGraph) -> Result<&'a Graph, Fail> {
    g.as_ref().map(|g| &g.0).ok_or_else(|| invalid("null graph"))
}

unsafe fn report_ref<'a>(r: *const EcReport) -> Result<&'a EcReport, Fail> {
    r.as_ref().ok_or_else(|| invalid("null report"))
}

unsafe fn write_nodes(nodes: &[NodeId], buf: *mut u32, cap: usize, len: *mut usize) -> Result<(), Fail> {
    if len.is_null() {
        return Err(invalid("null length pointer"));
    }
    *len = nodes.len();
    if nodes.len() > cap {
        return Err(Fail(EcStatus::BufferTooSmall, format!("need room for {} nodes, have {cap}", nodes.len())));
    }
    if !nodes.is_empty() {
        if buf.is_null() {
            return Err(invalid("null node buffer"));
        }
        ptr::copy_nonoverlapping(nodes.as_ptr(), buf, nodes.len());
    }
    Ok(())
}

unsafe fn put_handle<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into the library on the
/// same thread.
#[no_mangle]
pub extern "C" fn ec_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a graph on nodes `0..n` from `num_edges` pairs stored flat in
/// `edges` (`u0 v0 u1 v1 ...`). Self-loops and duplicates are rejected.
///
/// # Safety
/// `edges` must point to `2 * num_edges` readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ec_graph_from_edges(
    n: usize,
    edges: *const u32,
    num_edges: usize,
    out: *mut *mut EcGraph,
) -> EcStatus {
    guard(|| {
        if out.is_null() || (edges.is_null() && num_edges > 0) {
            return Err(invalid("null pointer"));
        }
        let flat = if num_edges == 0 { &[][..] } else { std::slice::from_raw_parts(edges, 2 * num_edges) };
        let g = Graph::from_edges(n, flat.chunks_exact(2).map(|p| (p[0], p[1])))?;
        put_handle(out, EcGraph(g));
        Ok(())
    })
}

/// Parses the edge-list text format: a header line `n m` followed by one
/// `u v` line per edge.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ec_graph_parse(text: *const c_char, out: *mut *mut EcGraph) -> EcStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return Err(invalid("null pointer"));
        }
        let s = CStr::from_ptr(text).to_str().map_err(|e| Fail(EcStatus::ParseError, e.to_string()))?;
        put_handle(out, EcGraph(Graph::parse_edge_list(s)?));
        Ok(())
    })
}

/// # Safety
/// `g` must come from this library and not be freed already. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ec_graph_free(g: *mut EcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph; `n` and `m` may be null.
#[no_mangle]
pub unsafe extern "C" fn ec_graph_counts(g: *const EcGraph, n: *mut usize, m: *mut usize) -> EcStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if !n.is_null() {
            *n = g.n();
        }
        if !m.is_null() {
            *m = g.m();
        }
        Ok(())
    })
}

/// Exhaustive search for a cycle of length `twok`. Returns `NOT_FOUND` when
/// there is none and `LIMIT` when the graph is too large to search.
///
/// # Safety
/// `g` must be a live graph, `buf` must hold `cap` values, `len` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ec_find_cycle(
    g: *const EcGraph,
    twok: usize,
    buf: *mut u32,
    cap: usize,
    len: *mut usize,
) -> EcStatus {
    guard(|| {
        let g = graph_ref(g)?;
        match find_cycle_bruteforce(g, twok)? {
            Some(c) => write_nodes(&c.0, buf, cap, len),
            None => {
                if !len.is_null() {
                    *len = 0;
                }
                Err(Fail(EcStatus::NotFound, format!("no cycle of length {twok}")))
            }
        }
    })
}

/// Sets `*valid` to 1 when `nodes` is a simple cycle of `len` edges in `g`
/// and `len == twok`.
///
/// # Safety
/// `g` must be a live graph, `nodes` must hold `len` values, `valid` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ec_verify_cycle(
    g: *const EcGraph,
    nodes: *const u32,
    len: usize,
    twok: usize,
    valid: *mut u8,
) -> EcStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if valid.is_null() || (nodes.is_null() && len > 0) {
            return Err(invalid("null pointer"));
        }
        let nodes = if len == 0 { Vec::new() } else { std::slice::from_raw_parts(nodes, len).to_vec() };
        *valid = u8::from(verify_cycle(g, &CycleWitness(nodes), twok));
        Ok(())
    })
}

fn finish_run(
    algorithm: &'static str,
    k: u32,
    n: usize,
    res: Result<(DetectionOutcome, u64, usize), evencycle::sim::SimFault>,
    max_rounds: u64,
) -> Result<EcReport, Fail> {
    let (outcome, words_sent, peak_outbox) = res.map_err(|f| Fail(EcStatus::Fault, f.to_string()))?;
    if max_rounds > 0 && outcome.rounds_used > max_rounds {
        return Err(Fail(EcStatus::Timeout, format!("used {} rounds, limit {max_rounds}", outcome.rounds_used)));
    }
    Ok(EcReport { algorithm, k, n, outcome, words_sent, peak_outbox })
}

/// Runs the general detector for cycles of length `2k`, `k >= 2`.
/// `max_rounds == 0` means no limit.
///
/// # Safety
/// `g` must be a live graph; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ec_run_c2k(g: *const EcGraph, k: u32, max_rounds: u64, out: *mut *mut EcReport) -> EcStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if out.is_null() {
            return Err(invalid("null pointer"));
        }
        if !(2..=6).contains(&k) {
            return Err(Fail(EcStatus::InvalidArgument, format!("k must be in 2..=6, got {k}")));
        }
        let res = run_c2k(g, k, false).map(|(o, r)| (o, r.words_sent.iter().sum(), r.peak_outbox));
        put_handle(out, finish_run("c2k", k, g.n(), res, max_rounds)?);
        Ok(())
    })
}

/// Runs the 4-cycle detector. `max_rounds == 0` means no limit.
///
/// # Safety
/// `g` must be a live graph; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ec_run_c4(g: *const EcGraph, max_rounds: u64, out: *mut *mut EcReport) -> EcStatus {
    guard(|| {
        let g = graph_ref(g)?;
        if out.is_null() {
            return Err(invalid("null pointer"));
        }
        let res = run_c4(g, false).map(|(o, r)| (o, r.words_sent.iter().sum(), r.peak_outbox));
        put_handle(out, finish_run("c4", 2, g.n(), res, max_rounds)?);
        Ok(())
    })
}

/// # Safety
/// `r` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ec_report_outcome(r: *const EcReport, out: *mut EcOutcome) -> EcStatus {
    guard(|| {
        let r = report_ref(r)?;
        let out = out.as_mut().ok_or_else(|| invalid("null pointer"))?;
        let o = &r.outcome;
        let (node, level) = o.threshold_fired.unwrap_or((0, 0));
        *out = EcOutcome {
            reject: u8::from(o.verdict == Verdict::Reject),
            threshold_fired: u8::from(o.threshold_fired.is_some()),
            threshold_node: node,
            threshold_level: level,
            rounds_used: o.rounds_used,
            light_rounds: o.light_rounds,
            heavy_rounds: o.heavy_rounds,
            words_sent: r.words_sent,
            witness_len: o.witness.as_ref().map_or(0, |w| w.0.len()),
        };
        Ok(())
    })
}

/// Copies the reported cycle into `buf`. `NOT_FOUND` when the run rejected
/// by threshold only, or accepted.
///
/// # Safety
/// `r` must be a live report, `buf` must hold `cap` values, `len` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ec_report_witness(r: *const EcReport, buf: *mut u32, cap: usize, len: *mut usize) -> EcStatus {
    guard(|| {
        let r = report_ref(r)?;
        match &r.outcome.witness {
            Some(w) => write_nodes(&w.0, buf, cap, len),
            None => {
                if !len.is_null() {
                    *len = 0;
                }
                Err(Fail(EcStatus::NotFound, "run reported no cycle".into()))
            }
        }
    })
}

/// Serializes the report as JSON into a new string released with
/// [`ec_string_free`].
///
/// # Safety
/// `r` must be a live report; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ec_report_to_json(r: *const EcReport, out: *mut *mut c_char) -> EcStatus {
    guard(|| {
        let r = report_ref(r)?;
        if out.is_null() {
            return Err(invalid("null pointer"));
        }
        let doc = serde_json::json!({
            "algorithm": r.algorithm,
            "k": r.k,
            "n": r.n,
            "outcome": r.outcome,
            "words_sent": r.words_sent,
            "peak_outbox": r.peak_outbox,
        });
        let text = serde_json::to_string(&doc).map_err(|e| Fail(EcStatus::Internal, e.to_string()))?;
        *out = CString::new(text).map_err(|e| Fail(EcStatus::Internal, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`ec_report_to_json`] and not be freed already.
#[no_mangle]
pub unsafe extern "C" fn ec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `r` must come from this library and not be freed already. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn ec_report_free(r: *mut EcReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Extracts a `2k`-cycle from a node whose `ell`-hop neighbourhood is dense
/// enough. `PRECONDITION` means the density at `v` is below the bound.
///
/// # Safety
/// `g` must be a live graph, `buf` must hold `cap` values, `len` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn ec_density_extract(
    g: *const EcGraph,
    k: usize,
    ell: usize,
    v: u32,
    buf: *mut u32,
    cap: usize,
    len: *mut usize,
) -> EcStatus {
    guard(|| {
        let g = graph_ref(g)?;
        match density_extract(g, k, ell, v) {
            Ok(cert) => write_nodes(&cert.cycle.0, buf, cap, len),
            Err(e) => Err(match e {
                DensityError::PreconditionUnmet { .. } => Fail(EcStatus::Precondition, e.to_string()),
                DensityError::InvalidParams(_) => Fail(EcStatus::InvalidArgument, e.to_string()),
                DensityError::Graph(ge) => Fail::from(ge),
                DensityError::NoCore | DensityError::Invariant(_) => Fail(EcStatus::Internal, e.to_string()),
            }),
        }
    })
}
