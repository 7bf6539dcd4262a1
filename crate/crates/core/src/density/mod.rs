//! Constructive certificates: a node whose `ℓ`-reach has too much total
//! degree yields an explicit `2k`-cycle.

mod bipartite;
mod extract;
mod table;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{check_path_len, local_density, CycleWitness, Graph, GraphError, NodeId};

pub use bipartite::{build_h, max_cut_bipartition, BipartiteH, Cut, HSource};
pub use extract::{extract_cycle_from_core, reconstruct_path};
pub use table::{compute_in_out, peel, CoreGraph, InOutTable, Peeling};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DensityError {
    #[error("local density {density} does not exceed {bound}")]
    PreconditionUnmet { density: u128, bound: u128 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("no nonempty core at any level")]
    NoCore,
    #[error("construction invariant broken: {0}")]
    Invariant(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// `6·(2k)^ℓ·n`.
pub fn density_bound(k: usize, ell: usize, n: usize) -> u128 {
    6 * (2 * k as u128).pow(ell as u32) * n as u128
}

/// A 4-cycle through `v` when the neighbors of `v` have total degree above
/// `2n`: some vertex other than `v` is adjacent to two of them.
pub fn c4_local_density_witness(g: &Graph, v: NodeId) -> Result<CycleWitness, DensityError> {
    if v as usize >= g.n() {
        return Err(GraphError::NodeOutOfRange { node: v, n: g.n() }.into());
    }
    let density: u128 = g.neighbors(v).iter().map(|&u| g.degree(u) as u128).sum();
    let bound = 2 * g.n() as u128;
    if density <= bound {
        return Err(DensityError::PreconditionUnmet { density, bound });
    }
    let mut first: Vec<Option<NodeId>> = vec![None; g.n()];
    for &u in g.neighbors(v) {
        for &y in g.neighbors(u) {
            if y == v {
                continue;
            }
            match first[y as usize] {
                Some(u0) => return Ok(CycleWitness(vec![v, u0, y, u])),
                None => first[y as usize] = Some(u),
            }
        }
    }
    Err(DensityError::Invariant("no vertex with two neighbors in N(v)".into()))
}

/// What `density_extract` found and where.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityCertificate {
    pub cycle: CycleWitness,
    /// Level and node of the core the cycle came from.
    pub level: usize,
    pub u: NodeId,
    pub source: HSource,
    pub h_edges: usize,
    pub cores: usize,
}

/// Full pipeline: build `H`, fill the tables, check them, and extract a
/// cycle from the first core (by level, then node) that yields one.
pub fn density_extract(g: &Graph, k: usize, ell: usize, v: NodeId) -> Result<DensityCertificate, DensityError> {
    if k < 2 || ell == 0 || ell >= k {
        return Err(DensityError::InvalidParams(format!("need k ≥ 2 and 1 ≤ ℓ < k, got k={k}, ℓ={ell}")));
    }
    check_path_len(ell)?;
    if v as usize >= g.n() {
        return Err(GraphError::NodeOutOfRange { node: v, n: g.n() }.into());
    }
    let density = local_density(g, v, ell)? as u128;
    let bound = density_bound(k, ell, g.n());
    if density <= bound {
        return Err(DensityError::PreconditionUnmet { density, bound });
    }

    let h = build_h(g, v, ell)?;
    if 6 * h.m() as u128 <= bound {
        return Err(DensityError::Invariant(format!("H has only {} edges", h.m())));
    }
    let t = compute_in_out(g, &h, ell, k)?;
    t.check_invariants(g, &h)?;
    if t.cores.is_empty() {
        return Err(DensityError::NoCore);
    }
    let mut last = DensityError::NoCore;
    for core in &t.cores {
        match extract_cycle_from_core(g, &h, &t, core, k) {
            Ok(cycle) => {
                return Ok(DensityCertificate {
                    cycle,
                    level: core.i,
                    u: core.u,
                    source: h.source,
                    h_edges: h.m(),
                    cores: t.cores.len(),
                })
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}
