//! Experiment specs, oracle-checked sweeps, and report rows.

use std::path::PathBuf;
use std::time::Instant;

use rand::distributions::uniform::SampleUniform;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gen::{rng, Generator};
use super::LabError;
use crate::density::density_extract;
use crate::detect::{run_c2k, run_c4, DetectionOutcome};
use crate::graph::{find_cycle_bruteforce, local_density, Graph, NodeId, ORACLE_MAX_NODES};
use crate::sim::Verdict;

/// A parameter that is fixed, drawn from an inclusive range, or picked from
/// a list. In JSON: `7`, `{"lo": 8, "hi": 40}`, or `[2, 3, 5]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Param<T> {
    Fixed(T),
    Range { lo: T, hi: T },
    OneOf(Vec<T>),
}

impl<T: Copy + PartialOrd + SampleUniform> Param<T> {
    pub fn sample<R: Rng>(&self, r: &mut R) -> T {
        match self {
            Param::Fixed(v) => *v,
            Param::Range { lo, hi } => r.gen_range(*lo..=*hi),
            Param::OneOf(vs) => vs[r.gen_range(0..vs.len())],
        }
    }
}

impl<T> From<T> for Param<T> {
    fn from(v: T) -> Self {
        Param::Fixed(v)
    }
}

/// Family with possibly randomized parameters; `mix` picks a member spec
/// uniformly per seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Polarity { q: Param<u64> },
    Planted { n: Param<usize>, twok: Param<usize>, extra: Param<usize> },
    Random { n: Param<usize>, m: Param<usize> },
    Gnp { n: Param<usize>, p: Param<f64> },
    Tree { n: Param<usize> },
    CompleteBipartite { a: Param<usize>, b: Param<usize> },
    Cycle { n: Param<usize> },
    Complete { n: Param<usize> },
    Mix { of: Vec<GeneratorSpec> },
}

impl GeneratorSpec {
    /// Fixes every parameter for `seed`. The draw uses a stream separate
    /// from the graph's own randomness.
    pub fn instantiate(&self, seed: u64) -> Generator {
        self.draw(&mut rng(seed ^ 0x9e37_79b9_7f4a_7c15))
    }

    fn draw<R: Rng>(&self, r: &mut R) -> Generator {
        match self {
            GeneratorSpec::Polarity { q } => Generator::Polarity { q: q.sample(r) },
            GeneratorSpec::Planted { n, twok, extra } => {
                Generator::Planted { n: n.sample(r), twok: twok.sample(r), extra: extra.sample(r) }
            }
            GeneratorSpec::Random { n, m } => Generator::Random { n: n.sample(r), m: m.sample(r) },
            GeneratorSpec::Gnp { n, p } => Generator::Gnp { n: n.sample(r), p: p.sample(r) },
            GeneratorSpec::Tree { n } => Generator::Tree { n: n.sample(r) },
            GeneratorSpec::CompleteBipartite { a, b } => Generator::CompleteBipartite { a: a.sample(r), b: b.sample(r) },
            GeneratorSpec::Cycle { n } => Generator::Cycle { n: n.sample(r) },
            GeneratorSpec::Complete { n } => Generator::Complete { n: n.sample(r) },
            GeneratorSpec::Mix { of } => of[r.gen_range(0..of.len())].draw(r),
        }
    }

    fn is_empty_mix(&self) -> bool {
        match self {
            GeneratorSpec::Mix { of } => of.is_empty() || of.iter().any(GeneratorSpec::is_empty_mix),
            _ => false,
        }
    }
}

impl From<Generator> for GeneratorSpec {
    fn from(g: Generator) -> Self {
        match g {
            Generator::Polarity { q } => GeneratorSpec::Polarity { q: q.into() },
            Generator::Planted { n, twok, extra } => {
                GeneratorSpec::Planted { n: n.into(), twok: twok.into(), extra: extra.into() }
            }
            Generator::Random { n, m } => GeneratorSpec::Random { n: n.into(), m: m.into() },
            Generator::Gnp { n, p } => GeneratorSpec::Gnp { n: n.into(), p: p.into() },
            Generator::Tree { n } => GeneratorSpec::Tree { n: n.into() },
            Generator::CompleteBipartite { a, b } => GeneratorSpec::CompleteBipartite { a: a.into(), b: b.into() },
            Generator::Cycle { n } => GeneratorSpec::Cycle { n: n.into() },
            Generator::Complete { n } => GeneratorSpec::Complete { n: n.into() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    C4,
    C2k,
    DensityExtract,
    Bruteforce,
}

/// Seeds as an explicit list or `{"from": s, "count": c}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Seeds {
    List(Vec<u64>),
    Span { from: u64, count: u64 },
}

impl Seeds {
    pub fn to_vec(&self) -> Vec<u64> {
        match self {
            Seeds::List(v) => v.clone(),
            Seeds::Span { from, count } => (*from..from + count).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub generator: GeneratorSpec,
    pub k: u32,
    pub algorithm: Algorithm,
    pub seeds: Seeds,
    /// Rows whose run needs more rounds than this are flagged.
    #[serde(default)]
    pub max_rounds: Option<u64>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), LabError> {
        if self.k < 2 {
            return Err(LabError::BadSpec(format!("k must be at least 2, got {}", self.k)));
        }
        if self.seeds.to_vec().is_empty() {
            return Err(LabError::BadSpec("no seeds".into()));
        }
        if self.algorithm == Algorithm::C4 && self.k != 2 {
            return Err(LabError::BadSpec("the c4 algorithm needs k = 2".into()));
        }
        if self.generator.is_empty_mix() {
            return Err(LabError::BadSpec("mix with no members".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowVerdict {
    Accept,
    Reject,
    Fault,
    /// The algorithm does not apply to this instance.
    Inapplicable,
}

impl From<Verdict> for RowVerdict {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::Accept => RowVerdict::Accept,
            Verdict::Reject => RowVerdict::Reject,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleVerdict {
    Present,
    Absent,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleSource {
    Bruteforce,
    Construction,
    Certificate,
    None,
}

/// One instance of a sweep. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: u64,
    pub family: String,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub k: u32,
    pub verdict: RowVerdict,
    pub oracle: OracleVerdict,
    pub oracle_source: OracleSource,
    pub rounds_used: u64,
    pub light_rounds: u64,
    pub heavy_rounds: u64,
    pub threshold_fired: bool,
    pub threshold_level: Option<u32>,
    pub witness: Option<String>,
    pub wall_time_ms: f64,
    pub mismatch: bool,
    pub detail: String,
}

impl ReportRow {
    fn new(instance: u64, family: &str, seed: u64, g: &Graph, k: u32) -> Self {
        ReportRow {
            instance,
            family: family.to_string(),
            seed,
            n: g.n(),
            m: g.m(),
            k,
            verdict: RowVerdict::Inapplicable,
            oracle: OracleVerdict::Skipped,
            oracle_source: OracleSource::None,
            rounds_used: 0,
            light_rounds: 0,
            heavy_rounds: 0,
            threshold_fired: false,
            threshold_level: None,
            witness: None,
            wall_time_ms: 0.0,
            mismatch: false,
            detail: String::new(),
        }
    }

    fn absorb(&mut self, out: &DetectionOutcome) {
        self.verdict = out.verdict.into();
        self.rounds_used = out.rounds_used;
        self.light_rounds = out.light_rounds;
        self.heavy_rounds = out.heavy_rounds;
        self.threshold_fired = out.threshold_fired.is_some();
        self.threshold_level = out.threshold_fired.map(|(_, ell)| ell);
        self.witness = out.witness.as_ref().map(ToString::to_string);
    }
}

/// First `(ℓ, v)` with `1 ≤ ℓ < k` whose local density exceeds the bound.
pub fn find_violation(g: &Graph, k: u32) -> Option<(usize, NodeId)> {
    let k = k as usize;
    (1..k).find_map(|ell| {
        let bound = crate::density::density_bound(k, ell, g.n());
        g.nodes().find(|&v| local_density(g, v, ell).is_ok_and(|d| d as u128 > bound)).map(|v| (ell, v))
    })
}

/// Runs one instance, filling in verdict and oracle columns.
pub fn run_instance(
    instance: u64,
    seed: u64,
    gen: &Generator,
    k: u32,
    alg: Algorithm,
    max_rounds: Option<u64>,
) -> Result<ReportRow, LabError> {
    let g = gen.build(seed)?;
    let twok = 2 * k as usize;
    let mut row = ReportRow::new(instance, gen.name(), seed, &g, k);
    let start = Instant::now();
    let mut firing = None;
    match alg {
        Algorithm::C4 | Algorithm::C2k => {
            let res = if alg == Algorithm::C4 { run_c4(&g, false).map(|r| r.0) } else { run_c2k(&g, k, false).map(|r| r.0) };
            match res {
                Ok(out) => {
                    row.absorb(&out);
                    firing = out.threshold_fired;
                }
                Err(f) => {
                    row.verdict = RowVerdict::Fault;
                    row.detail = f.to_string();
                }
            }
        }
        Algorithm::DensityExtract => match find_violation(&g, k) {
            None => row.detail = "no density violation".into(),
            Some((ell, v)) => match density_extract(&g, k as usize, ell, v) {
                Ok(cert) => {
                    row.verdict = RowVerdict::Reject;
                    row.witness = Some(cert.cycle.to_string());
                    row.detail = format!("ell={ell} v={v} level={} u={}", cert.level, cert.u);
                }
                Err(e) => {
                    row.verdict = RowVerdict::Fault;
                    row.detail = e.to_string();
                }
            },
        },
        Algorithm::Bruteforce => match find_cycle_bruteforce(&g, twok) {
            Ok(w) => {
                row.verdict = if w.is_some() { RowVerdict::Reject } else { RowVerdict::Accept };
                row.witness = w.map(|c| c.to_string());
            }
            Err(e) => row.detail = e.to_string(),
        },
    }
    row.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    if let Some(limit) = max_rounds {
        if row.rounds_used > limit {
            row.verdict = RowVerdict::Fault;
            row.detail = format!("used {} rounds, limit {limit}", row.rounds_used);
        }
    }

    if g.n() <= ORACLE_MAX_NODES && alg != Algorithm::Bruteforce {
        let present = find_cycle_bruteforce(&g, twok)?.is_some();
        row.oracle = if present { OracleVerdict::Present } else { OracleVerdict::Absent };
        row.oracle_source = OracleSource::Bruteforce;
    } else if let Some(present) = gen.known_cycle(twok) {
        row.oracle = if present { OracleVerdict::Present } else { OracleVerdict::Absent };
        row.oracle_source = OracleSource::Construction;
    } else if let Some((v, ell)) = firing {
        if density_extract(&g, k as usize, ell as usize, v).is_ok() {
            row.oracle = OracleVerdict::Present;
            row.oracle_source = OracleSource::Certificate;
        }
    }

    row.mismatch = matches!(
        (row.verdict, row.oracle),
        (RowVerdict::Fault, _) | (RowVerdict::Accept, OracleVerdict::Present) | (RowVerdict::Reject, OracleVerdict::Absent)
    );
    Ok(row)
}

/// Runs every seed in parallel; rows come back ordered by instance.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<Vec<ReportRow>, LabError> {
    spec.validate()?;
    let seeds = spec.seeds.to_vec();
    seeds
        .par_iter()
        .enumerate()
        .map(|(i, &seed)| {
            let gen = spec.generator.instantiate(seed);
            run_instance(i as u64, seed, &gen, spec.k, spec.algorithm, spec.max_rounds)
        })
        .collect()
}

/// Least-squares slope and intercept of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_json_forms() {
        let text = r#"{
            "generator": {"family": "mix", "of": [
                {"family": "random", "n": {"lo": 8, "hi": 12}, "m": [10, 20]},
                {"family": "polarity", "q": 3}
            ]},
            "k": 2, "algorithm": "c2k", "seeds": {"from": 5, "count": 3}
        }"#;
        let spec: ExperimentSpec = serde_json::from_str(text).unwrap();
        spec.validate().unwrap();
        assert_eq!(spec.seeds.to_vec(), vec![5, 6, 7]);
        for s in 0..50 {
            match spec.generator.instantiate(s) {
                Generator::Random { n, m } => assert!((8..=12).contains(&n) && (m == 10 || m == 20)),
                Generator::Polarity { q } => assert_eq!(q, 3),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn bad_specs() {
        let mut spec = ExperimentSpec {
            generator: Generator::Tree { n: 5 }.into(),
            k: 1,
            algorithm: Algorithm::C2k,
            seeds: Seeds::List(vec![1]),
            max_rounds: None,
            output: None,
        };
        assert!(spec.validate().is_err());
        spec.k = 3;
        spec.algorithm = Algorithm::C4;
        assert!(spec.validate().is_err());
        spec.algorithm = Algorithm::C2k;
        spec.seeds = Seeds::List(vec![]);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn small_sweep_agrees() {
        let spec = ExperimentSpec {
            generator: GeneratorSpec::Random { n: Param::Range { lo: 8, hi: 14 }, m: Param::Range { lo: 8, hi: 25 } },
            k: 2,
            algorithm: Algorithm::C2k,
            seeds: Seeds::Span { from: 0, count: 40 },
            max_rounds: None,
            output: None,
        };
        let rows = run_sweep(&spec).unwrap();
        assert_eq!(rows.len(), 40);
        assert!(rows.iter().enumerate().all(|(i, r)| r.instance == i as u64));
        assert!(rows.iter().all(|r| r.oracle_source == OracleSource::Bruteforce && !r.mismatch));
    }

    #[test]
    fn density_rows() {
        let gen = Generator::CompleteBipartite { a: 50, b: 50 };
        let row = run_instance(0, 0, &gen, 2, Algorithm::DensityExtract, None).unwrap();
        assert_eq!(row.verdict, RowVerdict::Reject);
        assert!(!row.mismatch);
        let sparse = run_instance(0, 0, &Generator::Cycle { n: 8 }, 2, Algorithm::DensityExtract, None).unwrap();
        assert_eq!(sparse.verdict, RowVerdict::Inapplicable);
        assert!(!sparse.mismatch);
    }

    #[test]
    fn round_limit_flags_row() {
        let row = run_instance(0, 0, &Generator::Cycle { n: 8 }, 2, Algorithm::C2k, Some(1)).unwrap();
        assert_eq!(row.verdict, RowVerdict::Fault);
        assert!(row.mismatch);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<_> = (1..8).map(|i| (2f64.powi(i), 3.0 * 2f64.powf(0.5 * i as f64))).collect();
        let (s, c) = loglog_slope(&pts).unwrap();
        assert!((s - 0.5).abs() < 1e-9);
        assert!((c - 3f64.ln()).abs() < 1e-9);
        assert_eq!(loglog_slope(&[(1.0, 1.0)]), None);
    }
}
