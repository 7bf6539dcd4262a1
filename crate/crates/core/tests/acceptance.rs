//! End-to-end acceptance checks. Each test prints one `PASS`/`FAIL` line
//! straight to stderr so it shows up even when output is captured.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use evencycle::density::{density_bound, density_extract, max_cut_bipartition};
use evencycle::detect::{run_c2k, C2kSchedule};
use evencycle::graph::{find_cycle_bruteforce, local_density, verify_cycle, Graph, NodeId};
use evencycle::lab::gen;
use evencycle::lab::{
    loglog_slope, run_sweep, Algorithm, ExperimentSpec, GeneratorSpec, OracleSource, OracleVerdict, Param, ReportRow,
    RowVerdict, Seeds,
};
use evencycle::rep::{binomial, compute_representative, verify_representative, NodeSet, SetFamily};
use evencycle::sim::Verdict;

#[allow(clippy::explicit_write)]
fn line(id: u32, name: &str, ok: bool, detail: String) {
    let tag = if ok { "PASS" } else { "FAIL" };
    writeln!(std::io::stderr(), "{tag} [{id:>2}] {name}: {detail}").unwrap();
    assert!(ok, "criterion {id} failed: {detail}");
}

fn range(lo: usize, hi: usize) -> Param<usize> {
    Param::Range { lo, hi }
}

fn mix_k2() -> GeneratorSpec {
    GeneratorSpec::Mix {
        of: vec![
            GeneratorSpec::Random { n: range(8, 40), m: range(8, 80) },
            GeneratorSpec::Planted { n: range(8, 40), twok: 4.into(), extra: range(0, 30) },
            GeneratorSpec::Tree { n: range(8, 40) },
            GeneratorSpec::CompleteBipartite { a: range(1, 6), b: range(7, 20) },
            GeneratorSpec::Polarity { q: Param::OneOf(vec![3, 5]) },
            GeneratorSpec::Gnp { n: range(8, 40), p: Param::Range { lo: 0.05, hi: 0.25 } },
        ],
    }
}

fn mix_k3() -> GeneratorSpec {
    GeneratorSpec::Mix {
        of: vec![
            GeneratorSpec::Random { n: range(8, 30), m: range(8, 50) },
            GeneratorSpec::Planted { n: range(8, 30), twok: 6.into(), extra: range(0, 20) },
            GeneratorSpec::Tree { n: range(8, 30) },
            GeneratorSpec::CompleteBipartite { a: range(1, 5), b: range(7, 20) },
            GeneratorSpec::Polarity { q: 3.into() },
            GeneratorSpec::Gnp { n: range(8, 30), p: Param::Range { lo: 0.05, hi: 0.2 } },
        ],
    }
}

fn spec(generator: GeneratorSpec, k: u32, algorithm: Algorithm, count: u64) -> ExperimentSpec {
    ExperimentSpec { generator, k, algorithm, seeds: Seeds::Span { from: 0, count }, max_rounds: None, output: None }
}

fn k2_rows() -> &'static [ReportRow] {
    static ROWS: OnceLock<Vec<ReportRow>> = OnceLock::new();
    ROWS.get_or_init(|| run_sweep(&spec(mix_k2(), 2, Algorithm::C2k, 1000)).unwrap())
}

fn k3_rows() -> &'static [ReportRow] {
    static ROWS: OnceLock<Vec<ReportRow>> = OnceLock::new();
    ROWS.get_or_init(|| run_sweep(&spec(mix_k3(), 3, Algorithm::C2k, 500)).unwrap())
}

const SCALING_NS: [usize; 7] = [64, 128, 256, 512, 1024, 2048, 4096];

fn scaling_rows(k: u32) -> Vec<ReportRow> {
    SCALING_NS
        .iter()
        .flat_map(|&n| {
            let g = GeneratorSpec::Planted { n: n.into(), twok: (2 * k as usize).into(), extra: n.into() };
            run_sweep(&spec(g, k, Algorithm::C2k, 3)).unwrap()
        })
        .collect()
}

fn dense_rows() -> Vec<ReportRow> {
    let mut rows = run_sweep(&spec(GeneratorSpec::Complete { n: 600.into() }, 2, Algorithm::C2k, 1)).unwrap();
    let g = GeneratorSpec::Gnp { n: 700.into(), p: 0.95.into() };
    rows.extend(run_sweep(&spec(g, 2, Algorithm::C2k, 1)).unwrap());
    rows
}

fn families(rows: &[ReportRow]) -> String {
    let mut by: BTreeMap<&str, usize> = BTreeMap::new();
    for r in rows {
        *by.entry(r.family.as_str()).or_default() += 1;
    }
    by.iter().map(|(f, c)| format!("{f}={c}")).collect::<Vec<_>>().join(" ")
}

fn equivalence(id: u32, k: u32, rows: &[ReportRow], n_max: usize) {
    let mismatches = rows.iter().filter(|r| r.mismatch).count();
    let all_oracled = rows.iter().all(|r| r.oracle_source == OracleSource::Bruteforce);
    let in_range = rows.iter().all(|r| (8..=n_max).contains(&r.n));
    let rejects = rows.iter().filter(|r| r.verdict == RowVerdict::Reject).count();
    let ok = rows.len() >= if k == 2 { 1000 } else { 500 } && mismatches == 0 && all_oracled && in_range;
    line(
        id,
        &format!("oracle equivalence k={k}"),
        ok,
        format!("{} instances ({}), {rejects} with a {}-cycle, {mismatches} mismatches", rows.len(), families(rows), 2 * k),
    );
}

#[test]
fn criterion_01_oracle_equivalence_k2() {
    equivalence(1, 2, k2_rows(), 40);
}

#[test]
fn criterion_02_oracle_equivalence_k3() {
    equivalence(2, 3, k3_rows(), 30);
}

#[test]
fn criterion_03_c4_agrees_with_c2k() {
    let c4 = run_sweep(&spec(mix_k2(), 2, Algorithm::C4, 1000)).unwrap();
    let c2k = k2_rows();
    let same_instances = c4.iter().zip(c2k).all(|(a, b)| (a.seed, a.n, a.m) == (b.seed, b.n, b.m));
    let disagree = c4.iter().zip(c2k).filter(|(a, b)| a.verdict != b.verdict).count();
    let faults = c4.iter().filter(|r| r.verdict == RowVerdict::Fault).count();
    line(
        3,
        "c4 vs c2k agreement",
        same_instances && c4.len() == c2k.len() && disagree == 0 && faults == 0,
        format!("{} instances, {disagree} disagreements, {faults} faults", c4.len()),
    );
}

#[test]
fn criterion_04_representative_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut over, mut wrong, mut total_sets, mut kept) = (0, 0, 0, 0);
    let count = 10_000;
    for _ in 0..count {
        let p = rng.gen_range(1..=7);
        let q = rng.gen_range(0..=8 - p);
        let universe = rng.gen_range(p + q..=14);
        let sets: Vec<NodeSet> = (0..rng.gen_range(0..=30))
            .map(|_| {
                let size = rng.gen_range(1..=p);
                rand::seq::index::sample(&mut rng, universe, size).into_iter().map(|v| v as NodeId).collect()
            })
            .collect();
        let fam = SetFamily::new(universe, p, q, sets).unwrap();
        let rep = compute_representative(&fam);
        total_sets += fam.len();
        kept += rep.len();
        if rep.len() as u64 > binomial((p + q) as u64, p as u64) {
            over += 1;
        }
        if !verify_representative(&fam, &rep).unwrap() {
            wrong += 1;
        }
    }
    line(
        4,
        "representative families",
        over == 0 && wrong == 0,
        format!("{count} families, {kept}/{total_sets} sets kept, {over} over the size bound, {wrong} failed verification"),
    );
}

/// `K_{a,a}` with `r` random edges removed.
fn thinned_kaa(a: usize, r: usize, seed: u64) -> Graph {
    let full = gen::complete_bipartite(a, a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<_> = full.edges().collect();
    let drop: std::collections::BTreeSet<usize> = rand::seq::index::sample(&mut rng, edges.len(), r).into_iter().collect();
    Graph::from_edges(2 * a, edges.iter().enumerate().filter(|(i, _)| !drop.contains(i)).map(|(_, e)| *e)).unwrap()
}

fn first_violation(g: &Graph, k: usize, ell: usize) -> Option<NodeId> {
    let bound = density_bound(k, ell, g.n());
    g.nodes().find(|&v| local_density(g, v, ell).unwrap() as u128 > bound)
}

#[test]
fn criterion_05_density_extraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut instances: Vec<(usize, usize, Graph)> = Vec::new();
    for s in 0..100 {
        let a = rng.gen_range(52..=64);
        instances.push((2, 1, thinned_kaa(a, rng.gen_range(0..a), s)));
    }
    for s in 0..40 {
        let a = rng.gen_range(76..=84);
        instances.push((3, 1, thinned_kaa(a, rng.gen_range(0..a), 100 + s)));
    }
    for s in 0..30 {
        let n = rng.gen_range(60..=80);
        instances.push((3, 1, gen::gnp(n, rng.gen_range(0.9..0.97), 200 + s).unwrap()));
    }
    for s in 0..30 {
        let n = rng.gen_range(230..=240);
        instances.push((3, 2, gen::gnp(n, 0.985, 300 + s).unwrap()));
    }

    let mut failures = Vec::new();
    let mut levels: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for (idx, (k, ell, g)) in instances.iter().enumerate() {
        let Some(v) = first_violation(g, *k, *ell) else {
            failures.push(format!("#{idx}: no violation"));
            continue;
        };
        match density_extract(g, *k, *ell, v) {
            Ok(cert) if verify_cycle(g, &cert.cycle, 2 * k) => {
                *levels.entry((*k, *ell, cert.level)).or_default() += 1;
                if g.n() <= 130 && find_cycle_bruteforce(g, 2 * k).unwrap().is_none() {
                    failures.push(format!("#{idx}: oracle finds no cycle"));
                }
            }
            Ok(cert) => failures.push(format!("#{idx}: bad witness {}", cert.cycle)),
            Err(e) => failures.push(format!("#{idx}: {e}")),
        }
    }
    let per_k = |k| instances.iter().filter(|i| i.0 == k).count();
    let summary = levels.iter().map(|((k, l, i), c)| format!("k={k},ell={l},core={i}:{c}")).collect::<Vec<_>>().join(" ");
    line(
        5,
        "density extraction",
        failures.is_empty(),
        format!("{} k=2 and {} k=3 instances, verified [{summary}], failures {:?}", per_k(2), per_k(3), failures),
    );
}

#[test]
fn criterion_06_threshold_soundness() {
    let mut rows: Vec<ReportRow> = k2_rows().to_vec();
    rows.extend_from_slice(k3_rows());
    rows.extend(scaling_rows(2));
    rows.extend(dense_rows());
    let fired: Vec<&ReportRow> = rows.iter().filter(|r| r.threshold_fired).collect();
    let unsound = fired.iter().filter(|r| r.oracle != OracleVerdict::Present).count();
    let sources: BTreeMap<String, usize> = fired.iter().fold(BTreeMap::new(), |mut m, r| {
        *m.entry(format!("{:?}", r.oracle_source).to_lowercase()).or_default() += 1;
        m
    });
    line(
        6,
        "threshold soundness",
        !fired.is_empty() && unsound == 0,
        format!("{} rows, {} threshold firings (oracle {sources:?}), {unsound} without a cycle", rows.len(), fired.len()),
    );
}

#[test]
fn criterion_07_round_scaling() {
    let mut parts = Vec::new();
    let mut ok = true;
    for (k, limit) in [(2u32, 0.6), (3, 0.77)] {
        let rows = scaling_rows(k);
        let points: Vec<(f64, f64)> = SCALING_NS
            .iter()
            .map(|&n| {
                let at: Vec<_> = rows.iter().filter(|r| r.n == n).collect();
                (n as f64, at.iter().map(|r| r.rounds_used as f64).sum::<f64>() / at.len() as f64)
            })
            .collect();
        let clean = rows.iter().all(|r| !r.mismatch && r.verdict == RowVerdict::Reject);
        let (slope, _) = loglog_slope(&points).unwrap();
        ok &= clean && slope <= limit;
        parts.push(format!("k={k} slope {slope:.3} (limit {limit}, rounds {:.0}..{:.0})", points[0].1, points[6].1));
    }
    line(7, "round scaling", ok, parts.join("; "));
}

#[test]
fn criterion_08_congestion() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut runs, mut faults, mut violations, mut active) = (0, 0, 0, 0u64);
    let mut worst: BTreeMap<(u32, u32), (usize, u64)> = BTreeMap::new();
    for k in [2u32, 3] {
        for s in 0..250 {
            let n = rng.gen_range(16..=40);
            let g = gen::random(n, rng.gen_range(n..=4 * n), 800 + s).unwrap();
            runs += 1;
            let Ok((_, report)) = run_c2k(&g, k, false) else {
                faults += 1;
                continue;
            };
            let sched = C2kSchedule::new(n, k);
            for s in &report.summaries {
                for ell in 1..k {
                    let (fam, words) = (s.max_family[ell as usize - 1], s.max_origin_words[ell as usize - 1]);
                    active += u64::from(fam > 0);
                    let e = worst.entry((k, ell)).or_default();
                    *e = (e.0.max(fam), e.1.max(words));
                    if fam > sched.family_bound(ell) || words > sched.origin_word_bound(ell) {
                        violations += 1;
                    }
                }
            }
        }
    }
    let sweep_faults = k2_rows().iter().chain(k3_rows()).filter(|r| r.verdict == RowVerdict::Fault).count();
    let detail = worst
        .iter()
        .map(|(&(k, ell), &(f, w))| {
            format!("k={k} ell={ell}: family {f}/{} words {w}/{}", binomial(2 * k as u64, ell as u64 + 1), (ell as u64 + 3) * binomial(2 * k as u64, ell as u64 + 1))
        })
        .collect::<Vec<_>>()
        .join("; ");
    line(
        8,
        "congestion bounds",
        faults == 0 && sweep_faults == 0 && violations == 0 && active > 0,
        format!("{runs} runs, {active} active node-iterations, {violations} violations, {} faults [{detail}]", faults + sweep_faults),
    );
}

#[test]
fn criterion_09_polarity_accepts() {
    let mut parts = Vec::new();
    let mut ok = true;
    for q in [2u64, 3, 5, 7, 11] {
        let g = gen::polarity(q).unwrap();
        let free = find_cycle_bruteforce(&g, 4).unwrap().is_none();
        match run_c2k(&g, 2, false) {
            Ok((out, _)) => {
                ok &= free && out.verdict == Verdict::Accept && out.threshold_fired.is_none();
                parts.push(format!("q={q} n={} {:?}", g.n(), out.verdict));
            }
            Err(f) => {
                ok = false;
                parts.push(format!("q={q} fault {f}"));
            }
        }
    }
    line(9, "polarity graphs accept", ok, parts.join(", "));
}

#[test]
fn criterion_10_cut_keeps_half() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut bad = 0;
    let mut least = f64::INFINITY;
    for s in 0..1000 {
        let n = rng.gen_range(2..=60);
        let g = gen::random(n, rng.gen_range(0..=n * (n - 1) / 2), 1000 + s).unwrap();
        let edges: Vec<_> = g.edges().collect();
        let crossing = max_cut_bipartition(&edges).crossing.len();
        if 2 * crossing < edges.len() {
            bad += 1;
        }
        if !edges.is_empty() {
            least = least.min(crossing as f64 / edges.len() as f64);
        }
    }
    line(10, "max-cut keeps half", bad == 0, format!("1000 graphs, {bad} violations, least crossing fraction {least:.3}"));
}
