use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use evencycle::density::{density_extract, DensityError};
use evencycle::detect::{run_c2k, run_c4};
use evencycle::graph::{find_cycle_bruteforce, Graph, NodeId};
use evencycle::lab::{self, emit_report, run_sweep, ExperimentSpec, ReportFormat, RowVerdict};

#[derive(Parser)]
#[command(name = "evencycle", version, about = "Even-cycle detection in a simulated broadcast network")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated graph as an edge list.
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(long, default_value_t = 0, global = true)]
        seed: u64,
        /// Output file (stdout when omitted).
        #[arg(short, long, global = true)]
        out: Option<PathBuf>,
    },
    /// Run one detection algorithm on a graph file.
    Run {
        #[arg(long, value_enum, default_value_t = Alg::C2k)]
        alg: Alg,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long)]
        graph: PathBuf,
        /// Print every broadcast word.
        #[arg(long)]
        trace: bool,
    },
    /// Run an experiment described by a JSON spec.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// Overrides the experiment's output path; `.json` selects JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract a 2k-cycle certificate from a local density violation.
    Verify {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        v: NodeId,
        #[arg(long)]
        graph: PathBuf,
    },
    /// Exhaustive search for a cycle of length `twok`.
    Oracle {
        #[arg(long)]
        twok: usize,
        #[arg(long)]
        graph: PathBuf,
    },
}

#[derive(Subcommand)]
enum Family {
    Polarity {
        #[arg(long)]
        q: u64,
    },
    Planted {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        twok: usize,
        #[arg(long, default_value_t = 0)]
        extra: usize,
    },
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
    },
    Tree {
        #[arg(long)]
        n: usize,
    },
    CompleteBipartite {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
    },
    Cycle {
        #[arg(long)]
        n: usize,
    },
    Complete {
        #[arg(long)]
        n: usize,
    },
}

impl From<Family> for lab::Generator {
    fn from(f: Family) -> Self {
        match f {
            Family::Polarity { q } => lab::Generator::Polarity { q },
            Family::Planted { n, twok, extra } => lab::Generator::Planted { n, twok, extra },
            Family::Random { n, m } => lab::Generator::Random { n, m },
            Family::Gnp { n, p } => lab::Generator::Gnp { n, p },
            Family::Tree { n } => lab::Generator::Tree { n },
            Family::CompleteBipartite { a, b } => lab::Generator::CompleteBipartite { a, b },
            Family::Cycle { n } => lab::Generator::Cycle { n },
            Family::Complete { n } => lab::Generator::Complete { n },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Alg {
    C4,
    C2k,
}

/// Exit status plus message.
enum Failure {
    Fault(String),
    BadInput(String),
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::BadInput(e.to_string())
    }
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::BadInput(format!("{}: {e}", path.display())))?;
    Graph::parse_edge_list(&text).map_err(|e| Failure::BadInput(format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::BadInput(format!("{}: {e}", p.display()))),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn real_main(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Gen { family, seed, out } => {
            let g = lab::Generator::from(family).build(seed).map_err(|e| Failure::BadInput(e.to_string()))?;
            write_out(out.as_deref(), &g.to_edge_list())
        }
        Cmd::Run { alg, k, graph, trace } => {
            let g = read_graph(&graph)?;
            let res = match alg {
                Alg::C4 => run_c4(&g, trace).map(|(o, r)| (o, r.trace_lines())),
                Alg::C2k => {
                    if k < 2 {
                        return Err(Failure::BadInput(format!("k must be at least 2, got {k}")));
                    }
                    run_c2k(&g, k, trace).map(|(o, r)| (o, r.trace_lines()))
                }
            };
            let (out, lines) = res.map_err(|f| Failure::Fault(f.to_string()))?;
            for l in lines {
                println!("{l}");
            }
            println!("verdict: {:?}", out.verdict);
            println!("rounds: {} (light {}, heavy {})", out.rounds_used, out.light_rounds, out.heavy_rounds);
            if let Some((v, ell)) = out.threshold_fired {
                println!("threshold: node {v} at iteration {ell}");
            }
            if let Some(w) = out.witness {
                println!("witness: {w}");
            }
            Ok(())
        }
        Cmd::Sweep { spec, out } => {
            let text = fs::read_to_string(&spec).map_err(|e| Failure::BadInput(format!("{}: {e}", spec.display())))?;
            let spec: ExperimentSpec =
                serde_json::from_str(&text).map_err(|e| Failure::BadInput(format!("{}: {e}", spec.display())))?;
            spec.validate().map_err(|e| Failure::BadInput(e.to_string()))?;
            let rows = run_sweep(&spec).map_err(|e| Failure::Fault(e.to_string()))?;
            match out.or(spec.output.clone()) {
                Some(p) => emit_report(&rows, ReportFormat::from_path(&p), &p).map_err(|e| Failure::BadInput(e.to_string()))?,
                None => lab::write_report(&rows, ReportFormat::Csv, io::stdout()).map_err(|e| Failure::Fault(e.to_string()))?,
            }
            let bad = rows.iter().filter(|r| r.mismatch).count();
            let rejects = rows.iter().filter(|r| r.verdict == RowVerdict::Reject).count();
            eprintln!("{} instances, {rejects} rejected, {bad} mismatched or faulted", rows.len());
            if bad > 0 {
                return Err(Failure::Fault(format!("{bad} rows flagged")));
            }
            Ok(())
        }
        Cmd::Verify { k, ell, v, graph } => {
            let g = read_graph(&graph)?;
            match density_extract(&g, k, ell, v) {
                Ok(cert) => {
                    println!("{}", cert.cycle);
                    eprintln!("core level {} at node {}, H from {:?} edges ({} edges)", cert.level, cert.u, cert.source, cert.h_edges);
                    Ok(())
                }
                Err(e @ (DensityError::PreconditionUnmet { .. } | DensityError::InvalidParams(_) | DensityError::Graph(_))) => {
                    Err(Failure::BadInput(e.to_string()))
                }
                Err(e) => Err(Failure::Fault(e.to_string())),
            }
        }
        Cmd::Oracle { twok, graph } => {
            let g = read_graph(&graph)?;
            match find_cycle_bruteforce(&g, twok).map_err(|e| Failure::BadInput(e.to_string()))? {
                Some(c) => println!("{c}"),
                None => println!("none"),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match real_main(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Fault(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::BadInput(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
