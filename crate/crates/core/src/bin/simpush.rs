use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use simpush::engine::{single_source_with, QueryParams};
use simpush::graph::{load_graph_file, LoadOptions, LoadedGraph, NodeId};
use simpush::harness::{
    gen_queries_with, read_ids, run_eval, thread_pool, write_ids, EvalConfig, HarnessError,
    QuerySource, TruthSource,
};
use simpush::oracle::{exact_simrank, mc_single_source, write_vector_rows, DEFAULT_ITERATIONS};
use simpush::SimRankVector;

#[derive(Parser)]
#[command(name = "simpush", version, about = "Index-free single-source SimRank")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list or binary cache file.
    #[arg(long)]
    graph: PathBuf,
    /// Insert both directions of every edge-list line.
    #[arg(long)]
    undirected: bool,
    /// Renumber the node ids occurring in the edge list to 0..n.
    #[arg(long)]
    densify: bool,
}

impl GraphArgs {
    fn options(&self) -> LoadOptions {
        LoadOptions {
            undirected: self.undirected,
            densify: self.densify,
        }
    }

    fn load(&self) -> Result<LoadedGraph, HarnessError> {
        Ok(load_graph_file(&self.graph, self.options())?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Estimate s(u, v) for every v and write `u,v,s` rows.
    Query {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        node: u64,
        #[arg(long, default_value_t = 0.02)]
        eps: f64,
        #[arg(long, default_value_t = 1e-4)]
        delta: f64,
        #[arg(long, default_value_t = 0.6)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score queries against ground truth and write a metrics report.
    Eval {
        #[command(flatten)]
        graph: GraphArgs,
        /// File with one query id per line.
        #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
        queries: Option<PathBuf>,
        /// Draw this many query nodes uniformly.
        #[arg(long)]
        gen: Option<usize>,
        #[arg(long, default_value_t = 0.02)]
        eps: f64,
        #[arg(long, default_value_t = 1e-4)]
        delta: f64,
        #[arg(long, default_value_t = 0.6)]
        c: f64,
        #[arg(long, default_value_t = 50)]
        k: usize,
        /// Ground truth as `u,v,s` CSV.
        #[arg(long, conflicts_with = "oracle", required_unless_present = "oracle")]
        truth: Option<PathBuf>,
        /// Compute exact ground truth (small graphs only).
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write ground-truth `u,v,s` rows.
    Oracle {
        #[command(flatten)]
        graph: GraphArgs,
        /// Exact iterative SimRank (the default).
        #[arg(long, conflicts_with = "mc")]
        exact: bool,
        #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
        iters: usize,
        /// Monte-Carlo estimates from walk pairs.
        #[arg(long)]
        mc: bool,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Restrict to the sources listed in this file (all nodes otherwise).
        #[arg(long)]
        queries: Option<PathBuf>,
        #[arg(long, default_value_t = 0.6)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw query nodes uniformly at random.
    GenQueries {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Allow repeated nodes even when count <= n.
        #[arg(long)]
        with_replacement: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn output(path: Option<&PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_rows(w: &mut dyn Write, loaded: &LoadedGraph, s: &SimRankVector) -> io::Result<()> {
    if loaded.ids.is_none() {
        return write_vector_rows(w, s);
    }
    let u = loaded.external(s.query());
    for (v, x) in s.nonzero() {
        let x = simpush::oracle::format_significant(x, 12);
        writeln!(w, "{u},{},{x}", loaded.external(v))?;
    }
    Ok(())
}

fn read_sources(path: &PathBuf, loaded: &LoadedGraph) -> Result<Vec<NodeId>, HarnessError> {
    read_ids(BufReader::new(File::open(path)?))
        .map_err(|(line, message)| HarnessError::Parse { line, message })?
        .into_iter()
        .map(|x| Ok(loaded.internal(x)?))
        .collect()
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Query { graph, node, eps, delta, c, seed, out } => {
            let loaded = graph.load()?;
            let u = loaded.internal(node)?;
            let params = QueryParams::new(c, eps, delta, seed)?;
            let outcome = single_source_with(&loaded.graph, u, &params)?;
            let st = outcome.stats;
            eprintln!(
                "levels={} attention={} time={:.3}ms",
                st.max_level,
                st.attention_count,
                st.timings.total().as_secs_f64() * 1e3
            );
            let mut w = output(out.as_ref())?;
            writeln!(w, "u,v,s")?;
            write_rows(&mut w, &loaded, &outcome.scores)?;
            w.flush()?;
        }
        Command::Eval {
            graph, queries, gen, eps, delta, c, k, truth, oracle: _, iters, seed, out,
        } => {
            let cfg = EvalConfig {
                load: graph.options(),
                graph: graph.graph,
                queries: match (queries, gen) {
                    (Some(p), _) => QuerySource::File(p),
                    (None, Some(count)) => QuerySource::Generate(count),
                    (None, None) => unreachable!("clap requires one of --queries/--gen"),
                },
                c,
                eps,
                delta,
                seed,
                k,
                truth: match truth {
                    Some(p) => TruthSource::Csv(p),
                    None => TruthSource::Exact { iterations: iters },
                },
                out: Some(out),
            };
            let report = run_eval(&cfg)?;
            eprintln!(
                "queries={} avg_error@{k}={:.3e} precision@{k}={:.4} mean_time={:.3}ms",
                report.queries.len(),
                report.mean_avg_error(),
                report.mean_precision(),
                report.mean_query_time().as_secs_f64() * 1e3
            );
        }
        Command::Oracle {
            graph, exact: _, iters, mc, samples, queries, c, seed, out,
        } => {
            let loaded = graph.load()?;
            let g = &loaded.graph;
            let sources = match &queries {
                Some(p) => read_sources(p, &loaded)?,
                None => g.nodes().collect(),
            };
            let mut w = output(Some(&out))?;
            writeln!(w, "u,v,s")?;
            if mc {
                let pool = thread_pool()?;
                for &u in &sources {
                    let s = pool.install(|| mc_single_source(g, u, c, samples, seed))?;
                    write_rows(&mut w, &loaded, &s)?;
                }
            } else {
                let m = exact_simrank(g, c, iters)?;
                for &u in &sources {
                    write_rows(&mut w, &loaded, &m.row_vector(u))?;
                }
            }
            w.flush()?;
        }
        Command::GenQueries { graph, count, seed, with_replacement, out } => {
            if count == 0 {
                return Err(HarnessError::Config("count must be at least 1".into()));
            }
            let loaded = graph.load()?;
            let q = gen_queries_with(loaded.graph.node_count(), count, seed, with_replacement);
            let ids = q.nodes.iter().map(|&v| loaded.external(v));
            let mut w = output(Some(&out))?;
            write_ids(&mut w, ids)?;
            w.flush()?;
        }
    }
    Ok(())
}
