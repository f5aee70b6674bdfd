use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::metrics::{avg_error_at_k, precision_at_k, MetricValue};
use super::queries::{gen_queries, read_ids, QuerySet};
use super::HarnessError;
use crate::engine::{single_source_with, QueryParams, QueryStats, SimRankVector};
use crate::graph::{load_graph_file, DirectedGraph, LoadOptions, LoadedGraph, NodeId};
use crate::oracle::{exact_simrank, format_significant, ExactSimRankMatrix};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SIMPUSH_THREADS";

/// Significant digits of floating-point values in the report.
const REPORT_DIGITS: usize = 10;

/// Ground-truth vectors for the query nodes.
#[derive(Debug, Clone)]
pub enum Truth {
    Exact(ExactSimRankMatrix),
    Table(HashMap<NodeId, SimRankVector>),
}

impl Truth {
    pub fn vector(&self, u: NodeId) -> Option<SimRankVector> {
        match self {
            Truth::Exact(m) => Some(m.row_vector(u)),
            Truth::Table(t) => t.get(&u).cloned(),
        }
    }
}

/// Reads `u,v,s` rows (ids as in the graph file) into per-source vectors.
/// A header line is optional.
pub fn read_truth_csv<R: BufRead>(r: R, graph: &LoadedGraph) -> Result<Truth, HarnessError> {
    let n = graph.graph.node_count();
    let mut table: HashMap<NodeId, Vec<f64>> = HashMap::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let t = line.trim();
        if t.is_empty() || (lineno == 1 && t.starts_with(|ch: char| ch.is_alphabetic())) {
            continue;
        }
        let bad = |msg: String| HarnessError::Parse { line: lineno, message: msg };
        let fields: Vec<&str> = t.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(bad(format!("expected 3 fields, found {}", fields.len())));
        }
        let id = |s: &str| -> Result<NodeId, HarnessError> {
            let x: u64 = s.parse().map_err(|_| bad(format!("malformed node id {s:?}")))?;
            Ok(graph.internal(x)?)
        };
        let (u, v) = (id(fields[0])?, id(fields[1])?);
        let s: f64 = fields[2]
            .parse()
            .map_err(|_| bad(format!("malformed score {:?}", fields[2])))?;
        table.entry(u).or_insert_with(|| vec![0.0; n])[v as usize] = s;
    }
    Ok(Truth::Table(
        table
            .into_iter()
            .map(|(u, scores)| (u, SimRankVector::new(u, scores)))
            .collect(),
    ))
}

/// Accuracy and diagnostics of one query.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryRecord {
    /// Position in the query list.
    pub index: usize,
    pub node: NodeId,
    pub avg_error: MetricValue,
    pub precision: MetricValue,
    /// `max_v |ŝ(u, v) − s(u, v)|` over all nodes.
    pub max_abs_error: f64,
    /// `max_v (ŝ(u, v) − s(u, v))`, positive only if the estimate overshoots.
    pub max_overestimate: f64,
    pub stats: QueryStats,
}

/// Results of an evaluation run.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    /// Parameter echo as `(name, value)` in output order.
    pub params: Vec<(String, String)>,
    /// Sorted by query index.
    pub queries: Vec<QueryRecord>,
    /// External ids of the queried nodes, parallel to `queries`.
    pub external_ids: Vec<u64>,
    pub truth_time: Duration,
    pub peak_rss_kb: Option<u64>,
}

impl MetricsReport {
    fn mean(&self, f: impl Fn(&QueryRecord) -> f64) -> f64 {
        if self.queries.is_empty() {
            return 0.0;
        }
        self.queries.iter().map(f).sum::<f64>() / self.queries.len() as f64
    }

    pub fn mean_avg_error(&self) -> f64 {
        self.mean(|q| q.avg_error.value)
    }

    pub fn mean_precision(&self) -> f64 {
        self.mean(|q| q.precision.value)
    }

    pub fn max_abs_error(&self) -> f64 {
        self.queries.iter().map(|q| q.max_abs_error).fold(0.0, f64::max)
    }

    pub fn mean_query_time(&self) -> Duration {
        Duration::from_secs_f64(self.mean(|q| q.stats.timings.total().as_secs_f64()))
    }

    /// Writes the long-form report: header `query,node,metric,value`, then
    /// parameter rows, one row per (query, metric), and the means.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "query,node,metric,value")?;
        for (name, value) in &self.params {
            writeln!(w, "param,,{name},{value}")?;
        }
        let f = |x: f64| format_significant(x, REPORT_DIGITS);
        for (q, ext) in self.queries.iter().zip(&self.external_ids) {
            for (name, value) in query_rows(q) {
                let value = match value {
                    Value::Int(i) => i.to_string(),
                    Value::Float(x) => f(x),
                };
                writeln!(w, "{},{},{},{}", q.index, ext, name, value)?;
            }
        }
        let means: [(&str, f64); 9] = [
            ("avg_error_at_k", self.mean_avg_error()),
            ("precision_at_k", self.mean_precision()),
            ("max_abs_error", self.mean(|q| q.max_abs_error)),
            ("max_level", self.mean(|q| q.stats.max_level as f64)),
            ("attention_count", self.mean(|q| q.stats.attention_count as f64)),
            ("time_sampling", self.mean(|q| q.stats.timings.sampling.as_secs_f64())),
            ("time_source_push", self.mean(|q| q.stats.timings.source_push.as_secs_f64())),
            ("time_gamma", self.mean(|q| q.stats.timings.gamma.as_secs_f64())),
            ("time_reverse_push", self.mean(|q| q.stats.timings.reverse_push.as_secs_f64())),
        ];
        for (name, value) in means {
            writeln!(w, "mean,,{name},{}", f(value))?;
        }
        writeln!(w, "mean,,time_total,{}", f(self.mean_query_time().as_secs_f64()))?;
        writeln!(w, "process,,time_truth,{}", f(self.truth_time.as_secs_f64()))?;
        if let Some(kb) = self.peak_rss_kb {
            writeln!(w, "process,,peak_rss_kb,{kb}")?;
        }
        Ok(())
    }
}

enum Value {
    Int(u64),
    Float(f64),
}

fn query_rows(q: &QueryRecord) -> Vec<(&'static str, Value)> {
    let t = &q.stats.timings;
    vec![
        ("avg_error_at_k", Value::Float(q.avg_error.value)),
        ("precision_at_k", Value::Float(q.precision.value)),
        ("k_effective", Value::Int(q.avg_error.k_effective as u64)),
        ("truncated", Value::Int(q.avg_error.truncated as u64)),
        ("max_abs_error", Value::Float(q.max_abs_error)),
        ("max_overestimate", Value::Float(q.max_overestimate)),
        ("max_level", Value::Int(q.stats.max_level as u64)),
        ("attention_count", Value::Int(q.stats.attention_count as u64)),
        ("source_graph_occurrences", Value::Int(q.stats.source_graph_occurrences as u64)),
        ("hit_entries", Value::Int(q.stats.hit_entries as u64)),
        ("time_sampling", Value::Float(t.sampling.as_secs_f64())),
        ("time_source_push", Value::Float(t.source_push.as_secs_f64())),
        ("time_gamma", Value::Float(t.gamma.as_secs_f64())),
        ("time_reverse_push", Value::Float(t.reverse_push.as_secs_f64())),
        ("time_total", Value::Float(t.total().as_secs_f64())),
    ]
}

/// Whether a report metric depends on wall-clock or machine state.
pub fn is_timing_metric(name: &str) -> bool {
    name.starts_with("time_") || name == "peak_rss_kb"
}

/// Drops the timing rows of a report, leaving the deterministic part.
pub fn strip_timing_rows(csv: &str) -> String {
    csv.lines()
        .filter(|line| {
            let metric = line.split(',').nth(2).unwrap_or("");
            !is_timing_metric(metric)
        })
        .map(|line| format!("{line}\n"))
        .collect()
}

/// Peak resident set size of this process in kB, where the platform reports it.
pub fn peak_rss_kb() -> Option<u64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    status
        .lines()
        .find_map(|l| l.strip_prefix("VmHWM:"))
        .and_then(|rest| rest.split_whitespace().next()?.parse().ok())
}

/// Worker pool honoring [`THREADS_ENV`].
pub fn thread_pool() -> Result<rayon::ThreadPool, HarnessError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let threads: usize = v
            .trim()
            .parse()
            .map_err(|_| HarnessError::Config(format!("{THREADS_ENV}={v:?} is not a thread count")))?;
        builder = builder.num_threads(threads);
    }
    builder
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))
}

/// Runs every query and scores it against `truth`. Records come back in
/// query order regardless of scheduling.
pub fn evaluate(
    g: &DirectedGraph,
    queries: &[NodeId],
    params: &QueryParams,
    k: usize,
    truth: &Truth,
) -> Result<Vec<QueryRecord>, HarnessError> {
    let mut records = queries
        .par_iter()
        .enumerate()
        .map(|(index, &u)| {
            let t = truth.vector(u).ok_or(HarnessError::MissingTruth(u))?;
            let outcome = single_source_with(g, u, params)?;
            let est = &outcome.scores;
            let (mut max_abs, mut max_over) = (0.0f64, f64::NEG_INFINITY);
            for (&a, &b) in est.as_slice().iter().zip(t.as_slice()) {
                max_abs = max_abs.max((a - b).abs());
                max_over = max_over.max(a - b);
            }
            Ok(QueryRecord {
                index,
                node: u,
                avg_error: avg_error_at_k(&t, est, k),
                precision: precision_at_k(&t, est, k),
                max_abs_error: max_abs,
                max_overestimate: max_over,
                stats: outcome.stats,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    records.sort_by_key(|r| r.index);
    Ok(records)
}

/// Where query nodes come from.
#[derive(Debug, Clone)]
pub enum QuerySource {
    /// One id per line, as written in the graph file.
    File(PathBuf),
    /// Uniform draw of this many nodes with the run seed.
    Generate(usize),
}

/// Where ground truth comes from.
#[derive(Debug, Clone)]
pub enum TruthSource {
    /// `u,v,s` CSV as written by the oracle command.
    Csv(PathBuf),
    /// Exact iterative SimRank with this many iterations.
    Exact { iterations: usize },
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    pub graph: PathBuf,
    pub load: LoadOptions,
    pub queries: QuerySource,
    pub c: f64,
    pub eps: f64,
    pub delta: f64,
    pub seed: u64,
    pub k: usize,
    pub truth: TruthSource,
    /// Report destination; nothing is written when `None`.
    pub out: Option<PathBuf>,
}

/// Loads the graph, queries and truth, evaluates, and writes the report.
pub fn run_eval(cfg: &EvalConfig) -> Result<MetricsReport, HarnessError> {
    if cfg.k == 0 {
        return Err(HarnessError::Config("k must be at least 1".into()));
    }
    let loaded = load_graph_file(&cfg.graph, cfg.load)?;
    let g = &loaded.graph;
    let params = QueryParams::new(cfg.c, cfg.eps, cfg.delta, cfg.seed)?;

    let (queries, query_desc) = match &cfg.queries {
        QuerySource::File(path) => {
            let ids = read_ids(BufReader::new(File::open(path)?))
                .map_err(|(line, message)| HarnessError::Parse { line, message })?;
            let nodes = ids
                .into_iter()
                .map(|x| loaded.internal(x))
                .collect::<Result<Vec<_>, _>>()?;
            (nodes, path.display().to_string())
        }
        QuerySource::Generate(count) => {
            if *count == 0 {
                return Err(HarnessError::Config("query count must be at least 1".into()));
            }
            let QuerySet { nodes, .. } = gen_queries(g.node_count(), *count, cfg.seed);
            (nodes, format!("generated:{count}"))
        }
    };

    let t = Instant::now();
    let (truth, truth_desc) = match &cfg.truth {
        TruthSource::Csv(path) => (
            read_truth_csv(BufReader::new(File::open(path)?), &loaded)?,
            path.display().to_string(),
        ),
        TruthSource::Exact { iterations } => (
            Truth::Exact(exact_simrank(g, cfg.c, *iterations)?),
            format!("exact:{iterations}"),
        ),
    };
    let truth_time = t.elapsed();

    let pool = thread_pool()?;
    let records = pool.install(|| evaluate(g, &queries, &params, cfg.k, &truth))?;

    let f = |x: f64| format_significant(x, REPORT_DIGITS);
    let params_echo: Vec<(String, String)> = [
        ("graph", cfg.graph.display().to_string()),
        ("undirected", (cfg.load.undirected as u8).to_string()),
        ("densify", (cfg.load.densify as u8).to_string()),
        ("nodes", g.node_count().to_string()),
        ("edges", g.edge_count().to_string()),
        ("c", f(params.c())),
        ("eps", f(params.eps())),
        ("delta", f(params.delta())),
        ("seed", params.seed().to_string()),
        ("k", cfg.k.to_string()),
        ("eps_h", f(params.eps_h())),
        ("max_levels", params.max_levels().to_string()),
        ("n_walks", params.n_walks().to_string()),
        ("queries", query_desc),
        ("query_count", queries.len().to_string()),
        ("truth", truth_desc),
        ("threads", pool.current_num_threads().to_string()),
    ]
    .into_iter()
    .map(|(a, b)| (a.to_string(), b))
    .collect();

    let report = MetricsReport {
        params: params_echo,
        external_ids: records.iter().map(|r| loaded.external(r.node)).collect(),
        queries: records,
        truth_time,
        peak_rss_kb: peak_rss_kb(),
    };
    if let Some(out) = &cfg.out {
        write_report(&report, out)?;
    }
    Ok(report)
}

pub fn write_report(report: &MetricsReport, path: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    report.write_csv(&mut w)?;
    w.flush()
}
