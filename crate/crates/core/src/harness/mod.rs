//! Evaluation pipeline: query generation, accuracy metrics and CSV reports.

use std::io;

use thiserror::Error;

use crate::engine::{EngineError, ParamError};
use crate::graph::{GraphError, NodeId};
use crate::oracle::OracleError;

pub mod eval;
pub mod metrics;
pub mod queries;

pub use eval::{
    evaluate, is_timing_metric, peak_rss_kb, read_truth_csv, run_eval, strip_timing_rows,
    thread_pool, write_report, EvalConfig, MetricsReport, QueryRecord, QuerySource, Truth,
    TruthSource, THREADS_ENV,
};
pub use metrics::{avg_error_at_k, precision_at_k, truth_top_k, MetricValue};
pub use queries::{gen_queries, gen_queries_with, read_ids, write_ids, QuerySet};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no ground truth for query node {0}")]
    MissingTruth(NodeId),
    #[error("{0}")]
    Config(String),
}
