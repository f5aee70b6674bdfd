//! Single-source SimRank queries.
//!
//! A query runs in three stages:
//!
//! 1. **Source push.** Sample √c-walks from the query node `u` to choose the
//!    depth `L`, then push hitting probabilities `h^(l)(u, ·)` through
//!    in-edges for `L` levels. The traversed part of the graph is kept as the
//!    leveled *source graph*, and the occurrences with `h^(l)(u, w) >= eps_h`
//!    become *attention* occurrences.
//! 2. **Last-meeting correction.** Inside the source graph, compute for each
//!    attention occurrence the probability `γ^(l)(w)` that two walks from it
//!    never meet again at a deeper attention occurrence, and form the residue
//!    `r^(l)(w) = h^(l)(u, w) · γ^(l)(w)`.
//! 3. **Reverse push.** Spread each residue over `l` out-edge steps of the
//!    whole graph. What arrives at `v` after the last step is the estimate of
//!    `s(u, v)`.
//!
//! Estimates never exceed the exact value (up to rounding), and with
//! probability at least `1 − δ` they are within `ε` of it.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{DirectedGraph, GraphError, NodeId};
use crate::rng::stream_rng;

mod accum;
pub mod hitting;
pub mod last_meeting;
pub mod params;
pub mod reverse_push;
pub mod source_push;
pub mod walks;

pub use hitting::{hitting_in_source_graph, HitTable};
pub use last_meeting::{
    all_last_meetings, compute_residues, first_meetings, last_meeting, ConsistencyError,
    FirstMeetingScratch, GammaTable,
};
pub use params::{derive_params, ParamError, QueryParams};
pub use reverse_push::reverse_push;
pub use source_push::{
    source_push, AttentionId, AttentionOccurrence, AttentionSets, Level, SourceGraph,
};
pub use walks::{detect_max_level, sample_level_counts, simulate_walks, WalkLevelCounts};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("internal consistency check failed: {0}")]
    Consistency(#[from] ConsistencyError),
}

/// Estimated similarities of every node to the query node.
#[derive(Debug, Clone, PartialEq)]
pub struct SimRankVector {
    query: NodeId,
    scores: Vec<f64>,
}

impl SimRankVector {
    pub fn new(query: NodeId, scores: Vec<f64>) -> Self {
        SimRankVector { query, scores }
    }

    /// Vector with `1` at the query node and zeros elsewhere.
    pub fn trivial(query: NodeId, n: usize) -> Self {
        let mut scores = vec![0.0; n];
        scores[query as usize] = 1.0;
        SimRankVector { query, scores }
    }

    pub fn query(&self) -> NodeId {
        self.query
    }

    pub fn get(&self, v: NodeId) -> f64 {
        self.scores[v as usize]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// `(node, score)` pairs with a nonzero score, by node id.
    pub fn nonzero(&self) -> impl Iterator<Item = (NodeId, f64)> + '_ {
        self.scores
            .iter()
            .enumerate()
            .filter(|(_, &s)| s != 0.0)
            .map(|(v, &s)| (v as NodeId, s))
    }

    /// The `k` highest-scoring nodes other than the query, ties broken by
    /// ascending node id.
    pub fn top_k(&self, k: usize) -> Vec<NodeId> {
        top_k_excluding(&self.scores, self.query, k)
    }
}

pub(crate) fn top_k_excluding(scores: &[f64], exclude: NodeId, k: usize) -> Vec<NodeId> {
    let mut ids: Vec<NodeId> = (0..scores.len() as NodeId).filter(|&v| v != exclude).collect();
    let cmp = |a: &NodeId, b: &NodeId| {
        scores[*b as usize]
            .total_cmp(&scores[*a as usize])
            .then(a.cmp(b))
    };
    if k < ids.len() {
        ids.select_nth_unstable_by(k, cmp);
        ids.truncate(k);
    }
    ids.sort_unstable_by(cmp);
    ids
}

/// Wall-clock time per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimings {
    pub sampling: Duration,
    pub source_push: Duration,
    pub gamma: Duration,
    pub reverse_push: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.sampling + self.source_push + self.gamma + self.reverse_push
    }
}

/// Diagnostics recorded alongside a query answer.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QueryStats {
    /// Depth chosen from the sampled walks.
    pub max_level: usize,
    pub source_graph_occurrences: usize,
    pub attention_count: usize,
    pub hit_entries: usize,
    pub timings: StageTimings,
}

#[derive(Debug, Clone)]
pub struct QueryOutcome {
    pub scores: SimRankVector,
    pub stats: QueryStats,
}

/// Runs a single-source query with parameters derived from `(c, eps, delta)`.
pub fn single_source(
    g: &DirectedGraph,
    u: NodeId,
    c: f64,
    eps: f64,
    delta: f64,
    seed: u64,
) -> Result<SimRankVector, EngineError> {
    let params = derive_params(c, eps, delta, seed)?;
    Ok(single_source_with(g, u, &params)?.scores)
}

/// Runs a query and returns the per-stage statistics as well.
///
/// The random stream is `(params.seed(), u)`, so the answer for `u` does not
/// depend on which other queries run alongside it.
pub fn single_source_with(
    g: &DirectedGraph,
    u: NodeId,
    params: &QueryParams,
) -> Result<QueryOutcome, EngineError> {
    g.check_node(u)?;
    let mut stats = QueryStats::default();
    let mut rng = stream_rng(params.seed(), u as u64);

    let t = Instant::now();
    let counts = sample_level_counts(g, u, params, &mut rng);
    let max_level = detect_max_level(&counts, params);
    stats.timings.sampling = t.elapsed();
    stats.max_level = max_level;
    if max_level == 0 {
        return Ok(QueryOutcome {
            scores: SimRankVector::trivial(u, g.node_count()),
            stats,
        });
    }

    let t = Instant::now();
    let (sg, mut att) = source_push(g, u, max_level, params);
    stats.timings.source_push = t.elapsed();
    stats.max_level = sg.max_level();
    stats.source_graph_occurrences = sg.occurrence_count();
    stats.attention_count = att.len();

    let t = Instant::now();
    let hit = hitting_in_source_graph(&sg, &att);
    let gammas = all_last_meetings(&att, &hit)?;
    compute_residues(&mut att, &gammas);
    stats.hit_entries = hit.entry_count();
    stats.timings.gamma = t.elapsed();

    let t = Instant::now();
    let scores = reverse_push(g, &att, params, u);
    stats.timings.reverse_push = t.elapsed();

    Ok(QueryOutcome { scores, stats })
}
