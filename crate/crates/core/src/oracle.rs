//! Ground-truth SimRank for testing and evaluation.
//!
//! [`exact_simrank`] iterates the recursive definition from the identity
//! matrix; [`mc_pair`] estimates one entry as the probability that two
//! √c-walks ever stand on the same node after the same number of steps.

use std::collections::VecDeque;
use std::io::{self, Write};

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::engine::SimRankVector;
use crate::graph::{DirectedGraph, GraphError, NodeId};
use crate::rng::{mix_seed, stream_rng};

pub const DEFAULT_EXACT_CAP: usize = 2000;
pub const DEFAULT_ITERATIONS: usize = 40;

/// Walk pairs sampled per random stream in [`mc_pair`].
const MC_BATCH: u64 = 1 << 16;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("exact SimRank needs n^2 memory; n = {n} exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("decay factor must lie strictly between 0 and 1, got {0}")]
    BadDecay(f64),
    #[error("iteration count must be at least 1")]
    NoIterations,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Symmetric `n × n` SimRank matrix after a fixed number of iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSimRankMatrix {
    n: usize,
    c: f64,
    iterations: usize,
    values: Vec<f64>,
}

impl ExactSimRankMatrix {
    pub fn get(&self, a: NodeId, b: NodeId) -> f64 {
        self.values[a as usize * self.n + b as usize]
    }

    pub fn row(&self, a: NodeId) -> &[f64] {
        let a = a as usize;
        &self.values[a * self.n..(a + 1) * self.n]
    }

    pub fn row_vector(&self, a: NodeId) -> SimRankVector {
        SimRankVector::new(a, self.row(a).to_vec())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn decay(&self) -> f64 {
        self.c
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|a| (0..a).all(|b| self.values[a * self.n + b] == self.values[b * self.n + a]))
    }

    /// Writes `u,v,s` rows for the given sources (all nodes if `None`),
    /// skipping zero entries.
    pub fn write_csv<W: Write>(&self, mut w: W, sources: Option<&[NodeId]>) -> io::Result<()> {
        writeln!(w, "u,v,s")?;
        let all: Vec<NodeId> = (0..self.n as NodeId).collect();
        for &u in sources.unwrap_or(&all) {
            write_vector_rows(&mut w, &self.row_vector(u))?;
        }
        Ok(())
    }
}

/// Writes the nonzero entries of `s` as `u,v,s` rows with 12 significant digits.
pub fn write_vector_rows<W: Write + ?Sized>(w: &mut W, s: &SimRankVector) -> io::Result<()> {
    for (v, x) in s.nonzero() {
        writeln!(w, "{},{},{}", s.query(), v, format_significant(x, 12))?;
    }
    Ok(())
}

/// Formats `x` with `digits` significant digits, `%g` style.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, x))
    }
}

/// Iterates `S_{k+1}(a, b) = c / (d_I(a) d_I(b)) · Σ_{a' ∈ I(a)} Σ_{b' ∈ I(b)} S_k(a', b')`
/// from `S_0 = I`, keeping the diagonal at 1 and rows of nodes without
/// in-neighbors at 0. Refuses graphs with more than [`DEFAULT_EXACT_CAP`] nodes.
pub fn exact_simrank(
    g: &DirectedGraph,
    c: f64,
    iterations: usize,
) -> Result<ExactSimRankMatrix, OracleError> {
    exact_simrank_capped(g, c, iterations, DEFAULT_EXACT_CAP)
}

pub fn exact_simrank_capped(
    g: &DirectedGraph,
    c: f64,
    iterations: usize,
    cap: usize,
) -> Result<ExactSimRankMatrix, OracleError> {
    let n = g.node_count();
    if n > cap {
        return Err(OracleError::TooLarge { n, cap });
    }
    if !(c > 0.0 && c < 1.0) {
        return Err(OracleError::BadDecay(c));
    }
    if iterations == 0 {
        return Err(OracleError::NoIterations);
    }

    let mut s = vec![0.0f64; n * n];
    for v in 0..n {
        s[v * n + v] = 1.0;
    }
    // partial[x][b] = Σ_{b' ∈ I(b)} S(x, b')
    let mut partial = vec![0.0f64; n * n];
    let mut next = vec![0.0f64; n * n];
    for _ in 0..iterations {
        partial.par_chunks_mut(n.max(1)).enumerate().for_each(|(x, out)| {
            let srow = &s[x * n..(x + 1) * n];
            for (b, slot) in out.iter_mut().enumerate() {
                *slot = g.in_neighbors(b as NodeId).iter().map(|&bp| srow[bp as usize]).sum();
            }
        });
        next.par_chunks_mut(n.max(1)).enumerate().for_each(|(a, out)| {
            let ins_a = g.in_neighbors(a as NodeId);
            for (b, slot) in out.iter_mut().enumerate().skip(a + 1) {
                let ins_b = g.in_neighbors(b as NodeId);
                *slot = if ins_a.is_empty() || ins_b.is_empty() {
                    0.0
                } else {
                    let sum: f64 = ins_a.iter().map(|&ap| partial[ap as usize * n + b]).sum();
                    c * sum / (ins_a.len() as f64 * ins_b.len() as f64)
                };
            }
            out[a] = 1.0;
        });
        for a in 0..n {
            for b in 0..a {
                next[a * n + b] = next[b * n + a];
            }
        }
        std::mem::swap(&mut s, &mut next);
    }
    Ok(ExactSimRankMatrix {
        n,
        c,
        iterations,
        values: s,
    })
}

/// Monte-Carlo estimate of one SimRank entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEstimate {
    pub value: f64,
    pub n_samples: u64,
}

impl PairEstimate {
    /// Hoeffding radius holding with probability at least `1 − delta`.
    pub fn radius(&self, delta: f64) -> f64 {
        ((2.0 / delta).ln() / (2.0 * self.n_samples as f64)).sqrt()
    }
}

/// Fraction of `n_samples` independent √c-walk pairs from `u` and `v` that
/// stand on the same node after the same number of steps.
///
/// Samples are drawn in fixed-size batches, each from its own stream of
/// `seed`, so the estimate does not depend on the thread count.
pub fn mc_pair(
    g: &DirectedGraph,
    u: NodeId,
    v: NodeId,
    c: f64,
    n_samples: u64,
    seed: u64,
) -> Result<PairEstimate, OracleError> {
    g.check_node(u)?;
    g.check_node(v)?;
    if !(c > 0.0 && c < 1.0) {
        return Err(OracleError::BadDecay(c));
    }
    if u == v {
        return Ok(PairEstimate {
            value: 1.0,
            n_samples,
        });
    }
    let batches = n_samples.div_ceil(MC_BATCH);
    let meets: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = stream_rng(seed, b);
            let size = MC_BATCH.min(n_samples - b * MC_BATCH);
            (0..size)
                .filter(|_| walks_meet(g, u, v, c, &mut rng))
                .count() as u64
        })
        .sum();
    Ok(PairEstimate {
        value: meets as f64 / n_samples.max(1) as f64,
        n_samples,
    })
}

/// Two walks meet only while both are alive; each survives a step with
/// probability √c, so the pair survives with probability `c`.
fn walks_meet<R: Rng + ?Sized>(g: &DirectedGraph, mut a: NodeId, mut b: NodeId, c: f64, rng: &mut R) -> bool {
    loop {
        if rng.random::<f64>() >= c {
            return false;
        }
        let (ia, ib) = (g.in_neighbors(a), g.in_neighbors(b));
        if ia.is_empty() || ib.is_empty() {
            return false;
        }
        a = ia[rng.random_range(0..ia.len())];
        b = ib[rng.random_range(0..ib.len())];
        if a == b {
            return true;
        }
    }
}

/// Nodes that can have nonzero SimRank with `u`: everything reachable along
/// out-edges from some ancestor of `u`.
pub fn similarity_candidates(g: &DirectedGraph, u: NodeId) -> Vec<NodeId> {
    let n = g.node_count();
    let bfs = |starts: Vec<NodeId>, forward: bool| {
        let mut seen = vec![false; n];
        let mut queue: VecDeque<NodeId> = starts.into_iter().collect();
        for &s in &queue {
            seen[s as usize] = true;
        }
        while let Some(x) = queue.pop_front() {
            let nbrs = if forward { g.out_neighbors(x) } else { g.in_neighbors(x) };
            for &y in nbrs {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    queue.push_back(y);
                }
            }
        }
        seen
    };
    let ancestors: Vec<NodeId> = {
        let seen = bfs(g.in_neighbors(u).to_vec(), false);
        (0..n as NodeId).filter(|&x| seen[x as usize]).collect()
    };
    let reach = bfs(ancestors, true);
    (0..n as NodeId)
        .filter(|&x| x != u && reach[x as usize] && g.in_degree(x) > 0)
        .collect()
}

/// Monte-Carlo single-source vector: [`mc_pair`] against every candidate.
pub fn mc_single_source(
    g: &DirectedGraph,
    u: NodeId,
    c: f64,
    n_samples_per_target: u64,
    seed: u64,
) -> Result<SimRankVector, OracleError> {
    g.check_node(u)?;
    let mut scores = vec![0.0; g.node_count()];
    scores[u as usize] = 1.0;
    for v in similarity_candidates(g, u) {
        let est = mc_pair(g, u, v, c, n_samples_per_target, mix_seed(seed, v as u64))?;
        scores[v as usize] = est.value;
    }
    Ok(SimRankVector::new(u, scores))
}
