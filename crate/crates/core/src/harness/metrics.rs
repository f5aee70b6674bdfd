//! Ranking accuracy metrics against a ground-truth vector.
//!
//! `V_k` is the top-`k` of the truth vector among nodes with nonzero truth,
//! excluding the query node. Ties in either ranking go to the smaller node id.

use crate::engine::{top_k_excluding, SimRankVector};
use crate::graph::NodeId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricValue {
    pub value: f64,
    /// Size of `V_k` actually used.
    pub k_effective: usize,
    /// Set when the truth has fewer than `k` nonzero entries besides the query.
    pub truncated: bool,
}

/// Top-`k` of `truth` restricted to its nonzero support.
pub fn truth_top_k(truth: &SimRankVector, k: usize) -> (Vec<NodeId>, bool) {
    let q = truth.query();
    let support = truth.nonzero().filter(|&(v, _)| v != q).count();
    let k_eff = k.min(support);
    (top_k_excluding(truth.as_slice(), q, k_eff), k_eff < k)
}

/// `(1/k) Σ_{v ∈ V_k} |ŝ(u, v) − s(u, v)|`, averaged over the available `V_k`.
pub fn avg_error_at_k(truth: &SimRankVector, est: &SimRankVector, k: usize) -> MetricValue {
    let (top, truncated) = truth_top_k(truth, k);
    let value = if top.is_empty() {
        0.0
    } else {
        top.iter()
            .map(|&v| (est.get(v) - truth.get(v)).abs())
            .sum::<f64>()
            / top.len() as f64
    };
    MetricValue {
        value,
        k_effective: top.len(),
        truncated,
    }
}

/// `|V_k ∩ V'_k| / k` where `V'_k` is the estimate's top-`k`. With an empty
/// `V_k` both sets are empty and the value is 1.
pub fn precision_at_k(truth: &SimRankVector, est: &SimRankVector, k: usize) -> MetricValue {
    let (top, truncated) = truth_top_k(truth, k);
    let value = if top.is_empty() {
        1.0
    } else {
        let mut est_top = est.top_k(top.len());
        est_top.sort_unstable();
        let hits = top.iter().filter(|v| est_top.binary_search(v).is_ok()).count();
        hits as f64 / top.len() as f64
    };
    MetricValue {
        value,
        k_effective: top.len(),
        truncated,
    }
}
