//! Reverse push of attention residues along out-edges of `G`.

use super::accum::LevelAccumulator;
use super::params::QueryParams;
use super::source_push::AttentionSets;
use super::SimRankVector;
use crate::graph::{DirectedGraph, NodeId};

/// Spreads every residue `r^(l)(w)` over `l` out-edge steps of `G`.
///
/// Levels are swept from deepest to 1. A node whose accumulated residue
/// satisfies `√c · r >= eps_h` sends `√c · r / d_I(v)` to each out-neighbor
/// `v`: into level `l − 1`, or into the score of `v` when `l = 1`. Residues
/// that reach the same `(level, node)` are combined before that level is
/// swept. Residues below the gate are dropped.
///
/// # Panics
///
/// If residues have not been computed on `att`.
pub fn reverse_push(
    g: &DirectedGraph,
    att: &AttentionSets,
    params: &QueryParams,
    u: NodeId,
) -> SimRankVector {
    let n = g.node_count();
    let residues = att
        .residues()
        .expect("residues must be computed before the reverse push");
    let sqrt_c = params.sqrt_c();
    let eps_h = params.eps_h();
    let max_level = att.max_level();

    let mut scores = vec![0.0f64; n];
    let mut pending: Vec<LevelAccumulator> =
        (0..=max_level).map(|_| LevelAccumulator::new(n)).collect();
    for (o, &r) in att.occurrences().iter().zip(residues) {
        pending[o.level as usize].add(o.node, r);
    }

    for l in (1..=max_level).rev() {
        let level = std::mem::replace(&mut pending[l], LevelAccumulator::new(0));
        for (&v_src, &r) in level.nodes().iter().zip(level.values()) {
            let mass = sqrt_c * r;
            if mass < eps_h {
                continue;
            }
            for &v in g.out_neighbors(v_src) {
                let share = mass / g.in_degree(v) as f64;
                if l > 1 {
                    pending[l - 1].add(v, share);
                } else {
                    scores[v as usize] += share;
                }
            }
        }
    }

    for s in &mut scores {
        *s = s.clamp(0.0, 1.0);
    }
    scores[u as usize] = 1.0;
    SimRankVector::new(u, scores)
}
