//! Synthetic graph generators for tests, examples and benchmarks.

use rand::Rng;

use super::{DirectedGraph, NodeId};
use crate::rng::stream_rng;

/// G(n, p) digraph without self-loops.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> DirectedGraph {
    let mut rng = stream_rng(seed, 0);
    let mut edges = Vec::new();
    for a in 0..n as NodeId {
        for b in 0..n as NodeId {
            if a != b && rng.random::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    DirectedGraph::from_edges(n, edges).expect("generated ids are in range")
}

/// G(n, p) plus the cycle `0 -> 1 -> ... -> n-1 -> 0`, which makes the graph
/// strongly connected with every in-degree at least one.
pub fn strongly_connected(n: usize, p: f64, seed: u64) -> DirectedGraph {
    let base = erdos_renyi(n, p, seed);
    let cycle = (0..n as NodeId).map(|v| (v, ((v as usize + 1) % n) as NodeId));
    DirectedGraph::from_edges(n, base.edges().chain(cycle).collect::<Vec<_>>())
        .expect("generated ids are in range")
}

/// Preferential attachment: each new node links to `per_node` earlier nodes
/// chosen proportionally to their current degree. Each edge gets a random
/// orientation, so both in- and out-degrees are heavy tailed.
pub fn preferential_attachment(n: usize, per_node: usize, seed: u64) -> DirectedGraph {
    assert!(n > per_node && per_node > 0);
    let mut rng = stream_rng(seed, 0);
    // Each endpoint occurrence is one entry, so uniform picks are degree-weighted.
    let mut endpoints: Vec<NodeId> = (0..=per_node as NodeId).collect();
    let mut edges = Vec::with_capacity(n * per_node);
    for a in 0..=per_node as NodeId {
        for b in 0..a {
            edges.push((a, b));
        }
    }
    for v in (per_node + 1) as NodeId..n as NodeId {
        for _ in 0..per_node {
            let w = endpoints[rng.random_range(0..endpoints.len())];
            if rng.random::<bool>() {
                edges.push((v, w));
            } else {
                edges.push((w, v));
            }
            endpoints.push(w);
            endpoints.push(v);
        }
    }
    DirectedGraph::from_edges(n, edges).expect("generated ids are in range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strongly_connected_has_no_sources() {
        let g = strongly_connected(30, 0.05, 3);
        assert!(g.nodes().all(|v| g.in_degree(v) > 0));
        assert_eq!(g, strongly_connected(30, 0.05, 3));
    }

    #[test]
    fn preferential_attachment_size() {
        let g = preferential_attachment(2_000, 4, 1);
        assert_eq!(g.node_count(), 2_000);
        assert!(g.edge_count() > 7_000);
        let max_in = g.nodes().map(|v| g.in_degree(v)).max().unwrap();
        assert!(max_in > 40, "expected a hub, max in-degree {max_in}");
    }
}
