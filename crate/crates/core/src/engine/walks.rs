//! √c-walk sampling from the query node and detection of the source-graph depth.
//!
//! A √c-walk stops with probability `1 - √c` at every step and otherwise moves
//! to a uniformly random in-neighbor; it also stops at a node without
//! in-neighbors.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rustc_hash::FxHashMap;

use super::params::QueryParams;
use crate::graph::{DirectedGraph, NodeId};

/// Visit counts `H^(l)(u, v)`: how many of the sampled walks sit on `v` after
/// exactly `l` steps. Step 0 holds every walk at the query node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkLevelCounts {
    n_walks: u64,
    steps: Vec<Vec<(NodeId, u64)>>,
}

impl WalkLevelCounts {
    /// Builds counts from explicit per-step `(node, count)` lists.
    pub fn from_steps(n_walks: u64, mut steps: Vec<Vec<(NodeId, u64)>>) -> Self {
        for step in &mut steps {
            step.retain(|&(_, k)| k > 0);
            step.sort_unstable();
        }
        while steps.last().is_some_and(|s| s.is_empty()) {
            steps.pop();
        }
        WalkLevelCounts { n_walks, steps }
    }

    pub fn n_walks(&self) -> u64 {
        self.n_walks
    }

    /// Number of recorded steps, including step 0.
    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    /// Nonzero counts at `step`, sorted by node.
    pub fn step(&self, step: usize) -> &[(NodeId, u64)] {
        self.steps.get(step).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, step: usize, v: NodeId) -> u64 {
        let s = self.step(step);
        s.binary_search_by_key(&v, |&(w, _)| w)
            .map_or(0, |i| s[i].1)
    }

    /// Total number of walks still alive after `step` steps.
    pub fn total(&self, step: usize) -> u64 {
        self.step(step).iter().map(|&(_, k)| k).sum()
    }
}

/// Samples `params.n_walks()` √c-walks from `u` and records their visits up
/// to step `params.max_levels()`.
///
/// Walks are simulated in aggregate: the walkers sharing a node are split into
/// survivors with a binomial draw and the survivors are spread over the
/// in-neighbors uniformly. The resulting counts have exactly the joint law of
/// independently simulated walks, at a cost proportional to the number of
/// distinct `(step, node)` states instead of the number of walk steps.
pub fn sample_level_counts<R: Rng + ?Sized>(
    g: &DirectedGraph,
    u: NodeId,
    params: &QueryParams,
    rng: &mut R,
) -> WalkLevelCounts {
    let n_walks = params.n_walks();
    let sqrt_c = params.sqrt_c();
    let mut steps = vec![vec![(u, n_walks)]];
    let mut next: FxHashMap<NodeId, u64> = FxHashMap::default();

    while steps.len() <= params.max_levels() {
        let current = steps.last().expect("step 0 is always present");
        for &(v, walkers) in current {
            let nbrs = g.in_neighbors(v);
            if nbrs.is_empty() {
                continue;
            }
            let alive = Binomial::new(walkers, sqrt_c)
                .expect("sqrt_c is a probability")
                .sample(rng);
            scatter_uniform(alive, nbrs, &mut next, rng);
        }
        if next.is_empty() {
            break;
        }
        let mut level: Vec<(NodeId, u64)> = next.drain().collect();
        level.sort_unstable();
        steps.push(level);
    }
    WalkLevelCounts { n_walks, steps }
}

/// Distributes `walkers` uniformly at random over `nbrs`.
fn scatter_uniform<R: Rng + ?Sized>(
    walkers: u64,
    nbrs: &[NodeId],
    into: &mut FxHashMap<NodeId, u64>,
    rng: &mut R,
) {
    let d = nbrs.len();
    if walkers == 0 {
        return;
    }
    if walkers <= d as u64 {
        for _ in 0..walkers {
            *into.entry(nbrs[rng.random_range(0..d)]).or_insert(0) += 1;
        }
        return;
    }
    // Multinomial via successive conditional binomials.
    let mut remaining = walkers;
    for (i, &w) in nbrs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let take = if i + 1 == d {
            remaining
        } else {
            Binomial::new(remaining, 1.0 / (d - i) as f64)
                .expect("valid probability")
                .sample(rng)
        };
        if take > 0 {
            *into.entry(w).or_insert(0) += take;
            remaining -= take;
        }
    }
}

/// Simulates `n_walks` √c-walks one at a time, recording visits up to
/// `max_step`. Slow; kept as an independent reference for
/// [`sample_level_counts`].
pub fn simulate_walks<R: Rng + ?Sized>(
    g: &DirectedGraph,
    u: NodeId,
    n_walks: u64,
    sqrt_c: f64,
    max_step: usize,
    rng: &mut R,
) -> WalkLevelCounts {
    let mut steps: Vec<FxHashMap<NodeId, u64>> = vec![FxHashMap::default()];
    for _ in 0..n_walks {
        let mut v = u;
        *steps[0].entry(v).or_insert(0) += 1;
        for step in 1..=max_step {
            let nbrs = g.in_neighbors(v);
            if nbrs.is_empty() || rng.random::<f64>() >= sqrt_c {
                break;
            }
            v = nbrs[rng.random_range(0..nbrs.len())];
            if steps.len() <= step {
                steps.push(FxHashMap::default());
            }
            *steps[step].entry(v).or_insert(0) += 1;
        }
    }
    WalkLevelCounts::from_steps(
        n_walks,
        steps.into_iter().map(|m| m.into_iter().collect()).collect(),
    )
}

/// Deepest step `l <= max_levels` at which some node was visited by at least
/// an `eps_h / 2` fraction of the walks; 0 if there is none.
pub fn detect_max_level(counts: &WalkLevelCounts, params: &QueryParams) -> usize {
    let n = counts.n_walks() as f64;
    let gate = params.eps_h() / 2.0;
    let last = counts.num_steps().saturating_sub(1).min(params.max_levels());
    (1..=last)
        .rev()
        .find(|&l| {
            counts
                .step(l)
                .iter()
                .any(|&(_, k)| k as f64 / n >= gate)
        })
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::params::derive_params;
    use crate::graph::load_edge_list;
    use crate::rng::stream_rng;

    fn cycle2() -> DirectedGraph {
        load_edge_list("0 1\n1 0\n".as_bytes(), true).unwrap()
    }

    #[test]
    fn dangling_query_stays_put() {
        let g = load_edge_list("0 1\n".as_bytes(), true).unwrap();
        let p = derive_params(0.6, 0.1, 0.01, 1).unwrap();
        let counts = sample_level_counts(&g, 0, &p, &mut stream_rng(1, 0));
        assert_eq!(counts.num_steps(), 1);
        assert_eq!(counts.count(0, 0), p.n_walks());
        assert_eq!(detect_max_level(&counts, &p), 0);
    }

    #[test]
    fn two_cycle_first_step_frequency() {
        let g = cycle2();
        let p = derive_params(0.6, 0.1, 0.01, 1).unwrap();
        let n = p.n_walks() as f64;
        let counts = sample_level_counts(&g, 0, &p, &mut stream_rng(9, 0));
        let freq = counts.count(1, 1) as f64 / n;
        let sd = (0.6f64.sqrt() * (1.0 - 0.6f64.sqrt()) / n).sqrt();
        assert!((freq - 0.6f64.sqrt()).abs() < 3.0 * sd, "freq {freq}");
        // every walk sits on exactly one node per step
        for l in 0..counts.num_steps() {
            assert!(counts.total(l) <= p.n_walks());
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let g = crate::graph::generate::erdos_renyi(40, 0.1, 5);
        let p = derive_params(0.6, 0.05, 0.01, 3).unwrap();
        let a = sample_level_counts(&g, 2, &p, &mut stream_rng(3, 2));
        let b = sample_level_counts(&g, 2, &p, &mut stream_rng(3, 2));
        assert_eq!(a, b);
    }

    #[test]
    fn aggregate_sampler_matches_per_walk_simulation() {
        // Dense enough that both scatter branches are exercised.
        let g = crate::graph::generate::erdos_renyi(12, 0.35, 8);
        let p = derive_params(0.6, 0.2, 0.05, 0).unwrap();
        let sqrt_c = p.sqrt_c();
        let n_walks = 200_000u64;
        let mut rng = stream_rng(4, 0);
        let per_walk = simulate_walks(&g, 0, n_walks, sqrt_c, 4, &mut rng);
        // scale the aggregate sampler to the same number of walks
        let mut agg_total = vec![FxHashMap::<NodeId, u64>::default(); 5];
        let reps = n_walks / p.n_walks() + 1;
        let mut sampled = 0u64;
        for r in 0..reps {
            let c = sample_level_counts(&g, 0, &p, &mut stream_rng(11, r));
            sampled += c.n_walks();
            for (l, slot) in agg_total.iter_mut().enumerate() {
                for &(v, k) in c.step(l) {
                    *slot.entry(v).or_insert(0) += k;
                }
            }
        }
        for (l, slot) in agg_total.iter().enumerate() {
            for v in g.nodes() {
                let a = slot.get(&v).copied().unwrap_or(0) as f64 / sampled as f64;
                let b = per_walk.count(l, v) as f64 / n_walks as f64;
                let tol = 5.0 * (0.25 / n_walks as f64).sqrt() + 5.0 * (0.25 / sampled as f64).sqrt();
                assert!((a - b).abs() < tol, "step {l} node {v}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn max_level_threshold_is_inclusive() {
        let p = derive_params(0.6, 0.5, 0.5, 0)
            .unwrap()
            .with_attention_threshold(0.25)
            .unwrap();
        // 1 / 8 == 0.25 / 2 exactly
        let counts = WalkLevelCounts::from_steps(
            8,
            vec![vec![(0, 8)], vec![(1, 2)], vec![(2, 1)], vec![(3, 1)], vec![]],
        );
        assert_eq!(detect_max_level(&counts, &p), 3);
        let below = WalkLevelCounts::from_steps(16, vec![vec![(0, 16)], vec![(1, 1)]]);
        assert_eq!(detect_max_level(&below, &p), 0);
    }

    #[test]
    fn max_level_capped() {
        let p = derive_params(0.6, 0.5, 0.5, 0)
            .unwrap()
            .with_attention_threshold(0.5)
            .unwrap();
        assert_eq!(p.max_levels(), 2);
        let counts = WalkLevelCounts::from_steps(1, (0..6).map(|_| vec![(0, 1)]).collect());
        assert_eq!(detect_max_level(&counts, &p), 2);
    }

    #[test]
    fn two_cycle_level_detection() {
        // On the 2-cycle the only node at step l carries mass (√c)^l, so the
        // gate keeps exactly the steps with (√c)^l >= eps_h / 2, well away
        // from the boundary for these parameters.
        let g = cycle2();
        let p = derive_params(0.6, 0.05, 1e-3, 0).unwrap();
        let expected = (1..=p.max_levels())
            .filter(|&l| 0.6f64.sqrt().powi(l as i32) >= p.eps_h() / 2.0)
            .max()
            .unwrap();
        assert_eq!(expected, p.max_levels());
        let counts = sample_level_counts(&g, 0, &p, &mut stream_rng(2, 0));
        assert_eq!(detect_max_level(&counts, &p), expected);
    }
}
