mod common;

use proptest::prelude::*;

use simpush::engine::{
    all_last_meetings, detect_max_level, first_meetings, hitting_in_source_graph,
    sample_level_counts, single_source, single_source_with, source_push, FirstMeetingScratch,
    QueryParams,
};
use simpush::graph::generate::{erdos_renyi, strongly_connected};
use simpush::graph::load_edge_list;
use simpush::oracle::exact_simrank;
use simpush::rng::stream_rng;

use common::brute_force_first_meetings;

#[test]
fn node_on_two_levels_keeps_separate_state() {
    // u <- {a, b, c}; a <- {d, e}; b <- f; c <- g; d <- h; e <- {h, p};
    // f <- {c, p}; g <- p. Node c sits on level 1 and again on level 3.
    let g = load_edge_list(
        "1 0\n2 0\n3 0\n4 1\n5 1\n6 2\n7 3\n8 4\n8 5\n9 5\n3 6\n9 6\n9 7\n".as_bytes(),
        true,
    )
    .unwrap();
    let params = QueryParams::new(0.6, 0.05, 0.01, 0)
        .unwrap()
        .with_attention_threshold(0.12)
        .unwrap();
    let (sg, att) = source_push(&g, 0, 3, &params);
    let s = params.sqrt_c();
    let h1 = s / 3.0;
    let f2 = s * h1;
    assert!((sg.hit(1, 3) - h1).abs() < 1e-15);
    assert!((sg.hit(3, 3) - s * f2 / 2.0).abs() < 1e-15);
    assert!(att.find(1, 3).is_some());
    assert!(att.find(3, 3).is_none());
    assert_eq!(sg.level(2).len(), 4);
    assert_eq!(sg.level(3).len(), 3);
    for o in att.occurrences() {
        assert!(o.hit >= params.eps_h());
    }
}

#[test]
fn two_paths_meeting_at_one_dangling_node() {
    // u <- a <- b <- w and v <- a' <- b' <- w: walks from u and v can only
    // meet at w after exactly three steps, so s(u, v) = c^3.
    let g = load_edge_list("1 0\n2 1\n6 2\n4 3\n5 4\n6 5\n".as_bytes(), true).unwrap();
    let s = single_source(&g, 0, 0.6, 0.02, 1e-4, 3).unwrap();
    assert!((s.get(3) - 0.6f64.powi(3)).abs() < 1e-12, "{}", s.get(3));
    let exact = exact_simrank(&g, 0.6, 40).unwrap();
    assert!((exact.get(0, 3) - 0.216).abs() < 1e-12);
}

#[test]
fn spec_random_graph_within_eps() {
    let g = erdos_renyi(50, 0.1, 2024);
    let exact = exact_simrank(&g, 0.6, 40).unwrap();
    let params = QueryParams::new(0.6, 0.02, 1e-4, 8).unwrap();
    for u in 0..20u32 {
        let out = single_source_with(&g, u, &params).unwrap();
        assert_eq!(out.scores.get(u), 1.0);
        let gap = (0..50u32)
            .map(|v| exact.get(u, v) - out.scores.get(v))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(gap <= 0.02, "query {u}: {gap}");
        assert!(out.stats.attention_count <= params.attention_bound());
        assert!(out.stats.max_level <= params.max_levels());
    }
}

#[test]
fn identical_inputs_give_identical_vectors() {
    let g = erdos_renyi(300, 0.02, 17);
    let a = single_source(&g, 9, 0.6, 0.01, 1e-4, 99).unwrap();
    let b = single_source(&g, 9, 0.6, 0.01, 1e-4, 99).unwrap();
    assert_eq!(
        a.as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
        b.as_slice().iter().map(|x| x.to_bits()).collect::<Vec<_>>()
    );
}

#[test]
fn concurrent_queries_match_sequential_ones() {
    use rayon::prelude::*;
    let g = erdos_renyi(200, 0.03, 3);
    let params = QueryParams::new(0.6, 0.02, 1e-4, 1).unwrap();
    let seq: Vec<_> = (0..16u32)
        .map(|u| single_source_with(&g, u, &params).unwrap().scores)
        .collect();
    let par: Vec<_> = (0..16u32)
        .into_par_iter()
        .map(|u| single_source_with(&g, u, &params).unwrap().scores)
        .collect();
    assert_eq!(seq, par);
}

fn graph_strategy() -> impl Strategy<Value = (usize, f64, u64)> {
    (5usize..40, 0.03f64..0.35, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn estimates_never_exceed_exact((n, p, seed) in graph_strategy(), eps in prop::sample::select(vec![0.1, 0.05, 0.02])) {
        let g = erdos_renyi(n, p, seed);
        let exact = exact_simrank(&g, 0.6, 40).unwrap();
        let u = (seed % n as u64) as u32;
        let s = single_source(&g, u, 0.6, eps, 1e-4, seed).unwrap();
        prop_assert_eq!(s.get(u), 1.0);
        for v in 0..n as u32 {
            let (t, e) = (exact.get(u, v), s.get(v));
            prop_assert!((0.0..=1.0).contains(&e));
            prop_assert!(e <= t + 1e-7, "v={} est={} exact={}", v, e, t);
            prop_assert!(t - e <= eps, "v={} est={} exact={}", v, e, t);
        }
    }

    #[test]
    fn level_mass_is_conserved((n, p, seed) in graph_strategy()) {
        let g = strongly_connected(n, p, seed);
        let params = QueryParams::new(0.6, 0.05, 1e-4, seed).unwrap();
        let u = (seed % n as u64) as u32;
        let counts = sample_level_counts(&g, u, &params, &mut stream_rng(seed, u as u64));
        let depth = detect_max_level(&counts, &params);
        let (sg, att) = source_push(&g, u, depth, &params);
        for l in 0..=sg.max_level() {
            let mass: f64 = sg.level(l).hits().iter().sum();
            prop_assert!((mass - params.sqrt_c().powi(l as i32)).abs() <= 1e-12);
        }
        prop_assert!(att.len() <= params.attention_bound());
    }

    #[test]
    fn first_meetings_match_enumeration(n in 4usize..10, p in 0.15f64..0.45, seed in any::<u64>(), depth in 1usize..5) {
        let g = erdos_renyi(n, p, seed);
        let params = QueryParams::new(0.6, 0.05, 1e-4, 0).unwrap().with_attention_threshold(0.02).unwrap();
        let u = (seed % n as u64) as u32;
        let (sg, att) = source_push(&g, u, depth, &params);
        prop_assume!(sg.occurrence_count() <= 30);
        let hit = hitting_in_source_graph(&sg, &att);
        let mut scratch = FirstMeetingScratch::new(&att);
        for id in 0..att.len() as u32 {
            let engine = first_meetings(&att, &hit, id, &mut scratch).unwrap();
            let brute = brute_force_first_meetings(&sg, &att, id);
            let total: f64 = engine.iter().map(|&(_, r)| r).sum();
            prop_assert!((total - brute.values().sum::<f64>()).abs() <= 1e-9);
            for &(t, r) in &engine {
                prop_assert!(r >= -1e-9);
                prop_assert!((r - brute.get(&t).copied().unwrap_or(0.0)).abs() <= 1e-9);
            }
        }
        for &gamma in all_last_meetings(&att, &hit).unwrap().as_slice() {
            prop_assert!((0.0..=1.0).contains(&gamma));
        }
    }
}
