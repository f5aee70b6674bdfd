#![allow(dead_code)]

use std::collections::BTreeMap;

use simpush::engine::{AttentionId, AttentionSets, QueryParams, SourceGraph};
use simpush::graph::{load_edge_list, DirectedGraph};

/// Node ids of the worked-example fixture.
pub mod fig3 {
    pub const U: u32 = 0;
    pub const A: u32 = 1;
    pub const B: u32 = 2;
    pub const D: u32 = 3;
    pub const E: u32 = 4;
    pub const H: u32 = 5;
    pub const X: u32 = 6;
}

/// Subgraph where `a` has in-neighbors `d` and `e`, `d` has the single
/// in-neighbor `h`, and `e` has in-neighbors `h` and `x`. A second level-1
/// node `b` also pulls from `e`, so with threshold 0.2 and three levels the
/// attention occurrences are `a`, `b` (level 1), `e` (level 2) and `h`
/// (level 3) while `d` on level 2 is not.
pub fn fig3_graph() -> DirectedGraph {
    load_edge_list(
        "1 0\n2 0\n3 1\n4 1\n4 2\n5 3\n5 4\n6 4\n".as_bytes(),
        true,
    )
    .unwrap()
}

pub fn fig3_params() -> QueryParams {
    QueryParams::new(0.6, 0.05, 0.01, 0)
        .unwrap()
        .with_attention_threshold(0.2)
        .unwrap()
}

/// First-meeting probabilities from attention occurrence `source` by
/// enumerating every pair of walk paths inside the source graph.
pub fn brute_force_first_meetings(
    sg: &SourceGraph,
    att: &AttentionSets,
    source: AttentionId,
) -> BTreeMap<AttentionId, f64> {
    let o = att.get(source);
    let c = sg.sqrt_c() * sg.sqrt_c();
    let mut out = BTreeMap::new();
    let mut stack = vec![(o.level as usize, o.local, o.local, 1.0f64)];
    while let Some((l, x, y, p)) = stack.pop() {
        if l == sg.max_level() {
            continue;
        }
        let level = sg.level(l);
        let (ux, uy) = (level.up_edges(x), level.up_edges(y));
        if ux.is_empty() || uy.is_empty() {
            continue;
        }
        let step = p * c / (ux.len() * uy.len()) as f64;
        for &x2 in ux {
            for &y2 in uy {
                match (x2 == y2).then(|| att.id_of(l + 1, x2)).flatten() {
                    Some(t) => *out.entry(t).or_insert(0.0) += step,
                    None => stack.push((l + 1, x2, y2, step)),
                }
            }
        }
    }
    out
}

/// `(c, eps)` derived parameters with the default failure probability used in tests.
pub fn params(c: f64, eps: f64, seed: u64) -> QueryParams {
    QueryParams::new(c, eps, 1e-4, seed).unwrap()
}
