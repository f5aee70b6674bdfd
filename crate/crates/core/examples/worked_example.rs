//! The three stages step by step on a seven-node graph small enough to
//! check by hand.

use simpush::engine::{
    all_last_meetings, compute_residues, first_meetings, hitting_in_source_graph, reverse_push,
    source_push, FirstMeetingScratch, QueryParams,
};
use simpush::graph::load_edge_list;

const NAMES: [&str; 8] = ["u", "a", "b", "d", "e", "h", "x", "y"];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // u <- {a, b}, y <- a, a <- {d, e}, b <- e, d <- h, e <- {h, x}
    let g = load_edge_list(
        "1 0\n2 0\n1 7\n3 1\n4 1\n4 2\n5 3\n5 4\n6 4\n".as_bytes(),
        true,
    )?;
    // A threshold of 0.2 keeps the attention sets small enough to read; it is
    // far coarser than the one derived from eps, so the estimates undershoot.
    let params = QueryParams::new(0.6, 0.05, 0.01, 0)?.with_attention_threshold(0.2)?;

    let (sg, mut att) = source_push(&g, 0, 3, &params);
    println!("hitting probabilities from u:");
    for l in 1..=sg.max_level() {
        let level = sg.level(l);
        for (v, h) in level.nodes().iter().zip(level.hits()) {
            let mark = if att.find(l, *v).is_some() { "*" } else { " " };
            println!("  level {l} {}{mark} {h:.4}", NAMES[*v as usize]);
        }
    }

    let hit = hitting_in_source_graph(&sg, &att);
    let a = att.find(1, 1).expect("a is an attention node");
    let mut scratch = FirstMeetingScratch::new(&att);
    println!("first meetings of two walks from a:");
    for (t, rho) in first_meetings(&att, &hit, a, &mut scratch)? {
        let o = att.get(t);
        println!("  {} on level {}: {rho:.4}", NAMES[o.node as usize], o.level);
    }

    let gammas = all_last_meetings(&att, &hit)?;
    compute_residues(&mut att, &gammas);
    let s = reverse_push(&g, &att, &params, 0);
    println!("estimates:");
    for (v, x) in s.nonzero() {
        println!("  s(u, {}) = {x:.4}", NAMES[v as usize]);
    }
    Ok(())
}
