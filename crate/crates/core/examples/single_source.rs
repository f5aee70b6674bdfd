//! Top-10 most similar nodes for one query.
//!
//! ```text
//! cargo run --release --example single_source -- [EDGE_LIST] [NODE]
//! ```
//! Without arguments a random 2 000-node graph is used.

use std::fs::File;
use std::io::BufReader;

use simpush::engine::{single_source_with, QueryParams};
use simpush::graph::{generate, load_edge_list};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let g = match args.first() {
        Some(path) => load_edge_list(BufReader::new(File::open(path)?), true)?,
        None => generate::erdos_renyi(2_000, 0.004, 1),
    };
    let u: u32 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(0);

    let params = QueryParams::new(0.6, 0.01, 1e-4, 42)?;
    let out = single_source_with(&g, u, &params)?;
    let st = out.stats;
    println!(
        "n={} m={} query={u}: depth {}, {} attention nodes, {:.2} ms",
        g.node_count(),
        g.edge_count(),
        st.max_level,
        st.attention_count,
        st.timings.total().as_secs_f64() * 1e3
    );
    for v in out.scores.top_k(10) {
        println!("{v:>8} {:.6}", out.scores.get(v));
    }
    Ok(())
}
