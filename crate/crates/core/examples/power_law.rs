//! Query cost on a generated graph with a heavy-tailed degree distribution.

use std::time::Instant;

use simpush::engine::{single_source_with, QueryParams};
use simpush::graph::generate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(200_000);
    let t = Instant::now();
    let g = generate::preferential_attachment(n, 5, 3);
    println!("n={} m={} built in {:.2?}", g.node_count(), g.edge_count(), t.elapsed());

    for eps in [0.05, 0.02, 0.01] {
        let params = QueryParams::new(0.6, eps, 1e-4, 9)?;
        for u in [0, n as u32 / 2, n as u32 - 1] {
            let out = single_source_with(&g, u, &params)?;
            let st = out.stats;
            println!(
                "eps={eps:<5} u={u:<7} depth {:>2} attention {:>5} total {:>8.2?} (sampling {:.2?}, push {:.2?}, gamma {:.2?}, reverse {:.2?})",
                st.max_level,
                st.attention_count,
                st.timings.total(),
                st.timings.sampling,
                st.timings.source_push,
                st.timings.gamma,
                st.timings.reverse_push
            );
        }
    }
    Ok(())
}
