//! Engine estimates next to exact and Monte-Carlo SimRank on a small graph.

use simpush::engine::single_source;
use simpush::graph::generate;
use simpush::oracle::{exact_simrank, mc_pair};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = generate::erdos_renyi(200, 0.03, 5);
    let u = 3;
    let exact = exact_simrank(&g, 0.6, 40)?;
    let est = single_source(&g, u, 0.6, 0.01, 1e-4, 7)?;

    println!("{:>6} {:>10} {:>10} {:>10} {:>9}", "v", "exact", "engine", "mc", "radius");
    for v in exact.row_vector(u).top_k(10) {
        let mc = mc_pair(&g, u, v, 0.6, 200_000, v as u64)?;
        println!(
            "{v:>6} {:>10.6} {:>10.6} {:>10.6} {:>9.6}",
            exact.get(u, v),
            est.get(v),
            mc.value,
            mc.radius(1e-3)
        );
    }
    let worst = (0..200)
        .map(|v| exact.get(u, v) - est.get(v))
        .fold(0.0f64, f64::max);
    println!("largest underestimate over all nodes: {worst:.2e}");
    Ok(())
}
