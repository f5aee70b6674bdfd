//! Accuracy and query time across the error-bound grid.

use simpush::engine::QueryParams;
use simpush::graph::generate;
use simpush::harness::{evaluate, gen_queries, Truth};
use simpush::oracle::exact_simrank;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = generate::erdos_renyi(500, 0.01, 11);
    let truth = Truth::Exact(exact_simrank(&g, 0.6, 40)?);
    let queries = gen_queries(g.node_count(), 20, 3);

    println!("{:>7} {:>12} {:>10} {:>11} {:>9}", "eps", "AvgError@50", "Prec@50", "max error", "ms/query");
    for eps in [0.05, 0.02, 0.01, 0.005, 0.002] {
        let params = QueryParams::new(0.6, eps, 1e-4, 1)?;
        let records = evaluate(&g, &queries.nodes, &params, 50, &truth)?;
        let q = records.len() as f64;
        let avg = records.iter().map(|r| r.avg_error.value).sum::<f64>() / q;
        let prec = records.iter().map(|r| r.precision.value).sum::<f64>() / q;
        let max = records.iter().map(|r| r.max_abs_error).fold(0.0, f64::max);
        let ms = records
            .iter()
            .map(|r| r.stats.timings.total().as_secs_f64())
            .sum::<f64>()
            / q
            * 1e3;
        println!("{eps:>7} {avg:>12.3e} {prec:>10.4} {max:>11.3e} {ms:>9.2}");
    }
    Ok(())
}
