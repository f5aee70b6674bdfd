//! Full evaluation run writing the CSV report, as the `eval` command does.

use simpush::graph::{generate, LoadOptions};
use simpush::harness::{run_eval, EvalConfig, QuerySource, TruthSource};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("simpush-eval-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let graph = dir.join("graph.txt");
    generate::erdos_renyi(300, 0.02, 21).write_edge_list(std::fs::File::create(&graph)?)?;

    let cfg = EvalConfig {
        graph,
        load: LoadOptions::default(),
        queries: QuerySource::Generate(25),
        c: 0.6,
        eps: 0.01,
        delta: 1e-4,
        seed: 4,
        k: 50,
        truth: TruthSource::Exact { iterations: 40 },
        out: Some(dir.join("report.csv")),
    };
    let report = run_eval(&cfg)?;
    println!(
        "AvgError@50 {:.3e}, Precision@50 {:.4}, {:.2?} per query, peak RSS {:?} kB",
        report.mean_avg_error(),
        report.mean_precision(),
        report.mean_query_time(),
        report.peak_rss_kb
    );
    let csv = std::fs::read_to_string(dir.join("report.csv"))?;
    for line in csv.lines().take(12) {
        println!("{line}");
    }
    println!("... {} rows", csv.lines().count());
    std::fs::remove_dir_all(dir)?;
    Ok(())
}
