//! Edge-list loading with sparse ids, and the binary cache round trip.

use std::fs::File;
use std::io::BufWriter;

use simpush::graph::{load_graph_file, LoadOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = tempfile_dir()?;
    let text = dir.join("sparse_ids.txt");
    std::fs::write(&text, "# follower followee\n1000 20\n20 77\n77 1000\n5 20\n")?;

    let opts = LoadOptions { undirected: false, densify: true };
    let loaded = load_graph_file(&text, opts)?;
    let g = &loaded.graph;
    println!("{} nodes, {} edges", g.node_count(), g.edge_count());
    for v in g.nodes() {
        let ins: Vec<u64> = g.in_neighbors(v).iter().map(|&w| loaded.external(w)).collect();
        println!("  node {} (internal {v}) <- {ins:?}", loaded.external(v));
    }

    let cache = dir.join("graph.bin");
    g.write_binary(BufWriter::new(File::create(&cache)?))?;
    let reloaded = load_graph_file(&cache, LoadOptions::default())?;
    println!(
        "cache {} bytes, identical after reload: {}",
        std::fs::metadata(&cache)?.len(),
        &reloaded.graph == g
    );
    std::fs::remove_dir_all(dir)?;
    Ok(())
}

fn tempfile_dir() -> std::io::Result<std::path::PathBuf> {
    let dir = std::env::temp_dir().join(format!("simpush-cache-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}
