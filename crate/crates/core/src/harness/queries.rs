use std::io::{self, BufRead, Write};

use rand::seq::index::sample;
use rand::Rng;

use crate::graph::NodeId;
use crate::rng::stream_rng;

/// Query nodes for an evaluation run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySet {
    pub nodes: Vec<NodeId>,
    pub seed: u64,
    pub with_replacement: bool,
}

/// Draws `count` query nodes uniformly from `0..n`: without replacement
/// when `count <= n`, with replacement otherwise.
pub fn gen_queries(n: usize, count: usize, seed: u64) -> QuerySet {
    gen_queries_with(n, count, seed, count > n)
}

/// Like [`gen_queries`], but `with_replacement` forces independent draws
/// (duplicates allowed) even when `count <= n`.
pub fn gen_queries_with(n: usize, count: usize, seed: u64, with_replacement: bool) -> QuerySet {
    assert!(n > 0, "cannot draw queries from an empty graph");
    let mut rng = stream_rng(seed, 0);
    let with_replacement = with_replacement || count > n;
    let nodes = if with_replacement {
        (0..count).map(|_| rng.random_range(0..n) as NodeId).collect()
    } else {
        sample(&mut rng, n, count)
            .into_iter()
            .map(|v| v as NodeId)
            .collect()
    };
    QuerySet {
        nodes,
        seed,
        with_replacement,
    }
}

/// Writes one id per line.
pub fn write_ids<W: Write>(mut w: W, ids: impl IntoIterator<Item = u64>) -> io::Result<()> {
    for id in ids {
        writeln!(w, "{id}")?;
    }
    Ok(())
}

/// Reads one id per line; blank lines and `#` comments are skipped.
pub fn read_ids<R: BufRead>(r: R) -> Result<Vec<u64>, (usize, String)> {
    let mut ids = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| (i + 1, e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        ids.push(t.parse().map_err(|_| (i + 1, format!("malformed node id {t:?}")))?);
    }
    Ok(ids)
}
