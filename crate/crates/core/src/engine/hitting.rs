//! Hitting probabilities between attention occurrences inside the source graph.
//!
//! For an occurrence `w'` on level `l` and an attention occurrence `w_i` on
//! level `l + i`, `h~^(i)(w', w_i)` is the probability that a √c-walk started
//! at `w'` and confined to the source graph stands on `w_i` after `i` steps.
//! Rows are filled from the deepest level upwards:
//!
//! ```text
//! h~^(i)(w', w_i) = √c / d_I(w') · Σ_{x ∈ I(w')} h~^(i-1)(x, w_i)
//! ```
//!
//! Inside the source graph every expanded occurrence keeps all of its
//! in-neighbors from `G`, so `d_I` is the in-degree in `G`.

use super::source_push::{AttentionId, AttentionSets, SourceGraph};

/// Entries smaller than this are dropped while the table is built.
pub const HIT_DROP_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Clone, Default)]
struct LevelRows {
    offsets: Vec<usize>,
    entries: Vec<(AttentionId, f64)>,
}

impl LevelRows {
    fn row(&self, local: u32) -> &[(AttentionId, f64)] {
        let i = local as usize;
        if i + 1 >= self.offsets.len() {
            return &[];
        }
        &self.entries[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// Sparse rows of `h~` keyed by source occurrence. Each row lists
/// `(target attention id, value)` sorted by target id, which also orders the
/// targets by level. Attention occurrences carry their own `h~^(0) = 1` entry.
#[derive(Debug, Clone)]
pub struct HitTable {
    levels: Vec<LevelRows>,
}

impl HitTable {
    /// Row of the occurrence `(level, local)`. Empty for level 0.
    pub fn row(&self, level: usize, local: u32) -> &[(AttentionId, f64)] {
        self.levels.get(level).map_or(&[], |rows| rows.row(local))
    }

    /// Row of an attention occurrence.
    pub fn attention_row(&self, att: &AttentionSets, id: AttentionId) -> &[(AttentionId, f64)] {
        let o = att.get(id);
        self.row(o.level as usize, o.local)
    }

    /// `h~^(i)(source, target)` where `i` is the level gap; zero if absent.
    pub fn get(&self, level: usize, local: u32, target: AttentionId) -> f64 {
        let row = self.row(level, local);
        row.binary_search_by_key(&target, |&(t, _)| t)
            .map_or(0.0, |i| row[i].1)
    }

    /// Total number of stored entries.
    pub fn entry_count(&self) -> usize {
        self.levels.iter().map(|l| l.entries.len()).sum()
    }
}

/// Builds the in-source-graph hitting table for all occurrences that can reach
/// an attention occurrence.
pub fn hitting_in_source_graph(sg: &SourceGraph, att: &AttentionSets) -> HitTable {
    let max_level = sg.max_level();
    let sqrt_c = sg.sqrt_c();
    let mut levels = vec![LevelRows::default(); max_level + 1];

    let mut scratch = vec![0.0f64; att.len()];
    let mut seen = vec![false; att.len()];
    let mut touched: Vec<AttentionId> = Vec::new();

    for l in (1..=max_level).rev() {
        let level = sg.level(l);
        let (deeper, current) = {
            let (head, tail) = levels.split_at_mut(l + 1);
            (tail.first(), &mut head[l])
        };
        current.offsets.reserve(level.len() + 1);
        current.offsets.push(0);
        for local in 0..level.len() as u32 {
            if let Some(deeper) = deeper {
                let ups = level.up_edges(local);
                for &j in ups {
                    for &(t, h) in deeper.row(j) {
                        let ti = t as usize;
                        if !seen[ti] {
                            seen[ti] = true;
                            touched.push(t);
                        }
                        scratch[ti] += h;
                    }
                }
                if !ups.is_empty() {
                    let scale = sqrt_c / ups.len() as f64;
                    touched.sort_unstable();
                    for &t in &touched {
                        let v = scale * scratch[t as usize];
                        if v >= HIT_DROP_TOLERANCE {
                            current.entries.push((t, v));
                        }
                    }
                }
                for &t in &touched {
                    scratch[t as usize] = 0.0;
                    seen[t as usize] = false;
                }
                touched.clear();
            }
            if let Some(id) = att.id_of(l, local) {
                // Self entry precedes all deeper targets because ids are ordered by level.
                let start = *current.offsets.last().expect("offsets start at 0");
                current.entries.insert(start, (id, 1.0));
            }
            current.offsets.push(current.entries.len());
        }
    }
    HitTable { levels }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::params::derive_params;
    use crate::engine::source_push::source_push;
    use crate::graph::{load_edge_list, DirectedGraph};
    use approx::assert_relative_eq;

    #[test]
    fn path_graph_powers_of_sqrt_c() {
        // 3 -> 2 -> 1 -> 0: the walk from 0 has a single path.
        let g = load_edge_list("3 2\n2 1\n1 0\n".as_bytes(), true).unwrap();
        let p = derive_params(0.6, 0.05, 0.01, 0)
            .unwrap()
            .with_attention_threshold(0.1)
            .unwrap();
        let (sg, att) = source_push(&g, 0, 3, &p);
        assert_eq!(att.len(), 3);
        let hit = hitting_in_source_graph(&sg, &att);
        let s = 0.6f64.sqrt();
        let deepest = att.find(3, 3).unwrap();
        let mid = att.find(2, 2).unwrap();
        assert_relative_eq!(hit.get(1, 0, deepest), s * s, max_relative = 1e-15);
        assert_relative_eq!(hit.get(1, 0, mid), s, max_relative = 1e-15);
        assert_relative_eq!(hit.get(2, 0, deepest), s, max_relative = 1e-15);
        assert_eq!(hit.get(3, 0, deepest), 1.0);
    }

    #[test]
    fn leaf_attention_has_only_self_entry() {
        let g = load_edge_list("1 0\n2 0\n".as_bytes(), true).unwrap();
        let p = derive_params(0.6, 0.05, 0.01, 0).unwrap();
        let (sg, att) = source_push(&g, 0, 1, &p);
        let hit = hitting_in_source_graph(&sg, &att);
        for id in att.level_ids(1) {
            assert_eq!(hit.attention_row(&att, id), &[(id, 1.0)]);
        }
    }

    fn check_invariants(g: &DirectedGraph, u: u32) {
        let p = derive_params(0.6, 0.05, 0.01, 0).unwrap();
        let (sg, att) = source_push(g, u, 6, &p);
        let hit = hitting_in_source_graph(&sg, &att);
        let s = p.sqrt_c();
        for l in 1..=sg.max_level() {
            for local in 0..sg.level(l).len() as u32 {
                let row = hit.row(l, local);
                let mut per_step = vec![0.0; sg.max_level() + 1];
                for &(t, h) in row {
                    assert!((0.0..=1.0).contains(&h));
                    let i = att.get(t).level as usize - l;
                    per_step[i] += h;
                    if i == 0 {
                        assert_eq!(h, 1.0);
                    }
                }
                for (i, &total) in per_step.iter().enumerate() {
                    assert!(total <= s.powi(i as i32) + 1e-12, "level {l} step {i}: {total}");
                }
                if let Some(id) = att.id_of(l, local) {
                    assert_eq!(row[0], (id, 1.0));
                }
            }
        }
    }

    #[test]
    fn row_invariants_on_random_graphs() {
        for seed in 0..5 {
            let g = crate::graph::generate::erdos_renyi(25, 0.12, seed);
            check_invariants(&g, (seed % 25) as u32);
        }
    }
}
