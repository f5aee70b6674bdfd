//! Level-wise propagation of hitting probabilities from the query node.
//!
//! Level `l` of the source graph holds every node reachable from `u` by
//! exactly `l` backward steps, together with `h^(l)(u, node)`. A node can
//! occur on several levels; each `(level, node)` occurrence is separate state.

use super::accum::{LevelAccumulator, SlotIndex};
use super::params::QueryParams;
use crate::graph::{DirectedGraph, NodeId};

/// One level of the source graph.
#[derive(Debug, Clone)]
pub struct Level {
    nodes: Vec<NodeId>,
    hit: Vec<f64>,
    index: SlotIndex,
    /// CSR over this level's occurrences pointing at their in-neighbors on
    /// the next level. Empty for the deepest level.
    up_offsets: Vec<usize>,
    up_targets: Vec<u32>,
}

impl Level {
    fn from_accumulator(acc: LevelAccumulator) -> Self {
        let (nodes, hit, index) = acc.into_parts();
        Level {
            nodes,
            hit,
            index,
            up_offsets: Vec::new(),
            up_targets: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Graph node of the occurrence at `local`.
    pub fn node(&self, local: u32) -> NodeId {
        self.nodes[local as usize]
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    /// `h^(l)(u, node)` per occurrence, in local order.
    pub fn hits(&self) -> &[f64] {
        &self.hit
    }

    pub fn hit(&self, local: u32) -> f64 {
        self.hit[local as usize]
    }

    pub fn local_of(&self, v: NodeId) -> Option<u32> {
        self.index.get(v)
    }

    /// Local indices (on the next level) of the in-neighbors of `local`.
    pub fn up_edges(&self, local: u32) -> &[u32] {
        let i = local as usize;
        if self.up_offsets.is_empty() {
            return &[];
        }
        &self.up_targets[self.up_offsets[i]..self.up_offsets[i + 1]]
    }

    pub fn up_edge_count(&self) -> usize {
        self.up_targets.len()
    }
}

/// Leveled subgraph `G_u` recorded while pushing hitting probabilities from `u`.
#[derive(Debug, Clone)]
pub struct SourceGraph {
    query: NodeId,
    sqrt_c: f64,
    levels: Vec<Level>,
}

impl SourceGraph {
    pub fn query(&self) -> NodeId {
        self.query
    }

    pub fn sqrt_c(&self) -> f64 {
        self.sqrt_c
    }

    /// Deepest level present (`L`).
    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, l: usize) -> &Level {
        &self.levels[l]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// `h^(l)(u, v)`, zero when `v` does not occur on level `l`.
    pub fn hit(&self, l: usize, v: NodeId) -> f64 {
        self.levels
            .get(l)
            .and_then(|lvl| lvl.local_of(v).map(|i| lvl.hit(i)))
            .unwrap_or(0.0)
    }

    pub fn occurrence_count(&self) -> usize {
        self.levels.iter().map(Level::len).sum()
    }
}

/// Identifier of an attention occurrence, dense over all levels and ordered
/// by `(level, local)`.
pub type AttentionId = u32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttentionOccurrence {
    pub level: u32,
    pub local: u32,
    pub node: NodeId,
    /// `h^(level)(u, node)`.
    pub hit: f64,
}

/// Attention occurrences `(l, w)` with `h^(l)(u, w) >= eps_h`, for `l >= 1`.
#[derive(Debug, Clone)]
pub struct AttentionSets {
    eps_h: f64,
    occurrences: Vec<AttentionOccurrence>,
    /// Occurrences of level `l` are `occurrences[level_start[l]..level_start[l + 1]]`.
    level_start: Vec<usize>,
    residues: Option<Vec<f64>>,
}

impl AttentionSets {
    fn collect(sg: &SourceGraph, eps_h: f64) -> Self {
        let mut occurrences = Vec::new();
        let mut level_start = vec![0, 0];
        for (l, level) in sg.levels.iter().enumerate().skip(1) {
            for (local, (&node, &hit)) in level.nodes.iter().zip(&level.hit).enumerate() {
                if hit >= eps_h {
                    occurrences.push(AttentionOccurrence {
                        level: l as u32,
                        local: local as u32,
                        node,
                        hit,
                    });
                }
            }
            level_start.push(occurrences.len());
        }
        AttentionSets {
            eps_h,
            occurrences,
            level_start,
            residues: None,
        }
    }

    pub fn eps_h(&self) -> f64 {
        self.eps_h
    }

    pub fn len(&self) -> usize {
        self.occurrences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occurrences.is_empty()
    }

    /// Deepest level with a (possibly empty) attention set.
    pub fn max_level(&self) -> usize {
        self.level_start.len() - 2
    }

    pub fn get(&self, id: AttentionId) -> &AttentionOccurrence {
        &self.occurrences[id as usize]
    }

    pub fn occurrences(&self) -> &[AttentionOccurrence] {
        &self.occurrences
    }

    /// Ids of the attention occurrences on level `l`.
    pub fn level_ids(&self, l: usize) -> std::ops::Range<AttentionId> {
        if l + 1 >= self.level_start.len() {
            return 0..0;
        }
        self.level_start[l] as AttentionId..self.level_start[l + 1] as AttentionId
    }

    /// Attention id of occurrence `(l, local)`, if it is one.
    pub fn id_of(&self, l: usize, local: u32) -> Option<AttentionId> {
        let range = self.level_ids(l);
        let slice = &self.occurrences[range.start as usize..range.end as usize];
        slice
            .binary_search_by_key(&local, |o| o.local)
            .ok()
            .map(|i| range.start + i as AttentionId)
    }

    /// Attention id of node `v` on level `l`.
    pub fn find(&self, l: usize, v: NodeId) -> Option<AttentionId> {
        self.level_ids(l)
            .find(|&id| self.occurrences[id as usize].node == v)
    }

    /// Residues `r^(l)(w)`, once [`compute_residues`](super::compute_residues)
    /// has run.
    pub fn residues(&self) -> Option<&[f64]> {
        self.residues.as_deref()
    }

    pub(crate) fn set_residues(&mut self, residues: Vec<f64>) {
        debug_assert_eq!(residues.len(), self.occurrences.len());
        self.residues = Some(residues);
    }
}

/// Pushes `h^(l)(u, ·)` level by level for at most `max_level` levels,
/// recording the traversed in-edges, then collects the attention sets.
///
/// A node at level `l` sends `√c · h^(l)(u, v) / d_I(v)` to each of its
/// in-neighbors at level `l + 1`. Nodes without in-neighbors send nothing.
pub fn source_push(
    g: &DirectedGraph,
    u: NodeId,
    max_level: usize,
    params: &QueryParams,
) -> (SourceGraph, AttentionSets) {
    let n = g.node_count();
    let sqrt_c = params.sqrt_c();
    let mut root = LevelAccumulator::new(n);
    root.add(u, 1.0);
    let mut levels = vec![Level::from_accumulator(root)];

    while levels.len() <= max_level {
        let current = levels.last_mut().expect("level 0 exists");
        let mut next = LevelAccumulator::new(n);
        let mut up_offsets = Vec::with_capacity(current.len() + 1);
        let mut up_targets = Vec::new();
        up_offsets.push(0);
        for (&v, &h) in current.nodes.iter().zip(&current.hit) {
            let nbrs = g.in_neighbors(v);
            if !nbrs.is_empty() {
                let share = sqrt_c * h / nbrs.len() as f64;
                for &w in nbrs {
                    up_targets.push(next.add(w, share));
                }
            }
            up_offsets.push(up_targets.len());
        }
        if next.is_empty() {
            break;
        }
        current.up_offsets = up_offsets;
        current.up_targets = up_targets;
        levels.push(Level::from_accumulator(next));
    }

    let sg = SourceGraph {
        query: u,
        sqrt_c,
        levels,
    };
    let att = AttentionSets::collect(&sg, params.eps_h());
    (sg, att)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::params::derive_params;
    use crate::graph::load_edge_list;
    use approx::assert_relative_eq;

    fn params() -> QueryParams {
        derive_params(0.6, 0.05, 0.01, 0).unwrap()
    }

    #[test]
    fn dangling_query_has_single_level() {
        let g = load_edge_list("0 1\n".as_bytes(), true).unwrap();
        let (sg, att) = source_push(&g, 0, 5, &params());
        assert_eq!(sg.max_level(), 0);
        assert_eq!(sg.hit(0, 0), 1.0);
        assert!(att.is_empty());
    }

    #[test]
    fn two_cycle_hits() {
        let g = load_edge_list("0 1\n1 0\n".as_bytes(), true).unwrap();
        let (sg, att) = source_push(&g, 0, 2, &params());
        assert_eq!(sg.max_level(), 2);
        assert_relative_eq!(sg.hit(1, 1), 0.6f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(sg.hit(2, 0), 0.6, max_relative = 1e-15);
        assert_eq!(sg.hit(1, 0), 0.0);
        assert_eq!(att.len(), 2);
        assert_eq!(att.level_ids(1).len(), 1);
        assert_eq!(sg.level(0).up_edges(0), &[0]);
        assert!(sg.level(2).up_edges(0).is_empty());
    }

    #[test]
    fn edges_only_between_adjacent_levels() {
        let g = crate::graph::generate::erdos_renyi(30, 0.1, 2);
        let (sg, _) = source_push(&g, 3, 6, &params());
        for l in 0..sg.max_level() {
            let (cur, next) = (sg.level(l), sg.level(l + 1));
            for local in 0..cur.len() as u32 {
                let mut ups: Vec<NodeId> =
                    cur.up_edges(local).iter().map(|&j| next.node(j)).collect();
                ups.sort_unstable();
                assert_eq!(ups, g.in_neighbors(cur.node(local)));
            }
        }
    }
}
