//! Per-level node-keyed accumulators.
//!
//! A level starts as a hash map from node to slot and switches to a flat
//! `n`-sized slot table once it holds more than `n / 8` nodes.

use rustc_hash::FxHashMap;

use crate::graph::NodeId;

const VACANT: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub(crate) enum SlotIndex {
    Sparse(FxHashMap<NodeId, u32>),
    Dense(Vec<u32>),
}

impl SlotIndex {
    #[inline]
    pub(crate) fn get(&self, v: NodeId) -> Option<u32> {
        match self {
            SlotIndex::Sparse(map) => map.get(&v).copied(),
            SlotIndex::Dense(slots) => match slots[v as usize] {
                VACANT => None,
                s => Some(s),
            },
        }
    }
}

/// Sums values per node while remembering first-insertion order.
#[derive(Debug, Clone)]
pub(crate) struct LevelAccumulator {
    n: usize,
    index: SlotIndex,
    nodes: Vec<NodeId>,
    values: Vec<f64>,
}

impl LevelAccumulator {
    pub(crate) fn new(n: usize) -> Self {
        LevelAccumulator {
            n,
            index: SlotIndex::Sparse(FxHashMap::default()),
            nodes: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Adds `x` to `v`'s entry and returns its slot.
    #[inline]
    pub(crate) fn add(&mut self, v: NodeId, x: f64) -> u32 {
        let next = self.nodes.len() as u32;
        let slot = match &mut self.index {
            SlotIndex::Sparse(map) => *map.entry(v).or_insert(next),
            SlotIndex::Dense(slots) => {
                let s = &mut slots[v as usize];
                if *s == VACANT {
                    *s = next;
                }
                *s
            }
        };
        if slot == next {
            self.nodes.push(v);
            self.values.push(x);
            if self.n >= 8 && self.nodes.len() > self.n / 8 {
                self.densify();
            }
        } else {
            self.values[slot as usize] += x;
        }
        slot
    }

    fn densify(&mut self) {
        if let SlotIndex::Sparse(_) = self.index {
            let mut slots = vec![VACANT; self.n];
            for (i, &v) in self.nodes.iter().enumerate() {
                slots[v as usize] = i as u32;
            }
            self.index = SlotIndex::Dense(slots);
        }
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub(crate) fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn into_parts(self) -> (Vec<NodeId>, Vec<f64>, SlotIndex) {
        (self.nodes, self.values, self.index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulates_and_switches_to_dense() {
        let mut acc = LevelAccumulator::new(16);
        assert_eq!(acc.add(5, 1.0), 0);
        assert_eq!(acc.add(3, 0.5), 1);
        assert_eq!(acc.add(5, 0.25), 0);
        assert!(!matches!(acc.index, SlotIndex::Dense(_)));
        acc.add(9, 1.0);
        assert!(matches!(acc.index, SlotIndex::Dense(_)));
        assert_eq!(acc.add(3, 0.5), 1);
        assert_eq!(acc.nodes(), &[5, 3, 9]);
        assert_eq!(acc.values(), &[1.25, 1.0, 1.0]);
        let (_, _, index) = acc.into_parts();
        assert_eq!(index.get(9), Some(2));
        assert_eq!(index.get(0), None);
    }
}
