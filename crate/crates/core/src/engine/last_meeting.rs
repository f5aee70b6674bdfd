//! Last-meeting correction.
//!
//! For an attention occurrence `w` on level `l`, `γ^(l)(w)` is the probability
//! that two independent √c-walks from `w`, confined to the source graph, never
//! stand together on a deeper attention occurrence. It is one minus the sum of
//! the first-meeting probabilities
//!
//! ```text
//! ρ^(1)(w, w_1) = h~^(1)(w, w_1)²
//! ρ^(i)(w, w_i) = h~^(i)(w, w_i)² − Σ_{j<i} Σ_{w_j} ρ^(j)(w, w_j) · h~^(i−j)(w_j, w_i)²
//! ```
//!
//! where every `w_j` ranges over attention occurrences only.

use thiserror::Error;

use super::hitting::HitTable;
use super::source_push::{AttentionId, AttentionSets};

/// Most negative first-meeting probability accepted as rounding noise.
pub const RHO_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum ConsistencyError {
    #[error("first-meeting probability {value} at attention {target} from {origin} is negative")]
    NegativeFirstMeeting {
        origin: AttentionId,
        target: AttentionId,
        value: f64,
    },
    #[error("no attention occurrence of node {node} on level {level}")]
    NotAttention { level: usize, node: u32 },
}

/// Reusable dense scratch for first-meeting computations.
#[derive(Debug)]
pub struct FirstMeetingScratch {
    values: Vec<f64>,
    /// `stamp[t] == round` marks `values[t]` as live for the current source.
    stamp: Vec<u32>,
    round: u32,
}

impl FirstMeetingScratch {
    pub fn new(att: &AttentionSets) -> Self {
        FirstMeetingScratch {
            values: vec![0.0; att.len()],
            stamp: vec![0; att.len()],
            round: 0,
        }
    }
}

/// First-meeting probabilities `ρ^(i)(w, w_i)` for every deeper attention
/// occurrence `w_i` reachable from attention occurrence `source`, in target id
/// order.
pub fn first_meetings(
    att: &AttentionSets,
    hit: &HitTable,
    source: AttentionId,
    scratch: &mut FirstMeetingScratch,
) -> Result<Vec<(AttentionId, f64)>, ConsistencyError> {
    scratch.round = scratch.round.wrapping_add(1);
    if scratch.round == 0 {
        scratch.stamp.fill(0);
        scratch.round = 1;
    }
    let round = scratch.round;
    let row = hit.attention_row(att, source);
    for &(t, h) in row {
        if t != source {
            scratch.values[t as usize] = h * h;
            scratch.stamp[t as usize] = round;
        }
    }
    let mut out = Vec::with_capacity(row.len().saturating_sub(1));
    // Targets come in level order, so every ρ is final before it is used.
    for &(t, _) in row {
        if t == source {
            continue;
        }
        let rho = scratch.values[t as usize];
        if rho < -RHO_TOLERANCE {
            return Err(ConsistencyError::NegativeFirstMeeting {
                origin: source,
                target: t,
                value: rho,
            });
        }
        out.push((t, rho));
        if rho != 0.0 {
            for &(t2, h) in hit.attention_row(att, t) {
                if t2 != t && scratch.stamp[t2 as usize] == round {
                    scratch.values[t2 as usize] -= rho * h * h;
                }
            }
        }
    }
    Ok(out)
}

/// `γ^(l)(w)` for the attention occurrence of node `node` on `level`.
pub fn last_meeting(
    att: &AttentionSets,
    hit: &HitTable,
    level: usize,
    node: u32,
) -> Result<f64, ConsistencyError> {
    let id = att
        .find(level, node)
        .ok_or(ConsistencyError::NotAttention { level, node })?;
    let mut scratch = FirstMeetingScratch::new(att);
    gamma_of(att, hit, id, &mut scratch)
}

fn gamma_of(
    att: &AttentionSets,
    hit: &HitTable,
    id: AttentionId,
    scratch: &mut FirstMeetingScratch,
) -> Result<f64, ConsistencyError> {
    let rhos = first_meetings(att, hit, id, scratch)?;
    Ok(1.0 - rhos.iter().map(|&(_, r)| r).sum::<f64>())
}

/// `γ` for every attention occurrence, indexed by attention id.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaTable {
    gammas: Vec<f64>,
}

impl GammaTable {
    pub fn from_vec(gammas: Vec<f64>) -> Self {
        GammaTable { gammas }
    }

    pub fn get(&self, id: AttentionId) -> f64 {
        self.gammas[id as usize]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.gammas
    }
}

pub fn all_last_meetings(att: &AttentionSets, hit: &HitTable) -> Result<GammaTable, ConsistencyError> {
    let mut scratch = FirstMeetingScratch::new(att);
    let gammas = (0..att.len() as AttentionId)
        .map(|id| gamma_of(att, hit, id, &mut scratch))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GammaTable { gammas })
}

/// Stores `r^(l)(w) = h^(l)(u, w) · γ^(l)(w)` on every attention occurrence.
pub fn compute_residues(att: &mut AttentionSets, gammas: &GammaTable) {
    let residues = att
        .occurrences()
        .iter()
        .zip(gammas.as_slice())
        .map(|(o, &g)| o.hit * g)
        .collect();
    att.set_residues(residues);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::hitting::hitting_in_source_graph;
    use crate::engine::params::derive_params;
    use crate::engine::source_push::source_push;
    use crate::graph::load_edge_list;
    use approx::assert_relative_eq;

    #[test]
    fn deepest_level_has_gamma_one() {
        let g = load_edge_list("1 0\n0 1\n".as_bytes(), true).unwrap();
        let p = derive_params(0.6, 0.05, 0.01, 0).unwrap();
        let (sg, att) = source_push(&g, 0, 3, &p);
        let hit = hitting_in_source_graph(&sg, &att);
        assert_eq!(last_meeting(&att, &hit, 3, 1).unwrap(), 1.0);
    }

    #[test]
    fn two_cycle_gammas() {
        // On the 2-cycle both walks follow the same path, so they meet on
        // every level: ρ^(1) = c and ρ^(i) = 0 afterwards, γ^(l) = 1 − c for l < L.
        let g = load_edge_list("1 0\n0 1\n".as_bytes(), true).unwrap();
        let p = derive_params(0.6, 0.05, 0.01, 0).unwrap();
        let (sg, mut att) = source_push(&g, 0, 3, &p);
        let hit = hitting_in_source_graph(&sg, &att);
        let gammas = all_last_meetings(&att, &hit).unwrap();
        let g1 = last_meeting(&att, &hit, 1, 1).unwrap();
        assert_relative_eq!(g1, 0.4, max_relative = 1e-12);
        assert_relative_eq!(last_meeting(&att, &hit, 2, 0).unwrap(), 0.4, max_relative = 1e-12);
        compute_residues(&mut att, &gammas);
        let id = att.find(1, 1).unwrap();
        assert_relative_eq!(att.residues().unwrap()[id as usize], 0.6f64.sqrt() * g1, max_relative = 1e-15);
    }

    #[test]
    fn residue_edge_cases() {
        let g = load_edge_list("1 0\n".as_bytes(), true).unwrap();
        let p = derive_params(0.6, 0.05, 0.01, 0).unwrap();
        let (_, mut att) = source_push(&g, 0, 1, &p);
        compute_residues(&mut att, &GammaTable { gammas: vec![1.0] });
        assert_eq!(att.residues().unwrap(), &[0.6f64.sqrt()]);
        compute_residues(&mut att, &GammaTable { gammas: vec![0.0] });
        assert_eq!(att.residues().unwrap(), &[0.0]);
    }

    #[test]
    fn non_attention_query_is_reported() {
        let g = load_edge_list("1 0\n".as_bytes(), true).unwrap();
        let p = derive_params(0.6, 0.05, 0.01, 0).unwrap();
        let (sg, att) = source_push(&g, 0, 1, &p);
        let hit = hitting_in_source_graph(&sg, &att);
        assert!(matches!(
            last_meeting(&att, &hit, 1, 0),
            Err(ConsistencyError::NotAttention { .. })
        ));
    }
}
