//! Index-free single-source SimRank.
//!
//! ```
//! use simpush::graph::load_edge_list;
//! use simpush::engine::single_source;
//!
//! let g = load_edge_list("1 0\n1 2\n2 0\n0 1\n".as_bytes(), true).unwrap();
//! let s = single_source(&g, 0, 0.6, 0.02, 1e-3, 42).unwrap();
//! assert_eq!(s.get(0), 1.0);
//! assert!(s.as_slice().iter().all(|&x| (0.0..=1.0).contains(&x)));
//! ```

pub mod engine;
pub mod graph;
pub mod harness;
pub mod oracle;
pub mod rng;

pub use engine::{single_source, single_source_with, EngineError, QueryParams, SimRankVector};
pub use graph::{load_edge_list, DirectedGraph, NodeId};
