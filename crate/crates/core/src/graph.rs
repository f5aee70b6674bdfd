//! Immutable directed graph with forward and backward compressed adjacency.
//!
//! Both directions are stored because the query pipeline walks in-edges while
//! expanding the source graph and out-edges while distributing residues back
//! towards candidate nodes.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use thiserror::Error;

pub mod generate;

/// Dense zero-based node index.
pub type NodeId = u32;

const CACHE_MAGIC: &[u8; 8] = b"SIMPUSH1";

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("edge list contains no edges")]
    Empty,
    #[error("node {node} out of range (n = {n})")]
    NodeOutOfRange { node: u64, n: usize },
    #[error("node count {0} does not fit in a 32-bit node id")]
    TooManyNodes(u64),
    #[error("invalid binary graph cache: {0}")]
    BadCache(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Options for [`load_edge_list_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Treat every line as an undirected edge and insert both directions.
    pub undirected: bool,
    /// Renumber the ids that actually occur to `0..n` and keep a side table.
    pub densify: bool,
}

/// Mapping between the ids found in an input file and internal [`NodeId`]s.
#[derive(Debug, Clone, Default)]
pub struct IdMap {
    external: Vec<u64>,
    internal: HashMap<u64, NodeId>,
}

impl IdMap {
    pub fn to_internal(&self, external: u64) -> Option<NodeId> {
        self.internal.get(&external).copied()
    }

    pub fn to_external(&self, internal: NodeId) -> Option<u64> {
        self.external.get(internal as usize).copied()
    }

    pub fn len(&self) -> usize {
        self.external.len()
    }

    pub fn is_empty(&self) -> bool {
        self.external.is_empty()
    }

    fn intern(&mut self, external: u64) -> NodeId {
        if let Some(&id) = self.internal.get(&external) {
            return id;
        }
        let id = self.external.len() as NodeId;
        self.external.push(external);
        self.internal.insert(external, id);
        id
    }
}

/// Result of loading an edge list: the graph and, when densified, the id table.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: DirectedGraph,
    pub ids: Option<IdMap>,
}

impl LoadedGraph {
    /// Translates an id as written in the input file.
    pub fn internal(&self, external: u64) -> Result<NodeId, GraphError> {
        let n = self.graph.node_count();
        let id = match &self.ids {
            Some(map) => map.to_internal(external),
            None => (external < n as u64).then_some(external as NodeId),
        };
        id.ok_or(GraphError::NodeOutOfRange { node: external, n })
    }

    /// The input-file id of an internal node.
    pub fn external(&self, internal: NodeId) -> u64 {
        match &self.ids {
            Some(map) => map.to_external(internal).expect("internal id in range"),
            None => internal as u64,
        }
    }
}

/// Directed graph stored as two CSR arrays (out-edges and in-edges).
///
/// Adjacency lists are sorted ascending and free of duplicates. Self-loops
/// are kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_targets: Vec<NodeId>,
}

impl DirectedGraph {
    /// Builds a graph over `n` nodes from `(src, dst)` pairs. Duplicate edges
    /// collapse to one.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        if n > NodeId::MAX as usize {
            return Err(GraphError::TooManyNodes(n as u64));
        }
        let mut edges: Vec<(NodeId, NodeId)> = edges.into_iter().collect();
        for &(a, b) in &edges {
            let bad = a.max(b);
            if bad as usize >= n {
                return Err(GraphError::NodeOutOfRange {
                    node: bad as u64,
                    n,
                });
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self::from_sorted_unique(n, &edges))
    }

    fn from_sorted_unique(n: usize, edges: &[(NodeId, NodeId)]) -> Self {
        let m = edges.len();
        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for &(a, b) in edges {
            out_offsets[a as usize + 1] += 1;
            in_offsets[b as usize + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let out_targets: Vec<NodeId> = edges.iter().map(|&(_, b)| b).collect();
        // Edges are sorted by source, so each in-list fills in ascending order.
        let mut in_targets = vec![0 as NodeId; m];
        let mut cursor = in_offsets.clone();
        for &(a, b) in edges {
            in_targets[cursor[b as usize]] = a;
            cursor[b as usize] += 1;
        }
        DirectedGraph {
            n,
            out_offsets,
            out_targets,
            in_offsets,
            in_targets,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    #[inline]
    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    #[inline]
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.in_targets[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    #[inline]
    pub fn in_degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    #[inline]
    pub fn out_degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    /// `(in_degree, out_degree)` of `v`, checked against the node count.
    pub fn degrees(&self, v: NodeId) -> Result<(usize, usize), GraphError> {
        self.check_node(v)?;
        Ok((self.in_degree(v), self.out_degree(v)))
    }

    pub fn check_node(&self, v: NodeId) -> Result<(), GraphError> {
        if (v as usize) < self.n {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                node: v as u64,
                n: self.n,
            })
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.n as NodeId
    }

    /// All edges in `(src, dst)` order, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes()
            .flat_map(move |a| self.out_neighbors(a).iter().map(move |&b| (a, b)))
    }

    /// Writes the canonical edge list (`src dst` per line, sorted).
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (a, b) in self.edges() {
            writeln!(w, "{a} {b}")?;
        }
        Ok(())
    }

    /// Writes the binary cache: magic, `n`, `m`, out offsets, in offsets,
    /// out targets, in targets, all as little-endian `u64`.
    pub fn write_binary<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(CACHE_MAGIC)?;
        let mut put = |x: u64| w.write_all(&x.to_le_bytes());
        put(self.n as u64)?;
        put(self.edge_count() as u64)?;
        for &o in self.out_offsets.iter().chain(&self.in_offsets) {
            put(o as u64)?;
        }
        for &t in self.out_targets.iter().chain(&self.in_targets) {
            put(t as u64)?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self, GraphError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(GraphError::BadCache("bad magic bytes".into()));
        }
        let mut get = || -> Result<u64, GraphError> {
            let mut buf = [0u8; 8];
            r.read_exact(&mut buf)?;
            Ok(u64::from_le_bytes(buf))
        };
        let n = get()?;
        let m = get()?;
        if n > NodeId::MAX as u64 {
            return Err(GraphError::TooManyNodes(n));
        }
        let (n, m) = (n as usize, m as usize);
        let read_offsets = |get: &mut dyn FnMut() -> Result<u64, GraphError>| {
            let offsets = (0..=n)
                .map(|_| get().map(|x| x as usize))
                .collect::<Result<Vec<_>, _>>()?;
            if offsets[0] != 0
                || offsets[n] != m
                || offsets.windows(2).any(|w| w[0] > w[1])
            {
                return Err(GraphError::BadCache("inconsistent offsets".into()));
            }
            Ok(offsets)
        };
        let out_offsets = read_offsets(&mut get)?;
        let in_offsets = read_offsets(&mut get)?;
        let read_targets = |get: &mut dyn FnMut() -> Result<u64, GraphError>| {
            (0..m)
                .map(|_| {
                    let t = get()?;
                    if t >= n as u64 {
                        return Err(GraphError::BadCache(format!("target {t} out of range")));
                    }
                    Ok(t as NodeId)
                })
                .collect::<Result<Vec<_>, _>>()
        };
        let out_targets = read_targets(&mut get)?;
        let in_targets = read_targets(&mut get)?;
        let g = DirectedGraph {
            n,
            out_offsets,
            out_targets,
            in_offsets,
            in_targets,
        };
        if !g.is_mirror_consistent() {
            return Err(GraphError::BadCache(
                "in-adjacency does not mirror out-adjacency".into(),
            ));
        }
        Ok(g)
    }

    /// Checks that in-lists are exactly the transpose of the out-lists and
    /// that every list is strictly ascending.
    pub fn is_mirror_consistent(&self) -> bool {
        let strictly_sorted = |xs: &[NodeId]| xs.windows(2).all(|w| w[0] < w[1]);
        if self.in_targets.len() != self.out_targets.len() {
            return false;
        }
        if !self.nodes().all(|v| {
            strictly_sorted(self.out_neighbors(v)) && strictly_sorted(self.in_neighbors(v))
        }) {
            return false;
        }
        let rebuilt = Self::from_sorted_unique(self.n, &self.edges().collect::<Vec<_>>());
        rebuilt.in_offsets == self.in_offsets && rebuilt.in_targets == self.in_targets
    }
}

/// Loads a graph file: a binary cache if it starts with the cache magic,
/// otherwise an edge list. Options other than `undirected`/`densify` on a
/// cache file are ignored since the cache stores the final adjacency.
pub fn load_graph_file(path: impl AsRef<Path>, opts: LoadOptions) -> Result<LoadedGraph, GraphError> {
    let mut reader = BufReader::new(File::open(path)?);
    let head = reader.fill_buf()?;
    if head.len() >= CACHE_MAGIC.len() && &head[..CACHE_MAGIC.len()] == CACHE_MAGIC {
        let graph = DirectedGraph::read_binary(reader)?;
        return Ok(LoadedGraph { graph, ids: None });
    }
    load_edge_list_with(reader, opts)
}

/// Parses a whitespace-separated `src dst` edge list. Lines starting with
/// `#` or `%` are comments. `n` is one more than the largest id seen.
pub fn load_edge_list<R: BufRead>(reader: R, directed: bool) -> Result<DirectedGraph, GraphError> {
    let opts = LoadOptions {
        undirected: !directed,
        densify: false,
    };
    load_edge_list_with(reader, opts).map(|l| l.graph)
}

pub fn load_edge_list_with<R: BufRead>(
    reader: R,
    opts: LoadOptions,
) -> Result<LoadedGraph, GraphError> {
    let mut ids = opts.densify.then(IdMap::default);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut max_id: u64 = 0;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let mut parse = |what: &str| -> Result<u64, GraphError> {
            let tok = tokens.next().ok_or_else(|| GraphError::Parse {
                line: lineno,
                message: format!("missing {what} node id"),
            })?;
            tok.parse::<u64>().map_err(|_| GraphError::Parse {
                line: lineno,
                message: format!("malformed {what} node id {tok:?}"),
            })
        };
        let src = parse("source")?;
        let dst = parse("target")?;
        if let Some(extra) = tokens.next() {
            return Err(GraphError::Parse {
                line: lineno,
                message: format!("unexpected token {extra:?}"),
            });
        }
        let (a, b) = match ids.as_mut() {
            Some(map) => (map.intern(src), map.intern(dst)),
            None => {
                max_id = max_id.max(src).max(dst);
                if max_id >= NodeId::MAX as u64 {
                    return Err(GraphError::TooManyNodes(max_id + 1));
                }
                (src as NodeId, dst as NodeId)
            }
        };
        edges.push((a, b));
        if opts.undirected {
            edges.push((b, a));
        }
    }

    if edges.is_empty() {
        return Err(GraphError::Empty);
    }
    let n = match &ids {
        Some(map) => map.len(),
        None => max_id as usize + 1,
    };
    let graph = DirectedGraph::from_edges(n, edges)?;
    Ok(LoadedGraph { graph, ids })
}
