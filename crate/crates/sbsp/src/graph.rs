//! Immutable undirected graphs and the edge-list loader.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read};

use flate2::read::GzDecoder;
use thiserror::Error;

use crate::weight::Weight;

/// Global vertex identifier. IDs are arbitrary non-negative 64-bit values
/// and need not be contiguous; SNAP exports routinely have gaps.
pub type VertexId = u64;

/// A simple undirected graph, optionally weighted.
///
/// Invariants established at construction:
/// * no self-loops, no parallel edges;
/// * `(u, v)` present iff `(v, u)` present, with equal weight;
/// * adjacency lists sorted ascending by neighbor ID.
#[derive(Clone, Debug)]
pub struct Graph {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    adjacency: Vec<Vec<(VertexId, Weight)>>,
    edge_count: usize,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph has no vertices")]
    Empty,
    #[error("i/o error reading graph: {0}")]
    Io(#[from] std::io::Error),
}

impl Graph {
    /// Builds a graph from an edge list, symmetrizing directed input,
    /// dropping self-loops, and collapsing parallel edges onto the minimum
    /// weight. Isolated vertices cannot be expressed in an edge list, so
    /// every vertex mentioned on any edge becomes part of the graph.
    pub fn from_edges<I>(edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (VertexId, VertexId, Weight)>,
    {
        let mut best: HashMap<(VertexId, VertexId), Weight> = HashMap::new();
        let mut seen: Vec<VertexId> = Vec::new();
        for (u, v, w) in edges {
            seen.push(u);
            seen.push(v);
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            best.entry(key)
                .and_modify(|current| *current = (*current).min(w))
                .or_insert(w);
        }
        if seen.is_empty() {
            return Err(GraphError::Empty);
        }
        seen.sort_unstable();
        seen.dedup();

        let index: HashMap<VertexId, usize> =
            seen.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut adjacency = vec![Vec::new(); seen.len()];
        for (&(u, v), &w) in &best {
            adjacency[index[&u]].push((v, w));
            adjacency[index[&v]].push((u, w));
        }
        for list in &mut adjacency {
            list.sort_unstable_by_key(|&(id, _)| id);
        }
        Ok(Graph {
            ids: seen,
            index,
            adjacency,
            edge_count: best.len(),
        })
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    /// Number of undirected edges, each counted once.
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// All vertex IDs in ascending order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.index.contains_key(&v)
    }

    /// Neighbors of `v` with weights, sorted ascending by neighbor ID.
    /// Panics if `v` is not a vertex of this graph.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, Weight)] {
        &self.adjacency[self.index[&v]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.neighbors(v).len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.contains_vertex(u)
            && self
                .neighbors(u)
                .binary_search_by_key(&v, |&(id, _)| id)
                .is_ok()
    }

    pub fn edge_weight(&self, u: VertexId, v: VertexId) -> Option<Weight> {
        let list = self.adjacency.get(*self.index.get(&u)?)?;
        let pos = list.binary_search_by_key(&v, |&(id, _)| id).ok()?;
        Some(list[pos].1)
    }

    /// Every undirected edge exactly once as `(u, v, w)` with `u < v`,
    /// in ascending `(u, v)` order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, Weight)> + '_ {
        self.ids.iter().flat_map(move |&u| {
            self.neighbors(u)
                .iter()
                .filter(move |&&(v, _)| u < v)
                .map(move |&(v, w)| (u, v, w))
        })
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// Reads a SNAP-style edge list: `#`-prefixed comment lines, then one
/// `u v` or `u v w` per line, whitespace-separated. Gzip input is detected
/// by its magic bytes. With `weighted` false the third column is ignored
/// and every edge gets weight 1.
pub fn load_edge_list<R: Read>(source: R, weighted: bool) -> Result<Graph, GraphError> {
    let reader = maybe_gunzip(source)?;
    let mut edges = Vec::new();
    for (number, line) in reader.lines().enumerate() {
        let line = line?;
        let number = number + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(GraphError::Parse {
                line: number,
                message: format!("expected `u v` or `u v w`, got {} fields", fields.len()),
            });
        }
        let u: VertexId = fields[0].parse().map_err(|_| GraphError::Parse {
            line: number,
            message: format!("invalid vertex id {:?}", fields[0]),
        })?;
        let v: VertexId = fields[1].parse().map_err(|_| GraphError::Parse {
            line: number,
            message: format!("invalid vertex id {:?}", fields[1]),
        })?;
        let w = if weighted && fields.len() == 3 {
            Weight::parse(fields[2]).map_err(|e| GraphError::Parse {
                line: number,
                message: e.to_string(),
            })?
        } else {
            Weight::ONE
        };
        edges.push((u, v, w));
    }
    Graph::from_edges(edges)
}

/// Wraps `source` in a gzip decoder when it starts with the gzip magic.
pub(crate) fn maybe_gunzip<'a, R: Read + 'a>(
    source: R,
) -> std::io::Result<BufReader<Box<dyn Read + 'a>>> {
    let mut reader = BufReader::new(source);
    let magic = {
        let buf = reader.fill_buf()?;
        buf.len() >= 2 && buf[0] == 0x1f && buf[1] == 0x8b
    };
    let inner: Box<dyn Read + 'a> = if magic {
        Box::new(GzDecoder::new(reader))
    } else {
        Box::new(reader)
    };
    Ok(BufReader::new(inner))
}
