//! Vertex-to-partition assignments.
//!
//! Partitions are normally produced offline by a dedicated partitioner and
//! loaded from a file; the seeded hash partitioner here exists so the crate
//! is self-contained for tests and quick experiments.

use std::collections::HashMap;
use std::io::{BufRead, Read};

use thiserror::Error;

use crate::graph::{maybe_gunzip, Graph, VertexId};

/// A total map from every vertex of a graph to a partition in `[0, p)`.
#[derive(Clone, Debug)]
pub struct PartitionAssignment {
    map: HashMap<VertexId, u32>,
    partition_count: u32,
}

#[derive(Debug, Error)]
pub enum PartitionError {
    #[error("partition count must be at least 1")]
    ZeroPartitions,
    #[error("requested {requested} partitions for a graph with {vertices} vertices")]
    TooManyPartitions { requested: u32, vertices: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("vertex {0} has no partition assignment")]
    MissingVertex(VertexId),
    #[error("vertex {0} assigned more than once")]
    DuplicateVertex(VertexId),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
    #[error("partition {0} is empty, making the partition count ambiguous")]
    PartitionGap(u32),
    #[error("partition file has {lines} entries but the graph has {vertices} vertices")]
    LineCountMismatch { lines: usize, vertices: usize },
    #[error("i/o error reading partition file: {0}")]
    Io(#[from] std::io::Error),
}

impl PartitionAssignment {
    /// Deterministic seeded partitioning into `p` non-empty, near-balanced
    /// parts: vertices are ordered by a keyed hash and dealt round-robin.
    pub fn hash(graph: &Graph, p: u32, seed: u64) -> Result<PartitionAssignment, PartitionError> {
        if p == 0 {
            return Err(PartitionError::ZeroPartitions);
        }
        if p as usize > graph.vertex_count() {
            return Err(PartitionError::TooManyPartitions {
                requested: p,
                vertices: graph.vertex_count(),
            });
        }
        let mut keyed: Vec<(u64, VertexId)> = graph
            .vertices()
            .iter()
            .map(|&v| (mix64(v ^ mix64(seed)), v))
            .collect();
        keyed.sort_unstable();
        let map = keyed
            .iter()
            .enumerate()
            .map(|(i, &(_, v))| (v, (i % p as usize) as u32))
            .collect();
        Ok(PartitionAssignment {
            map,
            partition_count: p,
        })
    }

    /// One partition per vertex: the i-th smallest vertex ID goes to
    /// partition i. This is the degenerate decomposition used by
    /// vertex-centric algorithms.
    pub fn singletons(graph: &Graph) -> PartitionAssignment {
        let map = graph
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        PartitionAssignment {
            map,
            partition_count: graph.vertex_count() as u32,
        }
    }

    /// Loads an externally computed partition file. Two layouts are
    /// auto-detected by column count:
    ///
    /// * one column: line i holds the partition of the i-th smallest vertex
    ///   ID (the layout emitted by index-based partitioners);
    /// * two columns: explicit `vertexId partitionId` pairs.
    ///
    /// Gzip input is detected by magic bytes. Every graph vertex must be
    /// covered and the used partition IDs must be gap-free.
    pub fn from_reader<R: Read>(
        graph: &Graph,
        source: R,
    ) -> Result<PartitionAssignment, PartitionError> {
        let reader = maybe_gunzip(source)?;
        let mut columns: Option<usize> = None;
        let mut entries: Vec<(usize, Vec<u64>)> = Vec::new();
        for (number, line) in reader.lines().enumerate() {
            let line = line?;
            let number = number + 1;
            let text = line.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = text.split_whitespace().collect();
            let expected = *columns.get_or_insert(fields.len());
            if fields.len() != expected || !(1..=2).contains(&fields.len()) {
                return Err(PartitionError::Parse {
                    line: number,
                    message: format!("expected {expected} column(s), got {}", fields.len()),
                });
            }
            let values = fields
                .iter()
                .map(|f| {
                    f.parse::<u64>().map_err(|_| PartitionError::Parse {
                        line: number,
                        message: format!("invalid integer {f:?}"),
                    })
                })
                .collect::<Result<Vec<u64>, _>>()?;
            entries.push((number, values));
        }

        let mut map: HashMap<VertexId, u32> = HashMap::with_capacity(graph.vertex_count());
        match columns {
            Some(1) => {
                if entries.len() != graph.vertex_count() {
                    return Err(PartitionError::LineCountMismatch {
                        lines: entries.len(),
                        vertices: graph.vertex_count(),
                    });
                }
                for (&vertex, (line, values)) in graph.vertices().iter().zip(&entries) {
                    let part = narrow_partition(*line, values[0])?;
                    map.insert(vertex, part);
                }
            }
            Some(2) => {
                for (line, values) in &entries {
                    let vertex = values[0];
                    if !graph.contains_vertex(vertex) {
                        return Err(PartitionError::UnknownVertex(vertex));
                    }
                    let part = narrow_partition(*line, values[1])?;
                    if map.insert(vertex, part).is_some() {
                        return Err(PartitionError::DuplicateVertex(vertex));
                    }
                }
            }
            _ => {
                return Err(PartitionError::LineCountMismatch {
                    lines: 0,
                    vertices: graph.vertex_count(),
                })
            }
        }

        for &vertex in graph.vertices() {
            if !map.contains_key(&vertex) {
                return Err(PartitionError::MissingVertex(vertex));
            }
        }
        let partition_count = map.values().copied().max().unwrap_or(0) + 1;
        let mut used = vec![false; partition_count as usize];
        for &p in map.values() {
            used[p as usize] = true;
        }
        if let Some(gap) = used.iter().position(|&u| !u) {
            return Err(PartitionError::PartitionGap(gap as u32));
        }
        Ok(PartitionAssignment {
            map,
            partition_count,
        })
    }

    pub fn partition_count(&self) -> u32 {
        self.partition_count
    }

    /// Partition of `v`, or `None` when `v` was never assigned.
    pub fn partition_of(&self, v: VertexId) -> Option<u32> {
        self.map.get(&v).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

fn narrow_partition(line: usize, value: u64) -> Result<u32, PartitionError> {
    u32::try_from(value).map_err(|_| PartitionError::Parse {
        line,
        message: format!("partition id {value} out of range"),
    })
}

/// splitmix64 finalizer; a cheap, well-mixed keyed hash.
pub(crate) fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list;

    fn k4() -> Graph {
        load_edge_list("1 2\n1 3\n1 4\n2 3\n2 4\n3 4".as_bytes(), false).unwrap()
    }

    #[test]
    fn single_partition_holds_everything() {
        let g = k4();
        let a = PartitionAssignment::hash(&g, 1, 123).unwrap();
        assert!(g.vertices().iter().all(|&v| a.partition_of(v) == Some(0)));
    }

    #[test]
    fn hash_is_deterministic() {
        let g = k4();
        let a = PartitionAssignment::hash(&g, 2, 7).unwrap();
        let b = PartitionAssignment::hash(&g, 2, 7).unwrap();
        for &v in g.vertices() {
            assert_eq!(a.partition_of(v), b.partition_of(v));
        }
    }

    #[test]
    fn all_partitions_nonempty() {
        let g = load_edge_list(
            (0..50)
                .map(|i| format!("{} {}", i, i + 1))
                .collect::<Vec<_>>()
                .join("\n")
                .as_bytes(),
            false,
        )
        .unwrap();
        for p in [1u32, 2, 4, 8, 51] {
            let a = PartitionAssignment::hash(&g, p, 99).unwrap();
            let mut sizes = vec![0usize; p as usize];
            for &v in g.vertices() {
                sizes[a.partition_of(v).unwrap() as usize] += 1;
            }
            assert!(sizes.iter().all(|&s| s >= 1), "p={p} sizes={sizes:?}");
        }
    }

    #[test]
    fn rejects_bad_partition_counts() {
        let g = k4();
        assert!(matches!(
            PartitionAssignment::hash(&g, 0, 0),
            Err(PartitionError::ZeroPartitions)
        ));
        assert!(matches!(
            PartitionAssignment::hash(&g, 5, 0),
            Err(PartitionError::TooManyPartitions { .. })
        ));
    }

    #[test]
    fn index_format_maps_sorted_vertices() {
        let g = load_edge_list("1 2\n2 3".as_bytes(), false).unwrap();
        let a = PartitionAssignment::from_reader(&g, "0\n0\n1\n".as_bytes()).unwrap();
        assert_eq!(a.partition_of(1), Some(0));
        assert_eq!(a.partition_of(2), Some(0));
        assert_eq!(a.partition_of(3), Some(1));
        assert_eq!(a.partition_count(), 2);
    }

    #[test]
    fn pair_format_is_explicit() {
        let g = load_edge_list("5 9".as_bytes(), false).unwrap();
        let a = PartitionAssignment::from_reader(&g, "5 1\n9 0\n".as_bytes()).unwrap();
        assert_eq!(a.partition_of(5), Some(1));
        assert_eq!(a.partition_of(9), Some(0));
    }

    #[test]
    fn missing_vertex_is_an_error() {
        let g = load_edge_list("1 2\n2 3".as_bytes(), false).unwrap();
        let err = PartitionAssignment::from_reader(&g, "1 0\n2 0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, PartitionError::MissingVertex(3)));
        let err = PartitionAssignment::from_reader(&g, "0\n0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, PartitionError::LineCountMismatch { .. }));
    }

    #[test]
    fn partition_gap_is_an_error() {
        let g = load_edge_list("1 2\n2 3".as_bytes(), false).unwrap();
        let err = PartitionAssignment::from_reader(&g, "0\n2\n0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, PartitionError::PartitionGap(1)));
    }

    #[test]
    fn duplicate_and_unknown_vertices_rejected() {
        let g = load_edge_list("1 2".as_bytes(), false).unwrap();
        assert!(matches!(
            PartitionAssignment::from_reader(&g, "1 0\n1 0\n2 0\n".as_bytes()),
            Err(PartitionError::DuplicateVertex(1))
        ));
        assert!(matches!(
            PartitionAssignment::from_reader(&g, "1 0\n7 0\n".as_bytes()),
            Err(PartitionError::UnknownVertex(7))
        ));
    }

    #[test]
    fn singletons_cover_every_vertex() {
        let g = k4();
        let a = PartitionAssignment::singletons(&g);
        assert_eq!(a.partition_count(), 4);
        let mut parts: Vec<u32> = g
            .vertices()
            .iter()
            .map(|&v| a.partition_of(v).unwrap())
            .collect();
        parts.sort_unstable();
        assert_eq!(parts, vec![0, 1, 2, 3]);
    }
}
