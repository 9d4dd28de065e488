//! Decomposition of a partitioned graph into subgraphs.
//!
//! A subgraph is one weakly connected component of the partition-induced
//! graph. Local vertices carry their full adjacency; edges leaving the
//! partition appear as remote stubs that expose only the far vertex ID and
//! the subgraph owning it.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, VertexId};
use crate::partition::PartitionAssignment;
use crate::weight::Weight;

/// Identifier of a subgraph: partition ID in the high 32 bits, component
/// index within the partition in the low 32 bits. Deterministic for a fixed
/// (graph, assignment), orderable, and the minimum ID doubles as the master.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SubgraphId(u64);

impl SubgraphId {
    pub fn new(partition: u32, component: u32) -> SubgraphId {
        SubgraphId(((partition as u64) << 32) | component as u64)
    }

    pub fn partition(self) -> u32 {
        (self.0 >> 32) as u32
    }

    pub fn component(self) -> u32 {
        self.0 as u32
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn from_raw(raw: u64) -> SubgraphId {
        SubgraphId(raw)
    }
}

impl fmt::Display for SubgraphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.partition(), self.component())
    }
}

impl fmt::Debug for SubgraphId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SubgraphId({self})")
    }
}

/// One adjacency entry of a local vertex. `remote` is `None` for neighbors
/// inside the same subgraph and names the owning subgraph otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Neighbor {
    pub id: VertexId,
    pub weight: Weight,
    pub remote: Option<SubgraphId>,
}

impl Neighbor {
    pub fn is_remote(&self) -> bool {
        self.remote.is_some()
    }
}

/// A weakly connected component of one partition, with remote edge stubs.
#[derive(Clone, Debug)]
pub struct Subgraph {
    id: SubgraphId,
    vertices: Vec<VertexId>,
    adjacency: Vec<Vec<Neighbor>>,
    local_edge_count: usize,
    remote_stub_count: usize,
}

impl Subgraph {
    pub fn id(&self) -> SubgraphId {
        self.id
    }

    /// Local vertices in ascending order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// All neighbors of a local vertex (local and remote), sorted by ID.
    /// Returns `None` when `v` is not local to this subgraph.
    pub fn neighbors(&self, v: VertexId) -> Option<&[Neighbor]> {
        let idx = self.vertices.binary_search(&v).ok()?;
        Some(&self.adjacency[idx])
    }

    /// Membership test `other ∈ adj(v)`, visible for both local and remote
    /// neighbor IDs.
    pub fn has_neighbor(&self, v: VertexId, other: VertexId) -> bool {
        self.neighbors(v)
            .map(|adj| adj.binary_search_by_key(&other, |n| n.id).is_ok())
            .unwrap_or(false)
    }

    pub fn remote_stubs(&self, v: VertexId) -> impl Iterator<Item = &Neighbor> + '_ {
        self.neighbors(v)
            .unwrap_or(&[])
            .iter()
            .filter(|n| n.is_remote())
    }

    /// Undirected edges with both endpoints local, each counted once.
    pub fn local_edge_count(&self) -> usize {
        self.local_edge_count
    }

    /// Remote stubs, i.e. (local vertex, remote vertex) ordered pairs.
    pub fn remote_stub_count(&self) -> usize {
        self.remote_stub_count
    }

    pub fn is_boundary(&self, v: VertexId) -> bool {
        self.remote_stubs(v).next().is_some()
    }
}

/// Aggregate statistics over a decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecompositionStats {
    /// Largest local vertex count over all subgraphs.
    pub max_local_vertices: usize,
    /// Largest remote stub count over all subgraphs.
    pub max_remote_stubs: usize,
    pub subgraph_count: usize,
}

#[derive(Debug, Error)]
pub enum DecompositionError {
    #[error("vertex {0} is not covered by the partition assignment")]
    UnassignedVertex(VertexId),
}

/// All subgraphs of a (graph, assignment) pair, sorted by ID, plus the
/// vertex ownership map.
pub struct Decomposition {
    subgraphs: Vec<Subgraph>,
    owner: HashMap<VertexId, SubgraphId>,
}

impl Decomposition {
    /// Splits each partition into weakly connected components and wires up
    /// remote stubs. Component indexes are assigned in ascending order of
    /// each component's minimum vertex ID, so the result is a pure function
    /// of its inputs.
    pub fn extract(
        graph: &Graph,
        assignment: &PartitionAssignment,
    ) -> Result<Decomposition, DecompositionError> {
        for &v in graph.vertices() {
            if assignment.partition_of(v).is_none() {
                return Err(DecompositionError::UnassignedVertex(v));
            }
        }

        // Partition-local union-find over vertex positions in the sorted
        // global vertex list.
        let ids = graph.vertices();
        let position: HashMap<VertexId, usize> =
            ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..ids.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (u, v, _) in graph.edges() {
            if assignment.partition_of(u) == assignment.partition_of(v) {
                let (ru, rv) = (find(&mut parent, position[&u]), find(&mut parent, position[&v]));
                if ru != rv {
                    // Union by smaller position keeps the root at the
                    // component's minimum vertex ID.
                    let (lo, hi) = (ru.min(rv), ru.max(rv));
                    parent[hi] = lo;
                }
            }
        }

        // Components per partition, keyed by root position. Iterating the
        // sorted vertex list visits each component's minimum vertex first,
        // which yields the deterministic component numbering.
        let mut component_index: HashMap<usize, u32> = HashMap::new();
        let mut next_component: HashMap<u32, u32> = HashMap::new();
        let mut owner: HashMap<VertexId, SubgraphId> = HashMap::with_capacity(ids.len());
        let mut members: HashMap<SubgraphId, Vec<VertexId>> = HashMap::new();
        for (pos, &v) in ids.iter().enumerate() {
            let part = assignment.partition_of(v).unwrap();
            let root = find(&mut parent, pos);
            let comp = *component_index.entry(root).or_insert_with(|| {
                let next = next_component.entry(part).or_insert(0);
                let c = *next;
                *next += 1;
                c
            });
            let id = SubgraphId::new(part, comp);
            owner.insert(v, id);
            members.entry(id).or_default().push(v);
        }

        let mut subgraphs: Vec<Subgraph> = members
            .into_iter()
            .map(|(id, vertices)| {
                let mut local_edge_count = 0;
                let mut remote_stub_count = 0;
                let adjacency = vertices
                    .iter()
                    .map(|&v| {
                        graph
                            .neighbors(v)
                            .iter()
                            .map(|&(nbr, weight)| {
                                let nbr_owner = owner[&nbr];
                                if nbr_owner == id {
                                    if v < nbr {
                                        local_edge_count += 1;
                                    }
                                    Neighbor {
                                        id: nbr,
                                        weight,
                                        remote: None,
                                    }
                                } else {
                                    remote_stub_count += 1;
                                    Neighbor {
                                        id: nbr,
                                        weight,
                                        remote: Some(nbr_owner),
                                    }
                                }
                            })
                            .collect()
                    })
                    .collect();
                Subgraph {
                    id,
                    vertices,
                    adjacency,
                    local_edge_count,
                    remote_stub_count,
                }
            })
            .collect();
        subgraphs.sort_by_key(Subgraph::id);
        Ok(Decomposition { subgraphs, owner })
    }

    /// Convenience for the one-subgraph-per-vertex decomposition used by
    /// vertex-centric algorithms.
    pub fn singletons(graph: &Graph) -> Decomposition {
        Decomposition::extract(graph, &PartitionAssignment::singletons(graph))
            .expect("singleton assignment covers every vertex")
    }

    pub fn subgraphs(&self) -> &[Subgraph] {
        &self.subgraphs
    }

    pub fn owner_of(&self, v: VertexId) -> Option<SubgraphId> {
        self.owner.get(&v).copied()
    }

    pub fn stats(&self) -> DecompositionStats {
        DecompositionStats {
            max_local_vertices: self
                .subgraphs
                .iter()
                .map(Subgraph::vertex_count)
                .max()
                .unwrap_or(0),
            max_remote_stubs: self
                .subgraphs
                .iter()
                .map(Subgraph::remote_stub_count)
                .max()
                .unwrap_or(0),
            subgraph_count: self.subgraphs.len(),
        }
    }

    pub fn total_remote_stubs(&self) -> usize {
        self.subgraphs.iter().map(Subgraph::remote_stub_count).sum()
    }
}
