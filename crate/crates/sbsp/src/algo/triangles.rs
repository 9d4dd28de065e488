//! Exact triangle counting.
//!
//! A triangle spans one, two, or three subgraphs. Triangles with at least
//! two co-located vertices have a local edge, so the subgraph owning that
//! edge finds them in superstep 0 by scanning local edges and testing for a
//! shared neighbor, which works even when the third vertex is remote
//! because remote IDs are visible in the adjacency. Only triangles spread
//! over three subgraphs need messages: a two-hop probe relay that mirrors
//! the vertex-centric protocol but runs only across remote edges.
//!
//! The ID ordering discipline (probes only travel towards higher IDs, the
//! local scan claims a triangle from its lowest-ID local edge) makes every
//! triangle reported exactly once.

use thiserror::Error;

use crate::engine::{
    self, ActivationMode, Algorithm, ComputeError, EngineConfig, EngineError, SuperstepContext,
};
use crate::graph::{Graph, VertexId};
use crate::metrics::RunMetrics;
use crate::subgraph::{Decomposition, Subgraph};
use crate::wire::{Reader, Writer};

/// How many subgraphs a triangle's vertices touch.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TriangleKind {
    /// All three vertices in one subgraph.
    Internal,
    /// Two vertices in one subgraph, the third elsewhere.
    TwoOne,
    /// Every vertex in a different subgraph.
    ThreeWay,
}

/// One triangle, with vertices in ascending order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriangleRecord {
    pub a: VertexId,
    pub b: VertexId,
    pub c: VertexId,
    pub kind: TriangleKind,
}

impl TriangleRecord {
    fn new(x: VertexId, y: VertexId, z: VertexId, kind: TriangleKind) -> TriangleRecord {
        let mut ids = [x, y, z];
        ids.sort_unstable();
        TriangleRecord {
            a: ids[0],
            b: ids[1],
            c: ids[2],
            kind,
        }
    }
}

#[derive(Debug, Error)]
pub enum TriangleError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("vertex-centric counting needs the singleton decomposition (one vertex per subgraph)")]
    NotSingleton,
}

/// Result of a counting run.
pub struct TriangleRun {
    /// All triangles, sorted ascending, free of duplicates.
    pub triangles: Vec<TriangleRecord>,
    pub metrics: RunMetrics,
}

impl TriangleRun {
    pub fn count(&self) -> u64 {
        self.triangles.len() as u64
    }
}

const TAG_PAIR: u8 = 1;
const TAG_TRIPLE: u8 = 2;
const TAG_VERTEX_ID: u8 = 3;

struct SubgraphCentric;

impl Algorithm for SubgraphCentric {
    type State = Vec<TriangleRecord>;

    fn init(&self, _: &Subgraph) -> Self::State {
        Vec::new()
    }

    fn compute(
        &self,
        found: &mut Self::State,
        subgraph: &Subgraph,
        ctx: &mut SuperstepContext<'_>,
    ) -> Result<(), ComputeError> {
        match ctx.superstep() {
            0 => {
                scan_local_edges(subgraph, found);
                // Probe over remote stubs towards higher IDs: the opening
                // move of the three-subgraph relay.
                for &v in subgraph.vertices() {
                    for stub in subgraph.remote_stubs(v) {
                        if stub.id > v {
                            let payload = Writer::new(TAG_PAIR).u64(v).u64(stub.id).finish();
                            ctx.send_to_vertex(stub.remote.unwrap(), stub.id, payload);
                        }
                    }
                }
            }
            1 => {
                // Forward ⟨v, w⟩ to w's higher remote neighbors u. A local
                // u cannot complete a three-subgraph triangle; triangles it
                // would complete were claimed by the local scan here.
                let probes = ctx
                    .inbox()
                    .iter()
                    .map(|e| decode_pair(&e.payload))
                    .collect::<Result<Vec<_>, _>>()?;
                for (v, w) in probes {
                    for neighbor in subgraph.neighbors(w).unwrap_or(&[]) {
                        if neighbor.id > w {
                            if let Some(owner) = neighbor.remote {
                                let payload = Writer::new(TAG_TRIPLE)
                                    .u64(v)
                                    .u64(w)
                                    .u64(neighbor.id)
                                    .finish();
                                ctx.send_to_vertex(owner, neighbor.id, payload);
                            }
                        }
                    }
                }
            }
            2 => {
                for envelope in ctx.inbox() {
                    let (v, w, u) = decode_triple(&envelope.payload)?;
                    // A local v means two of the three vertices live here,
                    // so the superstep-0 scan already owns this triangle.
                    if subgraph.has_neighbor(u, v) && !subgraph.contains(v) {
                        found.push(TriangleRecord::new(v, w, u, TriangleKind::ThreeWay));
                    }
                }
            }
            _ => {}
        }
        ctx.vote_to_halt();
        Ok(())
    }
}

/// Finds every triangle with a local edge, exactly once: for each local
/// edge (v, w) with v < w, shared neighbors z complete a triangle. Local z
/// must satisfy z > w so that of the three local edges of an internal
/// triangle only the lowest pair claims it; a remote z has exactly one
/// local edge in the whole decomposition, so no ordering filter is needed
/// (or allowed — the remote vertex may be the smallest of the three).
fn scan_local_edges(subgraph: &Subgraph, found: &mut Vec<TriangleRecord>) {
    for &v in subgraph.vertices() {
        let adj_v = subgraph.neighbors(v).unwrap_or(&[]);
        for w_entry in adj_v {
            if w_entry.is_remote() || w_entry.id <= v {
                continue;
            }
            let w = w_entry.id;
            let adj_w = subgraph.neighbors(w).unwrap_or(&[]);
            // Two-pointer intersection of the sorted adjacency lists.
            let (mut i, mut j) = (0, 0);
            while i < adj_v.len() && j < adj_w.len() {
                let (zi, zj) = (adj_v[i].id, adj_w[j].id);
                if zi < zj {
                    i += 1;
                } else if zi > zj {
                    j += 1;
                } else {
                    let z = &adj_v[i];
                    if z.is_remote() {
                        found.push(TriangleRecord::new(v, w, z.id, TriangleKind::TwoOne));
                    } else if z.id > w {
                        found.push(TriangleRecord::new(v, w, z.id, TriangleKind::Internal));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
}

struct VertexCentric;

impl Algorithm for VertexCentric {
    type State = u64;

    fn init(&self, _: &Subgraph) -> u64 {
        0
    }

    fn compute(
        &self,
        count: &mut u64,
        subgraph: &Subgraph,
        ctx: &mut SuperstepContext<'_>,
    ) -> Result<(), ComputeError> {
        let me = subgraph.vertices()[0];
        match ctx.superstep() {
            0 => {
                for neighbor in subgraph.neighbors(me).unwrap_or(&[]) {
                    if neighbor.id > me {
                        let owner = neighbor
                            .remote
                            .expect("singleton subgraphs have only remote neighbors");
                        let payload = Writer::new(TAG_VERTEX_ID).u64(me).finish();
                        ctx.send_to_vertex(owner, neighbor.id, payload);
                    }
                }
            }
            1 => {
                let received = ctx
                    .inbox()
                    .iter()
                    .map(|e| decode_vertex_id(&e.payload))
                    .collect::<Result<Vec<_>, _>>()?;
                for v in received {
                    for neighbor in subgraph.neighbors(me).unwrap_or(&[]) {
                        if neighbor.id > me {
                            let payload = Writer::new(TAG_PAIR).u64(v).u64(me).finish();
                            ctx.send_to_vertex(neighbor.remote.unwrap(), neighbor.id, payload);
                        }
                    }
                }
            }
            2 => {
                for envelope in ctx.inbox() {
                    let (v, _w) = decode_pair(&envelope.payload)?;
                    if subgraph.has_neighbor(me, v) {
                        *count += 1;
                    }
                }
            }
            _ => {}
        }
        ctx.vote_to_halt();
        Ok(())
    }
}

/// Subgraph-centric triangle counting over an existing decomposition.
/// Runs in at most 3 supersteps and halts early when no probes survive.
pub fn count_subgraph_centric(
    decomposition: &Decomposition,
    config: &EngineConfig,
) -> Result<TriangleRun, TriangleError> {
    let config = EngineConfig {
        activation: ActivationMode::Reactive,
        ..config.clone()
    };
    let (states, metrics) = engine::run(decomposition.subgraphs(), &SubgraphCentric, &config)?;
    let mut triangles: Vec<TriangleRecord> = states.into_iter().flatten().collect();
    triangles.sort_unstable();
    Ok(TriangleRun { triangles, metrics })
}

/// The vertex-centric baseline: every vertex is its own subgraph and sends
/// its ID towards higher neighbors, who forward once more. Always takes
/// three supersteps on any graph with an ordered wedge.
pub fn count_vertex_centric(
    decomposition: &Decomposition,
    config: &EngineConfig,
) -> Result<(u64, RunMetrics), TriangleError> {
    if decomposition
        .subgraphs()
        .iter()
        .any(|s| s.vertex_count() != 1)
    {
        return Err(TriangleError::NotSingleton);
    }
    let config = EngineConfig {
        activation: ActivationMode::Reactive,
        ..config.clone()
    };
    let (states, metrics) = engine::run(decomposition.subgraphs(), &VertexCentric, &config)?;
    Ok((states.into_iter().sum(), metrics))
}

/// Reference enumeration, independent of the engine: for every edge
/// (u, v) with u < v, shared neighbors above v close a triangle. Returns
/// lexicographically sorted triples.
pub fn enumerate_exact(graph: &Graph) -> Vec<(VertexId, VertexId, VertexId)> {
    let mut triples = Vec::new();
    for (u, v, _) in graph.edges() {
        let adj_u = graph.neighbors(u);
        let adj_v = graph.neighbors(v);
        let (mut i, mut j) = (0, 0);
        while i < adj_u.len() && j < adj_v.len() {
            let (zi, zj) = (adj_u[i].0, adj_v[j].0);
            if zi < zj {
                i += 1;
            } else if zi > zj {
                j += 1;
            } else {
                if zi > v {
                    triples.push((u, v, zi));
                }
                i += 1;
                j += 1;
            }
        }
    }
    triples.sort_unstable();
    triples
}

fn decode_pair(payload: &[u8]) -> Result<(VertexId, VertexId), ComputeError> {
    let err = || ComputeError::new("malformed pair probe");
    let (tag, mut r) = Reader::new(payload).map_err(|_| err())?;
    if tag != TAG_PAIR {
        return Err(err());
    }
    let v = r.u64().map_err(|_| err())?;
    let w = r.u64().map_err(|_| err())?;
    r.done().map_err(|_| err())?;
    Ok((v, w))
}

fn decode_triple(payload: &[u8]) -> Result<(VertexId, VertexId, VertexId), ComputeError> {
    let err = || ComputeError::new("malformed triple probe");
    let (tag, mut r) = Reader::new(payload).map_err(|_| err())?;
    if tag != TAG_TRIPLE {
        return Err(err());
    }
    let v = r.u64().map_err(|_| err())?;
    let w = r.u64().map_err(|_| err())?;
    let u = r.u64().map_err(|_| err())?;
    r.done().map_err(|_| err())?;
    Ok((v, w, u))
}

fn decode_vertex_id(payload: &[u8]) -> Result<VertexId, ComputeError> {
    let err = || ComputeError::new("malformed vertex id message");
    let (tag, mut r) = Reader::new(payload).map_err(|_| err())?;
    if tag != TAG_VERTEX_ID {
        return Err(err());
    }
    let v = r.u64().map_err(|_| err())?;
    r.done().map_err(|_| err())?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::load_edge_list;
    use crate::partition::PartitionAssignment;

    fn decompose(edges: &str, parts: &[(VertexId, u32)]) -> Decomposition {
        let g = load_edge_list(edges.as_bytes(), false).unwrap();
        let text: String = parts.iter().map(|(v, p)| format!("{v} {p}\n")).collect();
        let a = PartitionAssignment::from_reader(&g, text.as_bytes()).unwrap();
        Decomposition::extract(&g, &a).unwrap()
    }

    fn run_sc(d: &Decomposition) -> TriangleRun {
        count_subgraph_centric(d, &EngineConfig::default()).unwrap()
    }

    #[test]
    fn k3_in_one_partition() {
        let d = decompose("1 2\n2 3\n1 3", &[(1, 0), (2, 0), (3, 0)]);
        let run = run_sc(&d);
        assert_eq!(run.count(), 1);
        assert_eq!(run.triangles[0].kind, TriangleKind::Internal);
        assert_eq!(run.metrics.superstep_count(), 1);
    }

    #[test]
    fn k3_split_two_one_found_in_superstep_zero() {
        // All three ways of placing the lone vertex: the local scan must
        // find the triangle regardless of where the singleton sits in the
        // ID order.
        for lone in [1u64, 2, 3] {
            let parts: Vec<(VertexId, u32)> = [1u64, 2, 3]
                .iter()
                .map(|&v| (v, u32::from(v == lone)))
                .collect();
            let d = decompose("1 2\n2 3\n1 3", &parts);
            let run = run_sc(&d);
            assert_eq!(run.count(), 1, "lone vertex {lone}");
            assert_eq!(run.triangles[0].kind, TriangleKind::TwoOne);
            // The triangle itself is known after superstep 0; later
            // supersteps only drain probes that find nothing new.
            assert!(run.metrics.superstep_count() <= 3);
        }
    }

    #[test]
    fn k3_across_three_partitions_is_three_way() {
        let d = decompose("1 2\n2 3\n1 3", &[(1, 0), (2, 1), (3, 2)]);
        let run = run_sc(&d);
        assert_eq!(run.count(), 1);
        assert_eq!(run.triangles[0].kind, TriangleKind::ThreeWay);
        assert_eq!(run.metrics.superstep_count(), 3);
    }

    #[test]
    fn k4_counts_four_for_every_partitioning() {
        let edges = "1 2\n1 3\n1 4\n2 3\n2 4\n3 4";
        let g = load_edge_list(edges.as_bytes(), false).unwrap();
        for p in 1..=4u32 {
            for seed in 0..4u64 {
                let a = PartitionAssignment::hash(&g, p, seed).unwrap();
                let d = Decomposition::extract(&g, &a).unwrap();
                let run = run_sc(&d);
                assert_eq!(run.count(), 4, "p={p} seed={seed}");
                let unique: std::collections::BTreeSet<_> = run
                    .triangles
                    .iter()
                    .map(|t| (t.a, t.b, t.c))
                    .collect();
                assert_eq!(unique.len(), 4);
            }
        }
    }

    #[test]
    fn oracle_on_k5_and_star() {
        let k5: String = (1..=5u64)
            .flat_map(|u| ((u + 1)..=5).map(move |v| format!("{u} {v}")))
            .collect::<Vec<_>>()
            .join("\n");
        let g = load_edge_list(k5.as_bytes(), false).unwrap();
        assert_eq!(enumerate_exact(&g).len(), 10);

        let star: String = (1..=10u64)
            .map(|leaf| format!("0 {leaf}"))
            .collect::<Vec<_>>()
            .join("\n");
        let g = load_edge_list(star.as_bytes(), false).unwrap();
        assert!(enumerate_exact(&g).is_empty());
    }

    #[test]
    fn vertex_centric_k3_and_path() {
        let g = load_edge_list("1 2\n2 3\n1 3".as_bytes(), false).unwrap();
        let d = Decomposition::singletons(&g);
        let (count, metrics) = count_vertex_centric(&d, &EngineConfig::default()).unwrap();
        assert_eq!(count, 1);
        assert_eq!(metrics.superstep_count(), 3);
        // Superstep 0 sends one ID per ordered edge: m messages.
        assert_eq!(metrics.supersteps[0].envelopes, 3);

        let g = load_edge_list("1 2\n2 3".as_bytes(), false).unwrap();
        let d = Decomposition::singletons(&g);
        let (count, metrics) = count_vertex_centric(&d, &EngineConfig::default()).unwrap();
        assert_eq!(count, 0);
        // The wedge 1-2-3 forwards one probe whose membership test fails.
        assert_eq!(metrics.superstep_count(), 3);
    }

    #[test]
    fn vertex_centric_rejects_non_singleton() {
        let d = decompose("1 2\n2 3", &[(1, 0), (2, 0), (3, 0)]);
        assert!(matches!(
            count_vertex_centric(&d, &EngineConfig::default()),
            Err(TriangleError::NotSingleton)
        ));
    }

    #[test]
    fn two_superstep_halt_when_no_triples_survive() {
        // K3 with a 2+1 split emits pair probes but no triple probes.
        let d = decompose("1 2\n2 3\n1 3", &[(1, 0), (2, 0), (3, 1)]);
        let run = run_sc(&d);
        assert_eq!(run.metrics.superstep_count(), 2);
        assert_eq!(run.count(), 1);
    }
}
