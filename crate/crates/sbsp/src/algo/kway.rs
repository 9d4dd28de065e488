//! Randomized k-way clustering.
//!
//! Each round: every subgraph samples up to k local vertices with random
//! keys and broadcasts them; everyone independently picks the same k
//! smallest-key vertices as centers; a multi-source BFS labels every vertex
//! with its nearest center (ties to the smaller center ID); the edge cut
//! between clusters is counted and broadcast. If the cut is above the
//! threshold the labels are wiped and a new round begins with fresh
//! centers.
//!
//! The phase machine runs in lockstep: the only phase transition that is
//! not self-timed (leaving ASSIGN_CLUSTER) is triggered by a master
//! broadcast, so no barrier ever observes two subgraphs in different
//! phases.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::engine::{
    self, ActivationMode, Algorithm, ComputeError, EngineConfig, EngineError, SuperstepContext,
};
use crate::graph::VertexId;
use crate::metrics::RunMetrics;
use crate::subgraph::{Decomposition, Subgraph, SubgraphId};
use crate::wire::{Reader, Writer};

#[derive(Clone, Debug)]
pub struct KwayConfig {
    /// Number of cluster centers.
    pub k: usize,
    /// Maximum acceptable edge cut between clusters.
    pub tau: u64,
    /// Rounds to attempt before settling for the best clustering seen.
    pub max_rounds: u32,
    pub seed: u64,
}

impl Default for KwayConfig {
    fn default() -> Self {
        KwayConfig {
            k: 2,
            tau: 0,
            max_rounds: 50,
            seed: 0,
        }
    }
}

#[derive(Debug, Error)]
pub enum KwayError {
    #[error("k must be between 1 and the vertex count ({n}), got {k}")]
    InvalidK { k: usize, n: usize },
    #[error("max rounds must be at least 1")]
    ZeroRounds,
    #[error("cannot select {need} centers: subgraphs can supply only {have} candidates")]
    InsufficientCandidates { have: usize, need: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Final clustering. `assignment` maps every vertex to its center, `None`
/// for vertices unreachable from every center (possible on disconnected
/// graphs when a component held no center in the final round).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    pub assignment: BTreeMap<VertexId, Option<VertexId>>,
    /// Consensus center list, in selection order.
    pub centers: Vec<VertexId>,
    /// Edges whose endpoints carry different labels.
    pub cut: u64,
    /// Rounds executed.
    pub rounds: u32,
    /// Whether `cut <= tau`; `false` means the round budget ran out and
    /// this is the minimum-cut clustering seen.
    pub threshold_met: bool,
}

pub struct KwayRun {
    pub clustering: Clustering,
    pub metrics: RunMetrics,
    /// Center lists as each subgraph recorded them, for consensus checks.
    pub per_subgraph_centers: Vec<(SubgraphId, Vec<VertexId>)>,
}

/// Phase tags of the per-subgraph state machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    RandomKLocal,
    TopKGlobal,
    AssignCluster,
    EdgeCut,
    EdgeCount,
    Finish,
}

type Label = (u64, VertexId);

#[derive(Clone, Debug)]
struct RoundSnapshot {
    cut: u64,
    round: u32,
    centers: Vec<VertexId>,
    labels: BTreeMap<VertexId, Label>,
}

/// Per-subgraph state. Exposed read-only so callers can observe phases and
/// verify cross-subgraph invariants superstep by superstep.
pub struct KwayState {
    phase: Phase,
    round: u32,
    centers: Vec<VertexId>,
    labels: BTreeMap<VertexId, Label>,
    best: Option<RoundSnapshot>,
    outcome: Option<RoundSnapshot>,
    threshold_met: bool,
}

impl KwayState {
    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn centers(&self) -> &[VertexId] {
        &self.centers
    }
}

const TAG_CANDIDATES: u8 = 1;
const TAG_BFS_UPDATE: u8 = 2;
const TAG_ASSIGNED: u8 = 3;
const TAG_PHASE_EDGE_CUT: u8 = 4;
const TAG_CUT_NOTIFY: u8 = 5;
const TAG_CUT_COUNT: u8 = 6;

struct Kway {
    config: KwayConfig,
}

impl Algorithm for Kway {
    type State = KwayState;

    fn init(&self, _: &Subgraph) -> KwayState {
        KwayState {
            phase: Phase::RandomKLocal,
            round: 0,
            centers: Vec::new(),
            labels: BTreeMap::new(),
            best: None,
            outcome: None,
            threshold_met: false,
        }
    }

    fn compute(
        &self,
        state: &mut KwayState,
        subgraph: &Subgraph,
        ctx: &mut SuperstepContext<'_>,
    ) -> Result<(), ComputeError> {
        match state.phase {
            Phase::RandomKLocal => self.select_local_candidates(state, subgraph, ctx),
            Phase::TopKGlobal => self.select_global_centers(state, subgraph, ctx),
            Phase::AssignCluster => self.assign_clusters(state, subgraph, ctx),
            Phase::EdgeCut => self.notify_edge_cuts(state, subgraph, ctx),
            Phase::EdgeCount => self.count_edge_cuts(state, subgraph, ctx),
            Phase::Finish => self.decide_finish(state, ctx),
        }
    }
}

impl Kway {
    fn rng_for(&self, subgraph: SubgraphId, round: u32) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.config.seed ^ subgraph.raw() ^ round as u64)
    }

    /// RANDOM_K_LOCAL: sample min(k, |local|) distinct vertices uniformly
    /// without replacement, pair each with a fresh random key, broadcast.
    fn select_local_candidates(
        &self,
        state: &mut KwayState,
        subgraph: &Subgraph,
        ctx: &mut SuperstepContext<'_>,
    ) -> Result<(), ComputeError> {
        let mut rng = self.rng_for(subgraph.id(), state.round);
        let candidates = sample_candidates(subgraph.vertices(), self.config.k, &mut rng);
        let mut writer = Writer::new(TAG_CANDIDATES);
        for &(vertex, key) in &candidates {
            writer = writer.u64(vertex).u64(key);
        }
        ctx.send_to_all(writer.finish());
        state.phase = Phase::TopKGlobal;
        Ok(())
    }

    /// TOP_K_GLOBAL: every subgraph sorts the same candidate multiset by
    /// (key, vertexId) and takes the first k, so all center lists agree
    /// without further coordination. Locally owned centers are seeded for
    /// the BFS by a self-send at distance 0.
    fn select_global_centers(
        &self,
        state: &mut KwayState,
        subgraph: &Subgraph,
        ctx: &mut SuperstepContext<'_>,
    ) -> Result<(), ComputeError> {
        let mut candidates: Vec<(u64, VertexId)> = Vec::new();
        for envelope in ctx.inbox() {
            let (tag, mut r) = Reader::new(&envelope.payload)
                .map_err(|_| ComputeError::new("malformed candidate broadcast"))?;
            if tag != TAG_CANDIDATES {
                return Err(ComputeError::new(format!(
                    "unexpected message tag {tag} in TOP_K_GLOBAL"
                )));
            }
            while r.remaining_u64s() >= 2 {
                let vertex = r.u64().unwrap();
                let key = r.u64().unwrap();
                candidates.push((key, vertex));
            }
            r.done()
                .map_err(|_| ComputeError::new("trailing bytes in candidate broadcast"))?;
        }
        candidates.sort_unstable();
        candidates.dedup_by_key(|&mut (_, v)| v);
        if candidates.len() < self.config.k {
            return Err(ComputeError::new(format!(
                "insufficient candidates: have {}, need {}",
                candidates.len(),
                self.config.k
            )));
        }
        state.centers = candidates[..self.config.k]
            .iter()
            .map(|&(_, v)| v)
            .collect();
        for &center in &state.centers {
            if subgraph.contains(center) {
                let payload = Writer::new(TAG_BFS_UPDATE)
                    .u64(center)
                    .u64(0)
                    .u64(center)
                    .finish();
                ctx.send_to_vertex(subgraph.id(), center, payload);
            }
        }
        state.phase = Phase::AssignCluster;
        Ok(())
    }

    /// ASSIGN_CLUSTER: relax (distance, center) labels to the local
    /// fixpoint, push improvements over remote edges, and report ASSIGNED
    /// to the master on quiescent supersteps. The master flips everyone to
    /// EDGE_CUT once all subgraphs were quiescent in the same superstep.
    fn assign_clusters(
        &self,
        state: &mut KwayState,
        subgraph: &Subgraph,
        ctx: &mut SuperstepContext<'_>,
    ) -> Result<(), ComputeError> {
        let mut updates: Vec<(VertexId, u64, VertexId)> = Vec::new();
        let mut assigned_reports = 0usize;
        let mut phase_change = false;
        for envelope in ctx.inbox() {
            let (tag, mut r) = Reader::new(&envelope.payload)
                .map_err(|_| ComputeError::new("malformed message in ASSIGN_CLUSTER"))?;
            match tag {
                TAG_BFS_UPDATE => {
                    let vertex = r.u64().map_err(|_| ComputeError::new("short BFS update"))?;
                    let dist = r.u64().map_err(|_| ComputeError::new("short BFS update"))?;
                    let center = r.u64().map_err(|_| ComputeError::new("short BFS update"))?;
                    updates.push((vertex, dist, center));
                }
                TAG_ASSIGNED => assigned_reports += 1,
                TAG_PHASE_EDGE_CUT => phase_change = true,
                other => {
                    return Err(ComputeError::new(format!(
                        "unexpected message tag {other} in ASSIGN_CLUSTER"
                    )))
                }
            }
        }
        if phase_change {
            if !updates.is_empty() {
                return Err(ComputeError::new(
                    "BFS update arrived alongside the EDGE_CUT phase change",
                ));
            }
            state.phase = Phase::EdgeCut;
            return self.notify_edge_cuts(state, subgraph, ctx);
        }

        let remote_updates = local_bfs(subgraph, &mut state.labels, &updates);
        let quiescent = remote_updates.is_empty();
        for (owner, vertex, dist, center) in remote_updates {
            let payload = Writer::new(TAG_BFS_UPDATE)
                .u64(vertex)
                .u64(dist)
                .u64(center)
                .finish();
            ctx.send_to_vertex(owner, vertex, payload);
        }
        if quiescent {
            // Re-sent every quiescent superstep so the master can observe
            // all subgraphs quiescent within a single superstep.
            ctx.send_to_master(Writer::new(TAG_ASSIGNED).finish());
        }
        if ctx.is_master() && assigned_reports == ctx.subgraph_count() {
            ctx.send_to_all(Writer::new(TAG_PHASE_EDGE_CUT).finish());
        }
        Ok(())
    }

    /// EDGE_CUT: send each boundary vertex's center over remote stubs
    /// towards higher IDs, so each crossing edge is examined exactly once.
    fn notify_edge_cuts(
        &self,
        state: &mut KwayState,
        subgraph: &Subgraph,
        ctx: &mut SuperstepContext<'_>,
    ) -> Result<(), ComputeError> {
        for &v in subgraph.vertices() {
            let center = state.labels.get(&v).map(|&(_, c)| c);
            for stub in subgraph.remote_stubs(v) {
                if stub.id > v {
                    let payload = Writer::new(TAG_CUT_NOTIFY)
                        .u64(stub.id)
                        .u64(u64::from(center.is_some()))
                        .u64(center.unwrap_or(0))
                        .finish();
                    ctx.send_to_vertex(stub.remote.unwrap(), stub.id, payload);
                }
            }
        }
        state.phase = Phase::EdgeCount;
        Ok(())
    }

    /// EDGE_COUNT: local cut from local edges, remote cut from received
    /// notifications; broadcast the sum. Each crossing edge contributes
    /// exactly once to the global total.
    fn count_edge_cuts(
        &self,
        state: &mut KwayState,
        subgraph: &Subgraph,
        ctx: &mut SuperstepContext<'_>,
    ) -> Result<(), ComputeError> {
        let mut remote_cuts = 0u64;
        for envelope in ctx.inbox() {
            let (tag, mut r) = Reader::new(&envelope.payload)
                .map_err(|_| ComputeError::new("malformed message in EDGE_COUNT"))?;
            match tag {
                TAG_CUT_NOTIFY => {
                    let vertex = r.u64().map_err(|_| ComputeError::new("short cut notify"))?;
                    let has = r.u64().map_err(|_| ComputeError::new("short cut notify"))?;
                    let center = r.u64().map_err(|_| ComputeError::new("short cut notify"))?;
                    let far_center = (has != 0).then_some(center);
                    let local_center = state.labels.get(&vertex).map(|&(_, c)| c);
                    if local_center != far_center {
                        remote_cuts += 1;
                    }
                }
                // The master's own quiescent report from the superstep of
                // the phase broadcast still drains here.
                TAG_ASSIGNED => {}
                other => {
                    return Err(ComputeError::new(format!(
                        "unexpected message tag {other} in EDGE_COUNT"
                    )))
                }
            }
        }
        let mut local_cuts = 0u64;
        for &v in subgraph.vertices() {
            let center_v = state.labels.get(&v).map(|&(_, c)| c);
            for neighbor in subgraph.neighbors(v).unwrap_or(&[]) {
                if !neighbor.is_remote() && v < neighbor.id {
                    let center_w = state.labels.get(&neighbor.id).map(|&(_, c)| c);
                    if center_v != center_w {
                        local_cuts += 1;
                    }
                }
            }
        }
        ctx.send_to_all(
            Writer::new(TAG_CUT_COUNT)
                .u64(local_cuts + remote_cuts)
                .finish(),
        );
        state.phase = Phase::Finish;
        Ok(())
    }

    /// FINISH: sum everyone's cut counts; halt when under threshold or out
    /// of rounds, otherwise wipe the labels and restart.
    fn decide_finish(
        &self,
        state: &mut KwayState,
        ctx: &mut SuperstepContext<'_>,
    ) -> Result<(), ComputeError> {
        let mut total = 0u64;
        let mut reports = 0usize;
        for envelope in ctx.inbox() {
            let (tag, mut r) = Reader::new(&envelope.payload)
                .map_err(|_| ComputeError::new("malformed message in FINISH"))?;
            match tag {
                TAG_CUT_COUNT => {
                    total += r.u64().map_err(|_| ComputeError::new("short cut count"))?;
                    reports += 1;
                }
                other => {
                    return Err(ComputeError::new(format!(
                        "unexpected message tag {other} in FINISH"
                    )))
                }
            }
        }
        if reports != ctx.subgraph_count() {
            return Err(ComputeError::new(format!(
                "FINISH expected {} cut reports, got {reports}",
                ctx.subgraph_count()
            )));
        }

        let snapshot = RoundSnapshot {
            cut: total,
            round: state.round,
            centers: state.centers.clone(),
            labels: state.labels.clone(),
        };
        if total <= self.config.tau {
            state.outcome = Some(snapshot);
            state.threshold_met = true;
            ctx.vote_to_halt();
            return Ok(());
        }
        if state.best.as_ref().map_or(true, |b| total < b.cut) {
            state.best = Some(snapshot);
        }
        if state.round + 1 == self.config.max_rounds {
            state.outcome = state.best.take();
            state.threshold_met = false;
            ctx.vote_to_halt();
            return Ok(());
        }
        state.round += 1;
        state.labels.clear();
        state.centers.clear();
        state.phase = Phase::RandomKLocal;
        Ok(())
    }
}

/// Uniform sample of min(k, n) distinct vertices via partial Fisher-Yates,
/// each paired with an independent random key.
fn sample_candidates(
    vertices: &[VertexId],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(VertexId, u64)> {
    let take = k.min(vertices.len());
    let mut pool: Vec<VertexId> = vertices.to_vec();
    let mut picked = Vec::with_capacity(take);
    for i in 0..take {
        let j = rng.gen_range(i..pool.len());
        pool.swap(i, j);
        picked.push((pool[i], rng.gen::<u64>()));
    }
    picked
}

/// Multi-source label-correcting BFS inside one subgraph. A vertex adopts
/// label (d, c) iff it is lexicographically smaller than its current one.
/// Returns the boundary improvements to forward, one per remote stub of
/// each improved vertex, built from final labels only.
fn local_bfs(
    subgraph: &Subgraph,
    labels: &mut BTreeMap<VertexId, Label>,
    seeds: &[(VertexId, u64, VertexId)],
) -> Vec<(SubgraphId, VertexId, u64, VertexId)> {
    fn adopt(labels: &mut BTreeMap<VertexId, Label>, v: VertexId, candidate: Label) -> bool {
        let better = match labels.get(&v) {
            Some(&current) => candidate < current,
            None => true,
        };
        if better {
            labels.insert(v, candidate);
        }
        better
    }

    let mut queue: VecDeque<VertexId> = VecDeque::new();
    let mut improved: HashMap<VertexId, ()> = HashMap::new();
    for &(v, dist, center) in seeds {
        if adopt(labels, v, (dist, center)) {
            queue.push_back(v);
            improved.insert(v, ());
        }
    }
    while let Some(v) = queue.pop_front() {
        let (dist, center) = labels[&v];
        for neighbor in subgraph.neighbors(v).unwrap_or(&[]) {
            if neighbor.is_remote() {
                continue;
            }
            if adopt(labels, neighbor.id, (dist + 1, center)) {
                queue.push_back(neighbor.id);
                improved.insert(neighbor.id, ());
            }
        }
    }
    let mut sends = Vec::new();
    let mut touched: Vec<VertexId> = improved.into_keys().collect();
    touched.sort_unstable();
    for v in touched {
        let (dist, center) = labels[&v];
        for stub in subgraph.remote_stubs(v) {
            sends.push((stub.remote.unwrap(), stub.id, dist + 1, center));
        }
    }
    sends
}

/// Runs k-way clustering over a decomposition. The engine is forced into
/// always-active mode: quiescent subgraphs must keep reporting ASSIGNED so
/// the master can detect convergence.
pub fn cluster(
    decomposition: &Decomposition,
    config: &KwayConfig,
    engine_config: &EngineConfig,
) -> Result<KwayRun, KwayError> {
    cluster_observed(decomposition, config, engine_config, |_, _| {})
}

/// [`cluster`] with a per-barrier observer over all subgraph states.
pub fn cluster_observed<F>(
    decomposition: &Decomposition,
    config: &KwayConfig,
    engine_config: &EngineConfig,
    observer: F,
) -> Result<KwayRun, KwayError>
where
    F: FnMut(usize, &[KwayState]),
{
    let n: usize = decomposition
        .subgraphs()
        .iter()
        .map(Subgraph::vertex_count)
        .sum();
    if config.k == 0 || config.k > n {
        return Err(KwayError::InvalidK { k: config.k, n });
    }
    if config.max_rounds == 0 {
        return Err(KwayError::ZeroRounds);
    }
    let supply: usize = decomposition
        .subgraphs()
        .iter()
        .map(|s| s.vertex_count().min(config.k))
        .sum();
    if supply < config.k {
        return Err(KwayError::InsufficientCandidates {
            have: supply,
            need: config.k,
        });
    }

    let engine_config = EngineConfig {
        activation: ActivationMode::AlwaysActive,
        ..engine_config.clone()
    };
    let algorithm = Kway {
        config: config.clone(),
    };
    let (states, metrics) = engine::run_observed(
        decomposition.subgraphs(),
        &algorithm,
        &engine_config,
        observer,
    )?;

    let mut assignment: BTreeMap<VertexId, Option<VertexId>> = BTreeMap::new();
    let mut per_subgraph_centers = Vec::with_capacity(states.len());
    for (state, subgraph) in states.iter().zip(decomposition.subgraphs()) {
        let outcome = state
            .outcome
            .as_ref()
            .expect("halted subgraphs always carry an outcome");
        per_subgraph_centers.push((subgraph.id(), outcome.centers.clone()));
        for &v in subgraph.vertices() {
            assignment.insert(v, outcome.labels.get(&v).map(|&(_, c)| c));
        }
    }
    let outcome = states[0]
        .outcome
        .as_ref()
        .expect("engine guarantees at least one subgraph");
    let clustering = Clustering {
        assignment,
        centers: outcome.centers.clone(),
        cut: outcome.cut,
        rounds: outcome.round + 1,
        threshold_met: states[0].threshold_met,
    };
    Ok(KwayRun {
        clustering,
        metrics,
        per_subgraph_centers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{load_edge_list, Graph};
    use crate::partition::PartitionAssignment;

    fn path_graph(n: u64) -> Graph {
        let text: String = (1..n)
            .map(|i| format!("{} {}", i, i + 1))
            .collect::<Vec<_>>()
            .join("\n");
        load_edge_list(text.as_bytes(), false).unwrap()
    }

    fn decompose(g: &Graph, p: u32, seed: u64) -> Decomposition {
        let a = PartitionAssignment::hash(g, p, seed).unwrap();
        Decomposition::extract(g, &a).unwrap()
    }

    #[test]
    fn sampling_respects_the_min_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let sample = sample_candidates(&[10, 20], 5, &mut rng);
        assert_eq!(sample.len(), 2);
        let ids: std::collections::BTreeSet<_> = sample.iter().map(|&(v, _)| v).collect();
        assert_eq!(ids.len(), 2);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let vertices: Vec<VertexId> = (0..10).collect();
        let a = sample_candidates(&vertices, 3, &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_candidates(&vertices, 3, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn sampling_frequency_is_uniform() {
        // k/n = 0.3 inclusion probability per vertex under uniform
        // sampling without replacement.
        let vertices: Vec<VertexId> = (0..10).collect();
        let mut counts = vec![0u32; 10];
        for round in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(0xfeed ^ round);
            for (v, _) in sample_candidates(&vertices, 3, &mut rng) {
                counts[v as usize] += 1;
            }
        }
        for (v, &c) in counts.iter().enumerate() {
            let freq = c as f64 / 1000.0;
            assert!(
                (freq - 0.3).abs() <= 0.05,
                "vertex {v} sampled with frequency {freq}"
            );
        }
    }

    #[test]
    fn k_equals_one_labels_by_bfs_distance() {
        let g = path_graph(6);
        let d = decompose(&g, 2, 3);
        let cfg = KwayConfig {
            k: 1,
            tau: u64::MAX,
            max_rounds: 1,
            seed: 7,
        };
        let run = cluster(&d, &cfg, &EngineConfig::default()).unwrap();
        assert!(run.clustering.threshold_met);
        assert_eq!(run.clustering.rounds, 1);
        assert_eq!(run.clustering.cut, 0);
        let center = run.clustering.centers[0];
        for (&v, &label) in &run.clustering.assignment {
            assert_eq!(label, Some(center), "vertex {v}");
        }
    }

    #[test]
    fn nearest_center_ties_break_to_smaller_id() {
        // Path 1-2-3 with centers 1 and 3: vertex 2 is at distance 1 from
        // both and must adopt center 1.
        let g = path_graph(3);
        let subgraphs =
            Decomposition::extract(&g, &PartitionAssignment::hash(&g, 1, 0).unwrap()).unwrap();
        let sg = &subgraphs.subgraphs()[0];
        let mut labels = BTreeMap::new();
        let sends = local_bfs(sg, &mut labels, &[(1, 0, 1), (3, 0, 3)]);
        assert!(sends.is_empty());
        assert_eq!(labels[&2], (1, 1));
        assert_eq!(labels[&1], (0, 1));
        assert_eq!(labels[&3], (0, 3));
    }

    #[test]
    fn tau_equal_to_edge_count_halts_in_one_round() {
        let g = path_graph(8);
        let d = decompose(&g, 3, 5);
        let cfg = KwayConfig {
            k: 3,
            tau: g.edge_count() as u64,
            max_rounds: 50,
            seed: 11,
        };
        let run = cluster(&d, &cfg, &EngineConfig::default()).unwrap();
        assert!(run.clustering.threshold_met);
        assert_eq!(run.clustering.rounds, 1);
    }

    #[test]
    fn unreachable_tau_exhausts_rounds_and_returns_best() {
        // Connected graph, k >= 2: the cut is always at least 1, so tau=0
        // can never be met.
        let g = path_graph(8);
        let d = decompose(&g, 2, 5);
        let cfg = KwayConfig {
            k: 2,
            tau: 0,
            max_rounds: 4,
            seed: 13,
        };
        let run = cluster(&d, &cfg, &EngineConfig::default()).unwrap();
        assert!(!run.clustering.threshold_met);
        assert_eq!(run.clustering.rounds, 4);
        assert!(run.clustering.cut >= 1);
    }

    #[test]
    fn disconnected_graph_reaches_zero_cut() {
        // Three components, k = 3, tau = 0: halts once some round drops
        // one center in each component.
        let g = load_edge_list("1 2\n3 4\n5 6".as_bytes(), false).unwrap();
        let d = decompose(&g, 2, 1);
        let cfg = KwayConfig {
            k: 3,
            tau: 0,
            max_rounds: 200,
            seed: 2,
        };
        let run = cluster(&d, &cfg, &EngineConfig::default()).unwrap();
        assert!(run.clustering.threshold_met);
        assert_eq!(run.clustering.cut, 0);
        for label in run.clustering.assignment.values() {
            assert!(label.is_some());
        }
    }

    #[test]
    fn config_validation() {
        let g = path_graph(4);
        let d = decompose(&g, 1, 0);
        let bad_k = KwayConfig {
            k: 0,
            ..KwayConfig::default()
        };
        assert!(matches!(
            cluster(&d, &bad_k, &EngineConfig::default()),
            Err(KwayError::InvalidK { .. })
        ));
        let huge_k = KwayConfig {
            k: 5,
            ..KwayConfig::default()
        };
        assert!(matches!(
            cluster(&d, &huge_k, &EngineConfig::default()),
            Err(KwayError::InvalidK { .. })
        ));
        let no_rounds = KwayConfig {
            k: 1,
            max_rounds: 0,
            ..KwayConfig::default()
        };
        assert!(matches!(
            cluster(&d, &no_rounds, &EngineConfig::default()),
            Err(KwayError::ZeroRounds)
        ));
    }

    #[test]
    fn identical_configs_give_identical_clusterings() {
        let g = path_graph(12);
        let d = decompose(&g, 3, 4);
        let cfg = KwayConfig {
            k: 2,
            tau: 1,
            max_rounds: 10,
            seed: 21,
        };
        let a = cluster(&d, &cfg, &EngineConfig::default()).unwrap();
        let b = cluster(&d, &cfg, &EngineConfig::default()).unwrap();
        assert_eq!(a.clustering, b.clustering);
    }

    #[test]
    fn phases_stay_in_lockstep() {
        let g = path_graph(10);
        let d = decompose(&g, 3, 8);
        let cfg = KwayConfig {
            k: 2,
            tau: 2,
            max_rounds: 5,
            seed: 3,
        };
        cluster_observed(&d, &cfg, &EngineConfig::default(), |superstep, states| {
            let first = states[0].phase();
            for s in states {
                assert_eq!(s.phase(), first, "superstep {superstep}");
            }
        })
        .unwrap();
    }
}
