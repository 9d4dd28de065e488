//! The superstep engine.
//!
//! [`run`] executes a user algorithm over a fixed set of subgraphs. Each
//! superstep the engine calls [`Algorithm::compute`] once per active
//! subgraph (in parallel on a worker pool), then routes every envelope sent
//! during the superstep into its destination inbox for the next one. The
//! run terminates by global consensus: all subgraphs have voted to halt and
//! no envelopes are in flight.

use std::time::Instant;

use thiserror::Error;

use crate::graph::VertexId;
use crate::metrics::{RunMetrics, SuperstepMetrics};
use crate::partition::mix64;
use crate::subgraph::{Subgraph, SubgraphId};

/// A routed message, delivered exactly once at the next superstep barrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Envelope {
    pub dest: SubgraphId,
    /// When set, the engine validates at delivery that this vertex is local
    /// to the destination subgraph.
    pub dest_vertex: Option<VertexId>,
    pub source: SubgraphId,
    pub payload: Vec<u8>,
}

/// What keeps a quiescent subgraph scheduled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ActivationMode {
    /// Pure vote-to-halt semantics: a halted subgraph runs again only when
    /// an envelope arrives for it.
    Reactive,
    /// Every subgraph runs every superstep; the run ends when all of them
    /// vote to halt in the same superstep. Phase machines that keep
    /// reporting to a master while otherwise idle need this mode.
    AlwaysActive,
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub worker_count: usize,
    pub activation: ActivationMode,
    /// With `true`, inboxes are ordered by (source subgraph, send sequence)
    /// and runs are bit-identical. With `false`, each inbox is shuffled
    /// (seeded by `seed`) to exercise order independence.
    pub deterministic: bool,
    /// Supersteps after which a still-running job is aborted as a runaway.
    pub max_supersteps: usize,
    /// Seed for the inbox shuffle in non-deterministic mode.
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            worker_count: 1,
            activation: ActivationMode::Reactive,
            deterministic: true,
            max_supersteps: 10_000,
            seed: 0,
        }
    }
}

/// Error raised by an algorithm's compute function.
#[derive(Debug, Clone)]
pub struct ComputeError {
    message: String,
}

impl ComputeError {
    pub fn new(message: impl Into<String>) -> ComputeError {
        ComputeError {
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ComputeError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for ComputeError {}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("no subgraphs to run on")]
    NoSubgraphs,
    #[error("worker count must be at least 1")]
    NoWorkers,
    #[error("max supersteps must be at least 1")]
    NoSupersteps,
    #[error("subgraph list is not sorted by unique ID")]
    UnsortedSubgraphs,
    #[error("superstep {superstep}: envelope from {from} to unknown subgraph {dest}")]
    UnknownDestination {
        superstep: usize,
        from: SubgraphId,
        dest: SubgraphId,
    },
    #[error(
        "superstep {superstep}: envelope from {from} to vertex {vertex} \
         which is not local to subgraph {dest}"
    )]
    UnknownDestinationVertex {
        superstep: usize,
        from: SubgraphId,
        dest: SubgraphId,
        vertex: VertexId,
    },
    #[error("superstep limit {limit} exceeded")]
    Runaway {
        limit: usize,
        metrics: Box<RunMetrics>,
    },
    #[error("superstep {superstep}: subgraph {subgraph}: {source}")]
    Compute {
        superstep: usize,
        subgraph: SubgraphId,
        source: ComputeError,
    },
}

/// A per-subgraph computation driven by the engine.
pub trait Algorithm: Sync {
    type State: Send;

    /// Builds the initial state for one subgraph, before superstep 0.
    fn init(&self, subgraph: &Subgraph) -> Self::State;

    /// Runs one superstep on one subgraph.
    fn compute(
        &self,
        state: &mut Self::State,
        subgraph: &Subgraph,
        ctx: &mut SuperstepContext<'_>,
    ) -> Result<(), ComputeError>;
}

/// Everything a compute call may observe and do during one superstep.
pub struct SuperstepContext<'a> {
    superstep: usize,
    inbox: &'a [Envelope],
    me: SubgraphId,
    master: SubgraphId,
    all_ids: &'a [SubgraphId],
    outbox: Vec<Envelope>,
    halt: bool,
}

impl<'a> SuperstepContext<'a> {
    /// 0-based superstep index, identical across all subgraphs in a barrier.
    pub fn superstep(&self) -> usize {
        self.superstep
    }

    /// Envelopes addressed to this subgraph in the previous superstep,
    /// each exactly once.
    pub fn inbox(&self) -> &[Envelope] {
        self.inbox
    }

    /// Total number of subgraphs in the job.
    pub fn subgraph_count(&self) -> usize {
        self.all_ids.len()
    }

    pub fn me(&self) -> SubgraphId {
        self.me
    }

    pub fn master(&self) -> SubgraphId {
        self.master
    }

    pub fn is_master(&self) -> bool {
        self.me == self.master
    }

    /// Sends to a subgraph, delivered next superstep.
    pub fn send(&mut self, dest: SubgraphId, payload: Vec<u8>) {
        self.outbox.push(Envelope {
            dest,
            dest_vertex: None,
            source: self.me,
            payload,
        });
    }

    /// Sends to a vertex in a subgraph; delivery validates that the vertex
    /// is local to the destination.
    pub fn send_to_vertex(&mut self, dest: SubgraphId, vertex: VertexId, payload: Vec<u8>) {
        self.outbox.push(Envelope {
            dest,
            dest_vertex: Some(vertex),
            source: self.me,
            payload,
        });
    }

    /// Broadcasts to every subgraph, the sender included. Counts as one
    /// envelope per destination in the metrics.
    pub fn send_to_all(&mut self, payload: Vec<u8>) {
        for &dest in self.all_ids {
            self.outbox.push(Envelope {
                dest,
                dest_vertex: None,
                source: self.me,
                payload: payload.clone(),
            });
        }
    }

    pub fn send_to_master(&mut self, payload: Vec<u8>) {
        let master = self.master;
        self.send(master, payload);
    }

    /// Declares this subgraph quiescent. In reactive mode an incoming
    /// envelope reactivates it; computing again without voting also
    /// reactivates it.
    pub fn vote_to_halt(&mut self) {
        self.halt = true;
    }
}

/// The designated master subgraph: the minimum subgraph ID.
pub fn master_subgraph_id(subgraphs: &[Subgraph]) -> Option<SubgraphId> {
    subgraphs.iter().map(Subgraph::id).min()
}

struct ComputeOutput {
    outbox: Vec<Envelope>,
    voted: bool,
}

/// Runs `algorithm` over `subgraphs` until global halt consensus.
///
/// Returns the final per-subgraph states (in subgraph order) and the run
/// metrics. `subgraphs` must be sorted by unique ID, which is how
/// [`Decomposition`](crate::subgraph::Decomposition) hands them out.
pub fn run<A: Algorithm>(
    subgraphs: &[Subgraph],
    algorithm: &A,
    config: &EngineConfig,
) -> Result<(Vec<A::State>, RunMetrics), EngineError> {
    run_observed(subgraphs, algorithm, config, |_, _: &[A::State]| {})
}

/// Like [`run`], but calls `observer` with all states after every barrier.
/// Useful for asserting cross-subgraph invariants superstep by superstep.
pub fn run_observed<A, F>(
    subgraphs: &[Subgraph],
    algorithm: &A,
    config: &EngineConfig,
    mut observer: F,
) -> Result<(Vec<A::State>, RunMetrics), EngineError>
where
    A: Algorithm,
    F: FnMut(usize, &[A::State]),
{
    if subgraphs.is_empty() {
        return Err(EngineError::NoSubgraphs);
    }
    if config.worker_count == 0 {
        return Err(EngineError::NoWorkers);
    }
    if config.max_supersteps == 0 {
        return Err(EngineError::NoSupersteps);
    }
    let all_ids: Vec<SubgraphId> = subgraphs.iter().map(Subgraph::id).collect();
    if !all_ids.windows(2).all(|w| w[0] < w[1]) {
        return Err(EngineError::UnsortedSubgraphs);
    }
    let master = all_ids[0];
    let count = subgraphs.len();

    let mut states: Vec<A::State> = subgraphs.iter().map(|s| algorithm.init(s)).collect();
    let mut inboxes: Vec<Vec<Envelope>> = vec![Vec::new(); count];
    let mut halted: Vec<bool> = vec![false; count];
    let mut metrics = RunMetrics::default();

    for superstep in 0..config.max_supersteps {
        let started = Instant::now();
        let runnable: Vec<bool> = match config.activation {
            ActivationMode::Reactive => (0..count)
                .map(|i| !halted[i] || !inboxes[i].is_empty())
                .collect(),
            ActivationMode::AlwaysActive => vec![true; count],
        };
        let active = runnable.iter().filter(|&&r| r).count();

        let mut outputs = compute_all(
            subgraphs,
            algorithm,
            &mut states,
            &inboxes,
            &runnable,
            &all_ids,
            master,
            superstep,
            config.worker_count,
        );

        // Surface compute errors in subgraph order for determinism.
        for (i, output) in outputs.iter_mut().enumerate() {
            if matches!(output, Some(Err(_))) {
                let err = match output.take() {
                    Some(Err(e)) => e,
                    _ => unreachable!(),
                };
                return Err(EngineError::Compute {
                    superstep,
                    subgraph: all_ids[i],
                    source: err,
                });
            }
        }

        // Barrier: route envelopes, tally metrics, apply votes.
        let mut next_inboxes: Vec<Vec<Envelope>> = vec![Vec::new(); count];
        let mut envelopes = 0u64;
        let mut bytes = 0u64;
        for (i, output) in outputs.iter_mut().enumerate() {
            let output = match output.take() {
                Some(Ok(o)) => o,
                Some(Err(_)) => unreachable!("errors already surfaced"),
                None => continue,
            };
            for envelope in output.outbox {
                let dest_idx = all_ids
                    .binary_search(&envelope.dest)
                    .map_err(|_| EngineError::UnknownDestination {
                        superstep,
                        from: envelope.source,
                        dest: envelope.dest,
                    })?;
                if let Some(vertex) = envelope.dest_vertex {
                    if !subgraphs[dest_idx].contains(vertex) {
                        return Err(EngineError::UnknownDestinationVertex {
                            superstep,
                            from: envelope.source,
                            dest: envelope.dest,
                            vertex,
                        });
                    }
                }
                envelopes += 1;
                bytes += envelope.payload.len() as u64;
                next_inboxes[dest_idx].push(envelope);
            }
            halted[i] = output.voted;
        }

        if !config.deterministic {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            for (i, inbox) in next_inboxes.iter_mut().enumerate() {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(
                    mix64(config.seed ^ mix64(superstep as u64) ^ i as u64),
                );
                inbox.shuffle(&mut rng);
            }
        }

        metrics.push(SuperstepMetrics {
            index: superstep,
            envelopes,
            bytes,
            active,
            millis: started.elapsed().as_secs_f64() * 1e3,
        });
        observer(superstep, &states);

        let done = match config.activation {
            ActivationMode::Reactive => halted.iter().all(|&h| h) && envelopes == 0,
            ActivationMode::AlwaysActive => halted.iter().all(|&h| h),
        };
        if done {
            return Ok((states, metrics));
        }
        inboxes = next_inboxes;
    }

    Err(EngineError::Runaway {
        limit: config.max_supersteps,
        metrics: Box::new(metrics),
    })
}

/// Runs compute on every runnable subgraph, chunked over a scoped worker
/// pool. Outputs land in per-subgraph slots, so thread scheduling cannot
/// affect anything observable.
#[allow(clippy::too_many_arguments)]
fn compute_all<A: Algorithm>(
    subgraphs: &[Subgraph],
    algorithm: &A,
    states: &mut [A::State],
    inboxes: &[Vec<Envelope>],
    runnable: &[bool],
    all_ids: &[SubgraphId],
    master: SubgraphId,
    superstep: usize,
    worker_count: usize,
) -> Vec<Option<Result<ComputeOutput, ComputeError>>> {
    let count = subgraphs.len();
    let mut outputs: Vec<Option<Result<ComputeOutput, ComputeError>>> =
        (0..count).map(|_| None).collect();

    let run_one = |state: &mut A::State,
                   subgraph: &Subgraph,
                   inbox: &[Envelope]|
     -> Result<ComputeOutput, ComputeError> {
        let mut ctx = SuperstepContext {
            superstep,
            inbox,
            me: subgraph.id(),
            master,
            all_ids,
            outbox: Vec::new(),
            halt: false,
        };
        algorithm.compute(state, subgraph, &mut ctx)?;
        Ok(ComputeOutput {
            outbox: ctx.outbox,
            voted: ctx.halt,
        })
    };

    let workers = worker_count.min(count);
    if workers <= 1 {
        for i in 0..count {
            if runnable[i] {
                outputs[i] = Some(run_one(&mut states[i], &subgraphs[i], &inboxes[i]));
            }
        }
        return outputs;
    }

    let chunk = count.div_ceil(workers);
    std::thread::scope(|scope| {
        let state_chunks = states.chunks_mut(chunk);
        let output_chunks = outputs.chunks_mut(chunk);
        for (((((states, outputs), subgraphs), inboxes), runnable), _) in state_chunks
            .zip(output_chunks)
            .zip(subgraphs.chunks(chunk))
            .zip(inboxes.chunks(chunk))
            .zip(runnable.chunks(chunk))
            .zip(0..)
        {
            scope.spawn(move || {
                for j in 0..states.len() {
                    if runnable[j] {
                        outputs[j] = Some(run_one(&mut states[j], &subgraphs[j], &inboxes[j]));
                    }
                }
            });
        }
    });
    outputs
}
