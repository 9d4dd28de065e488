//! Subgraph-centric bulk-synchronous graph processing.
//!
//! A partition of a graph usually contains several weakly connected
//! components; each one becomes a [`Subgraph`], the unit of computation.
//! User code runs once per subgraph per superstep and exchanges messages
//! across a barrier, which lets it use fast shared-memory algorithms inside
//! a subgraph and fall back to message passing only at the boundaries.
//!
//! The crate ships the engine plus three algorithms built on it:
//!
//! * [`algo::triangles`] — exact triangle counting, in both subgraph-centric
//!   and vertex-centric form, with an independent enumeration oracle.
//! * [`algo::kway`] — randomized k-way clustering by multi-source BFS from
//!   sampled centers, restarting until an edge-cut threshold is met.
//! * [`algo::msf`] — minimum spanning forest via local Borůvka passes and
//!   cross-subgraph root merging with pointer jumping.
//!
//! See the `book/` directory for a guided tour; its code snippets are
//! compiled as doctests of this crate.

pub mod algo;
pub mod engine;
pub mod graph;
pub mod metrics;
pub mod partition;
pub mod subgraph;
pub mod weight;
mod wire;

pub use engine::{
    master_subgraph_id, ActivationMode, Algorithm, ComputeError, EngineConfig, EngineError,
    Envelope, SuperstepContext,
};
pub use graph::{Graph, GraphError, VertexId};
pub use metrics::RunMetrics;
pub use partition::{PartitionAssignment, PartitionError};
pub use subgraph::{Decomposition, Neighbor, Subgraph, SubgraphId};
pub use weight::{Weight, WeightSum};

#[cfg(doctest)]
mod book;
