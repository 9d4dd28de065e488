//! Per-run execution metrics.
//!
//! Message counts and payload sizes are the quantities worth comparing
//! across algorithms and partitionings; wall times are recorded but vary
//! between runs and machines.

use serde::{Deserialize, Serialize};

/// Metrics for one superstep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperstepMetrics {
    pub index: usize,
    /// Envelopes sent during this superstep. A broadcast counts once per
    /// destination.
    pub envelopes: u64,
    /// Payload bytes sent during this superstep.
    pub bytes: u64,
    /// Subgraphs whose compute function ran.
    pub active: usize,
    pub millis: f64,
}

/// Totals over a whole run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsTotals {
    pub supersteps: usize,
    pub envelopes: u64,
    pub bytes: u64,
    pub millis: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub supersteps: Vec<SuperstepMetrics>,
    pub totals: MetricsTotals,
}

impl RunMetrics {
    pub(crate) fn push(&mut self, row: SuperstepMetrics) {
        self.totals.supersteps += 1;
        self.totals.envelopes += row.envelopes;
        self.totals.bytes += row.bytes;
        self.totals.millis += row.millis;
        self.supersteps.push(row);
    }

    pub fn superstep_count(&self) -> usize {
        self.totals.supersteps
    }

    pub fn total_envelopes(&self) -> u64 {
        self.totals.envelopes
    }

    pub fn total_bytes(&self) -> u64 {
        self.totals.bytes
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics are always serializable")
    }

    /// Copy with wall-time fields zeroed, for byte-stable comparisons.
    pub fn without_wall_times(&self) -> RunMetrics {
        let mut copy = self.clone();
        copy.totals.millis = 0.0;
        for row in &mut copy.supersteps {
            row.millis = 0.0;
        }
        copy
    }
}
