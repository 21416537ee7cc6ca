use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::eventlog::{EventLog, EventLogError, Trace};

/// Directly-follows counts plus start/end activity counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirectlyFollowsGraph {
    pub activities: BTreeSet<String>,
    pub counts: BTreeMap<(String, String), u64>,
    pub start_counts: BTreeMap<String, u64>,
    pub end_counts: BTreeMap<String, u64>,
}

impl DirectlyFollowsGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_traces<T, S>(traces: &[T]) -> Self
    where
        T: AsRef<[S]>,
        S: AsRef<str>,
    {
        let mut dfg = DirectlyFollowsGraph::new();
        for trace in traces {
            dfg.add_trace(trace.as_ref());
        }
        dfg
    }

    pub fn add_trace<S: AsRef<str>>(&mut self, trace: &[S]) {
        let (Some(first), Some(last)) = (trace.first(), trace.last()) else {
            return;
        };
        *self.start_counts.entry(first.as_ref().to_string()).or_insert(0) += 1;
        *self.end_counts.entry(last.as_ref().to_string()).or_insert(0) += 1;
        for a in trace {
            if !self.activities.contains(a.as_ref()) {
                self.activities.insert(a.as_ref().to_string());
            }
        }
        for pair in trace.windows(2) {
            self.add_edge(pair[0].as_ref(), pair[1].as_ref(), 1);
        }
    }

    pub fn add_edge(&mut self, from: &str, to: &str, count: u64) {
        self.activities.insert(from.to_string());
        self.activities.insert(to.to_string());
        *self.counts.entry((from.to_string(), to.to_string())).or_insert(0) += count;
    }

    /// Adds all counts of `other` into `self`.
    pub fn merge(mut self, other: DirectlyFollowsGraph) -> Self {
        self.activities.extend(other.activities);
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.start_counts {
            *self.start_counts.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.end_counts {
            *self.end_counts.entry(k).or_insert(0) += v;
        }
        self
    }

    pub fn count(&self, from: &str, to: &str) -> u64 {
        self.counts
            .get(&(from.to_string(), to.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn start_count(&self, a: &str) -> u64 {
        self.start_counts.get(a).copied().unwrap_or(0)
    }

    pub fn end_count(&self, a: &str) -> u64 {
        self.end_counts.get(a).copied().unwrap_or(0)
    }

    pub fn total_edge_count(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Number of non-empty traces the graph was built from.
    pub fn trace_count(&self) -> u64 {
        self.start_counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.activities.is_empty()
    }
}

/// Builds the directly-follows graph of `log`. Traces are processed in parallel chunks whose
/// counts are summed, so the result equals a sequential pass.
pub fn discover_dfg(log: &EventLog) -> Result<DirectlyFollowsGraph, EventLogError> {
    log.traces
        .par_chunks(256)
        .map(|chunk: &[Trace]| {
            let mut dfg = DirectlyFollowsGraph::new();
            for trace in chunk {
                dfg.add_trace(&trace.activities()?);
            }
            Ok(dfg)
        })
        .try_reduce(DirectlyFollowsGraph::new, |a, b| Ok(a.merge(b)))
}
