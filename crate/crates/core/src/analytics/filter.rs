use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, FixedOffset};

use super::{variant_key, AnalyticsError};
use crate::eventlog::{EventLog, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMode {
    /// Every event lies inside the window.
    Contained,
    /// The trace's span overlaps the window.
    Intersecting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterAction {
    Keep,
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Trace,
    Event,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariantSelection {
    Keep(Vec<String>),
    /// The `k` most frequent variants, ties broken by variant string.
    TopK(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FilterSpec {
    TimeFrame {
        start: DateTime<FixedOffset>,
        end: DateTime<FixedOffset>,
        mode: TimeMode,
    },
    /// Case duration bounds in seconds, inclusive.
    CasePerformance {
        min_seconds: f64,
        max_seconds: f64,
    },
    /// An empty set leaves that endpoint unconstrained.
    Endpoints {
        start_in: BTreeSet<String>,
        end_in: BTreeSet<String>,
    },
    Variants(VariantSelection),
    Attribute {
        level: Level,
        key: String,
        values: BTreeSet<String>,
        action: FilterAction,
    },
    /// Traces in which `to` directly follows `from`.
    Path {
        from: String,
        to: String,
        action: FilterAction,
    },
}

impl FilterSpec {
    fn validate(&self) -> Result<(), AnalyticsError> {
        let invalid = |m: &str| Err(AnalyticsError::InvalidFilter(m.to_string()));
        match self {
            FilterSpec::TimeFrame { start, end, .. } if start > end => invalid("start after end"),
            FilterSpec::CasePerformance {
                min_seconds,
                max_seconds,
            } if !(*min_seconds >= 0.0 && min_seconds <= max_seconds) => {
                invalid("durations must satisfy 0 <= min <= max")
            }
            FilterSpec::Variants(VariantSelection::TopK(0)) => invalid("top_k must be at least 1"),
            _ => Ok(()),
        }
    }
}

type Span = (DateTime<FixedOffset>, DateTime<FixedOffset>);

/// First and last timestamp of a non-empty trace.
fn span(trace: &Trace, index: usize) -> Result<Option<Span>, AnalyticsError> {
    let stamps = trace
        .timestamps()
        .ok_or(AnalyticsError::MissingTimestamp { trace: index })?;
    Ok(stamps
        .first()
        .zip(stamps.last())
        .map(|(a, b)| (a.instant(), b.instant())))
}

fn keep_traces(
    log: &EventLog,
    mut keep: impl FnMut(usize, &Trace) -> Result<bool, AnalyticsError>,
) -> Result<EventLog, AnalyticsError> {
    let mut traces = Vec::new();
    for (i, trace) in log.traces.iter().enumerate() {
        if keep(i, trace)? {
            traces.push(trace.clone());
        }
    }
    Ok(log.with_traces(traces))
}

/// Applies one filter. Trace-level filters keep or drop whole traces, preserving order; the
/// event-level attribute filter removes events and then drops traces left empty.
pub fn filter_log(log: &EventLog, spec: &FilterSpec) -> Result<EventLog, AnalyticsError> {
    spec.validate()?;
    match spec {
        FilterSpec::TimeFrame { start, end, mode } => keep_traces(log, |i, t| {
            Ok(match span(t, i)? {
                None => false,
                Some((first, last)) => match mode {
                    TimeMode::Contained => first >= *start && last <= *end,
                    TimeMode::Intersecting => first <= *end && last >= *start,
                },
            })
        }),
        FilterSpec::CasePerformance {
            min_seconds,
            max_seconds,
        } => keep_traces(log, |i, t| {
            Ok(match span(t, i)? {
                None => false,
                Some((first, last)) => {
                    let seconds = (last - first).num_milliseconds() as f64 / 1000.0;
                    (*min_seconds..=*max_seconds).contains(&seconds)
                }
            })
        }),
        FilterSpec::Endpoints { start_in, end_in } => keep_traces(log, |_, t| {
            let labels = t.activities()?;
            let (Some(first), Some(last)) = (labels.first(), labels.last()) else {
                return Ok(false);
            };
            Ok((start_in.is_empty() || start_in.contains(first)) && (end_in.is_empty() || end_in.contains(last)))
        }),
        FilterSpec::Variants(selection) => {
            let keys: Vec<String> = log
                .traces
                .iter()
                .map(|t| t.activities().map(|l| variant_key(&l)))
                .collect::<Result<_, _>>()?;
            let selected: BTreeSet<String> = match selection {
                VariantSelection::Keep(list) => list.iter().cloned().collect(),
                VariantSelection::TopK(k) => {
                    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                    for key in &keys {
                        *counts.entry(key).or_default() += 1;
                    }
                    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
                    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
                    ranked.into_iter().take(*k).map(|(v, _)| v.to_string()).collect()
                }
            };
            keep_traces(log, |i, _| Ok(selected.contains(&keys[i])))
        }
        FilterSpec::Attribute {
            level: Level::Trace,
            key,
            values,
            action,
        } => keep_traces(log, |_, t| {
            let matched = t.attributes.get(key).is_some_and(|v| values.contains(&v.to_string()));
            Ok(matched == (*action == FilterAction::Keep))
        }),
        FilterSpec::Attribute {
            level: Level::Event,
            key,
            values,
            action,
        } => {
            let mut traces = Vec::new();
            for trace in &log.traces {
                let events: Vec<_> = trace
                    .events
                    .iter()
                    .filter(|e| {
                        let matched = e.get(key).is_some_and(|v| values.contains(&v.to_string()));
                        matched == (*action == FilterAction::Keep)
                    })
                    .cloned()
                    .collect();
                if !events.is_empty() {
                    traces.push(Trace {
                        attributes: trace.attributes.clone(),
                        events,
                    });
                }
            }
            Ok(log.with_traces(traces))
        }
        FilterSpec::Path { from, to, action } => keep_traces(log, |_, t| {
            let labels = t.activities()?;
            let found = labels.windows(2).any(|w| w[0] == *from && w[1] == *to);
            Ok(found == (*action == FilterAction::Keep))
        }),
    }
}
