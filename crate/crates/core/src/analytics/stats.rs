use std::collections::BTreeMap;

use chrono::{DateTime, SecondsFormat, Utc};

use super::{variant_key, AnalyticsError};
use crate::eventlog::{EventLog, Timestamp};

#[derive(Debug, Clone, PartialEq)]
pub struct CaseInfo {
    pub id: Option<String>,
    pub start: Option<Timestamp>,
    pub end: Option<Timestamp>,
    /// Absent when the trace is empty or some event lacks a timestamp.
    pub duration_seconds: Option<f64>,
    pub event_count: usize,
    pub variant: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseStats {
    pub cases: Vec<CaseInfo>,
    /// Variant counts, most frequent first, ties by variant string.
    pub variants: Vec<(String, usize)>,
}

impl CaseStats {
    pub fn mean_duration(&self) -> Option<f64> {
        let durations: Vec<f64> = self.cases.iter().filter_map(|c| c.duration_seconds).collect();
        (!durations.is_empty()).then(|| durations.iter().sum::<f64>() / durations.len() as f64)
    }
}

fn seconds_between(a: &Timestamp, b: &Timestamp) -> f64 {
    (b.instant() - a.instant()).num_milliseconds() as f64 / 1000.0
}

pub fn case_statistics(log: &EventLog) -> Result<CaseStats, AnalyticsError> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut cases = Vec::with_capacity(log.len());
    for trace in &log.traces {
        let variant = variant_key(&trace.activities()?);
        *counts.entry(variant.clone()).or_default() += 1;
        let bounds = trace
            .timestamps()
            .and_then(|ts| Some(((*ts.first()?).clone(), (*ts.last()?).clone())));
        cases.push(CaseInfo {
            id: trace.case_id(),
            duration_seconds: bounds.as_ref().map(|(a, b)| seconds_between(a, b)),
            start: bounds.as_ref().map(|b| b.0.clone()),
            end: bounds.map(|b| b.1),
            event_count: trace.len(),
            variant,
        });
    }
    let mut variants: Vec<(String, usize)> = counts.into_iter().collect();
    variants.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    Ok(CaseStats { cases, variants })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    /// Inclusive lower edge.
    pub lower: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bins: Vec<HistogramBin>,
    /// Events that do not carry the attribute.
    pub ignored: usize,
}

/// Equal-width bins over `[min, max]`; the maximum falls into the last bin. A degenerate range
/// uses width 1.
fn bin_values(values: &[f64], bins: usize) -> Vec<HistogramBin> {
    if values.is_empty() {
        return Vec::new();
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if max > min { (max - min) / bins as f64 } else { 1.0 };
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|i| HistogramBin {
            lower: min + i as f64 * width,
            count: 0,
        })
        .collect();
    for &v in values {
        let idx = (((v - min) / width) as usize).min(bins - 1);
        out[idx].count += 1;
    }
    out
}

/// Histogram of a numeric event attribute.
pub fn attribute_distribution(log: &EventLog, key: &str, bins: usize) -> Result<Histogram, AnalyticsError> {
    if bins == 0 {
        return Err(AnalyticsError::InvalidBins);
    }
    let mut values = Vec::new();
    let mut ignored = 0;
    for event in log.traces.iter().flat_map(|t| &t.events) {
        match event.get(key) {
            None => ignored += 1,
            Some(v) => values.push(v.as_number().ok_or_else(|| AnalyticsError::NonNumericValue {
                key: key.to_string(),
                value: v.to_string(),
            })?),
        }
    }
    Ok(Histogram {
        bins: bin_values(&values, bins),
        ignored,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeSeriesKind {
    EventsPerTime,
    CaseDuration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeBin {
    /// Interval start: ISO-8601 UTC for event times, seconds for durations.
    pub label: String,
    pub count: u64,
}

pub fn time_series(log: &EventLog, kind: TimeSeriesKind, bins: usize) -> Result<Vec<TimeBin>, AnalyticsError> {
    if bins == 0 {
        return Err(AnalyticsError::InvalidBins);
    }
    let mut values = Vec::new();
    for (i, trace) in log.traces.iter().enumerate() {
        let stamps = trace
            .timestamps()
            .ok_or(AnalyticsError::MissingTimestamp { trace: i })?;
        match kind {
            TimeSeriesKind::EventsPerTime => values.extend(stamps.iter().map(|t| t.epoch_seconds())),
            TimeSeriesKind::CaseDuration => {
                if let (Some(a), Some(b)) = (stamps.first(), stamps.last()) {
                    values.push(seconds_between(a, b));
                }
            }
        }
    }
    if values.is_empty() {
        return Err(AnalyticsError::EmptyLog);
    }
    Ok(bin_values(&values, bins)
        .into_iter()
        .map(|b| TimeBin {
            label: match kind {
                TimeSeriesKind::EventsPerTime => iso_label(b.lower),
                TimeSeriesKind::CaseDuration => format!("{}", b.lower),
            },
            count: b.count,
        })
        .collect())
}

fn iso_label(epoch_seconds: f64) -> String {
    let millis = (epoch_seconds * 1000.0).round() as i64;
    DateTime::<Utc>::from_timestamp_millis(millis)
        .map(|t| t.to_rfc3339_opts(SecondsFormat::AutoSi, true))
        .unwrap_or_else(|| format!("{epoch_seconds}"))
}
