//! Filtering, case and variant statistics, histograms and social network analysis.

mod filter;
mod sna;
mod stats;

use thiserror::Error;

pub use filter::{filter_log, FilterAction, FilterSpec, Level, TimeMode, VariantSelection};
pub use sna::{sna, SnaMetric, SnaResult};
pub use stats::{
    attribute_distribution, case_statistics, time_series, CaseInfo, CaseStats, Histogram, HistogramBin, TimeBin,
    TimeSeriesKind,
};

use crate::eventlog::EventLogError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticsError {
    #[error("trace {trace} has an event without a timestamp")]
    MissingTimestamp { trace: usize },
    #[error("log is empty")]
    EmptyLog,
    #[error("attribute `{key}` has a non-numeric value `{value}`")]
    NonNumericValue { key: String, value: String },
    #[error("no event carries a resource")]
    NoResources,
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("bin count must be at least 1")]
    InvalidBins,
    #[error("unknown SNA metric '{0}'")]
    UnknownMetric(String),
    #[error(transparent)]
    Log(#[from] EventLogError),
}

/// Activity labels joined by `,`; commas inside labels are doubled.
pub fn variant_key<S: AsRef<str>>(labels: &[S]) -> String {
    labels
        .iter()
        .map(|l| l.as_ref().replace(',', ",,"))
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_keys() {
        assert_eq!(variant_key(&["a", "b"]), "a,b");
        assert_eq!(variant_key::<&str>(&[]), "");
        assert_ne!(variant_key(&["a,b"]), variant_key(&["a", "b"]));
    }
}
