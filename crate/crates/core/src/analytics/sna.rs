use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use super::AnalyticsError;
use crate::eventlog::{activity, EventLog};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnaMetric {
    Handover,
    WorkingTogether,
    Subcontracting,
    SimilarActivities,
}

impl SnaMetric {
    pub fn name(self) -> &'static str {
        match self {
            SnaMetric::Handover => "handover",
            SnaMetric::WorkingTogether => "working_together",
            SnaMetric::Subcontracting => "subcontracting",
            SnaMetric::SimilarActivities => "similar_activities",
        }
    }

    pub fn is_directed(self) -> bool {
        matches!(self, SnaMetric::Handover | SnaMetric::Subcontracting)
    }
}

impl fmt::Display for SnaMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SnaMetric {
    type Err = AnalyticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            SnaMetric::Handover,
            SnaMetric::WorkingTogether,
            SnaMetric::Subcontracting,
            SnaMetric::SimilarActivities,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| AnalyticsError::UnknownMetric(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnaResult {
    pub metric: SnaMetric,
    /// Sorted resource names; row and column order of `matrix`.
    pub resources: Vec<String>,
    pub matrix: Vec<Vec<f64>>,
    pub directed: bool,
    /// Events without a resource.
    pub skipped_events: usize,
}

impl SnaResult {
    pub fn value(&self, from: &str, to: &str) -> Option<f64> {
        let i = self.resources.iter().position(|r| r == from)?;
        let j = self.resources.iter().position(|r| r == to)?;
        Some(self.matrix[i][j])
    }
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        (cov / (vx.sqrt() * vy.sqrt())).clamp(-1.0, 1.0)
    }
}

/// Resource network of `metric`. Events without `org:resource` are skipped.
pub fn sna(log: &EventLog, metric: SnaMetric) -> Result<SnaResult, AnalyticsError> {
    let mut skipped_events = 0;
    // (resource index, activity) per trace, resource-less events removed.
    let mut names = BTreeSet::new();
    let mut raw: Vec<Vec<(String, String)>> = Vec::with_capacity(log.len());
    for trace in &log.traces {
        let mut seq = Vec::new();
        for event in &trace.events {
            match event.resource() {
                Some(r) => {
                    names.insert(r.clone());
                    seq.push((r, activity(event)?));
                }
                None => skipped_events += 1,
            }
        }
        raw.push(seq);
    }
    if names.is_empty() {
        return Err(AnalyticsError::NoResources);
    }
    let resources: Vec<String> = names.into_iter().collect();
    let index: BTreeMap<&str, usize> = resources.iter().enumerate().map(|(i, r)| (r.as_str(), i)).collect();
    let traces: Vec<Vec<(usize, &str)>> = raw
        .iter()
        .map(|t| t.iter().map(|(r, a)| (index[r.as_str()], a.as_str())).collect())
        .collect();
    let n = resources.len();
    let mut matrix = vec![vec![0.0; n]; n];
    let normalize = |matrix: &mut Vec<Vec<f64>>, total: f64| {
        if total > 0.0 {
            matrix.iter_mut().flatten().for_each(|v| *v /= total);
        }
    };
    match metric {
        SnaMetric::Handover => {
            let mut total = 0.0;
            for trace in &traces {
                for w in trace.windows(2) {
                    matrix[w[0].0][w[1].0] += 1.0;
                    total += 1.0;
                }
            }
            normalize(&mut matrix, total);
        }
        SnaMetric::Subcontracting => {
            let mut total = 0.0;
            for trace in &traces {
                for w in trace.windows(3) {
                    if w[0].0 == w[2].0 {
                        matrix[w[0].0][w[1].0] += 1.0;
                        total += 1.0;
                    }
                }
            }
            normalize(&mut matrix, total);
        }
        SnaMetric::WorkingTogether => {
            for trace in &traces {
                let present: BTreeSet<usize> = trace.iter().map(|e| e.0).collect();
                for &a in &present {
                    for &b in &present {
                        if a != b {
                            matrix[a][b] += 1.0;
                        }
                    }
                }
            }
            normalize(&mut matrix, log.len() as f64);
        }
        SnaMetric::SimilarActivities => {
            let activities: BTreeSet<&str> = traces.iter().flatten().map(|e| e.1).collect();
            let column: BTreeMap<&str, usize> = activities.iter().enumerate().map(|(i, a)| (*a, i)).collect();
            let mut profile = vec![vec![0.0; activities.len()]; n];
            for &(r, a) in traces.iter().flatten() {
                profile[r][column[a]] += 1.0;
            }
            for i in 0..n {
                for j in i + 1..n {
                    let v = pearson(&profile[i], &profile[j]);
                    matrix[i][j] = v;
                    matrix[j][i] = v;
                }
            }
        }
    }
    Ok(SnaResult {
        metric,
        resources,
        matrix,
        directed: metric.is_directed(),
        skipped_events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eventlog::{Event, Trace};

    fn log_of(cases: &[&[(&str, &str)]]) -> EventLog {
        let traces = cases
            .iter()
            .enumerate()
            .map(|(i, events)| {
                let mut trace = Trace::new(&i.to_string());
                for (a, r) in events.iter() {
                    let mut e = Event::with_activity(a);
                    if !r.is_empty() {
                        e.set("org:resource", *r);
                    }
                    trace.events.push(e);
                }
                trace
            })
            .collect();
        EventLog::new().with_traces(traces)
    }

    #[test]
    fn handover_and_subcontracting() {
        let log = log_of(&[&[("a", "r1"), ("b", "r2"), ("c", "r1")]]);
        let h = sna(&log, SnaMetric::Handover).unwrap();
        assert_eq!(h.value("r1", "r2"), Some(0.5));
        assert_eq!(h.value("r2", "r1"), Some(0.5));
        assert!(h.directed);
        let s = sna(&log, SnaMetric::Subcontracting).unwrap();
        assert_eq!(s.value("r1", "r2"), Some(1.0));
        assert_eq!(s.value("r2", "r1"), Some(0.0));
    }

    #[test]
    fn working_together() {
        let log = log_of(&[&[("a", "r1"), ("b", "r2")], &[("a", "r1"), ("b", "r3")]]);
        let w = sna(&log, SnaMetric::WorkingTogether).unwrap();
        assert_eq!(w.value("r1", "r2"), Some(0.5));
        assert_eq!(w.value("r2", "r1"), Some(0.5));
        assert_eq!(w.value("r2", "r3"), Some(0.0));
        assert_eq!(w.value("r1", "r1"), Some(0.0));
    }

    #[test]
    fn similar_activities() {
        let log = log_of(&[&[("a", "r1"), ("b", "r1"), ("a", "r2"), ("b", "r2"), ("c", "r3")]]);
        let s = sna(&log, SnaMetric::SimilarActivities).unwrap();
        assert!((s.value("r1", "r2").unwrap() - 1.0).abs() < 1e-12);
        assert!(s.value("r1", "r3").unwrap() < 0.0);
    }

    #[test]
    fn skipped_and_missing_resources() {
        let log = log_of(&[&[("a", "r1"), ("b", ""), ("c", "r2")]]);
        let h = sna(&log, SnaMetric::Handover).unwrap();
        assert_eq!(h.skipped_events, 1);
        assert_eq!(h.value("r1", "r2"), Some(1.0));
        assert_eq!(
            sna(&log_of(&[&[("a", "")]]), SnaMetric::Handover),
            Err(AnalyticsError::NoResources)
        );
    }
}
