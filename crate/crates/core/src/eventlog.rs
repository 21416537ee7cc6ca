//! Event data object model: events, traces, logs, streams and classifiers.
//!
//! An [`EventLog`] groups events into traces (one per case); an [`EventStream`] is a flat list of
//! events that carry their case identifier as an attribute. [`convert_to_stream`] and
//! [`convert_to_log`] move between the two without loss.

use std::fmt;

use chrono::{DateTime, FixedOffset, NaiveDateTime, SecondsFormat, Utc};
use indexmap::IndexMap;
use thiserror::Error;

/// Standard XES key for activity names and case identifiers.
pub const CONCEPT_NAME: &str = "concept:name";
pub const TIME_TIMESTAMP: &str = "time:timestamp";
pub const ORG_RESOURCE: &str = "org:resource";
pub const LIFECYCLE_TRANSITION: &str = "lifecycle:transition";
/// Prefix applied to trace attributes when they are copied onto stream events.
pub const CASE_PREFIX: &str = "case:";
/// Default case-identifier key of an [`EventStream`].
pub const CASE_ID_KEY: &str = "case:concept:name";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EventLogError {
    #[error("event {index} has no case identifier under `{key}`")]
    MissingCaseId { index: usize, key: String },
    #[error("event has no attribute `{0}`")]
    MissingKey(String),
    #[error("duplicate case identifier `{0}`")]
    DuplicateCaseId(String),
    #[error("invalid timestamp `{0}`")]
    BadTimestamp(String),
}

/// A timestamp that remembers the exact ISO-8601 text it came from.
#[derive(Debug, Clone)]
pub struct Timestamp {
    instant: DateTime<FixedOffset>,
    text: String,
}

impl Timestamp {
    /// Parses RFC 3339 / ISO-8601. A value without offset is read as UTC.
    pub fn parse(text: &str) -> Result<Self, EventLogError> {
        let trimmed = text.trim();
        let instant = DateTime::parse_from_rfc3339(trimmed)
            .or_else(|_| DateTime::parse_from_str(trimmed, "%Y-%m-%dT%H:%M:%S%.f%z"))
            .or_else(|_| {
                NaiveDateTime::parse_from_str(trimmed, "%Y-%m-%dT%H:%M:%S%.f")
                    .or_else(|_| NaiveDateTime::parse_from_str(trimmed, "%Y-%m-%d %H:%M:%S%.f"))
                    .map(|naive| naive.and_utc().fixed_offset())
            })
            .map_err(|_| EventLogError::BadTimestamp(text.to_string()))?;
        Ok(Timestamp {
            instant,
            text: text.to_string(),
        })
    }

    /// Renders `instant` as RFC 3339 with millisecond precision when needed.
    pub fn from_datetime(instant: DateTime<FixedOffset>) -> Self {
        let text = instant.to_rfc3339_opts(SecondsFormat::AutoSi, true);
        Timestamp { instant, text }
    }

    pub fn from_utc(instant: DateTime<Utc>) -> Self {
        Self::from_datetime(instant.fixed_offset())
    }

    pub fn instant(&self) -> DateTime<FixedOffset> {
        self.instant
    }

    /// Seconds since the Unix epoch, with sub-second precision.
    pub fn epoch_seconds(&self) -> f64 {
        let utc = self.instant.with_timezone(&Utc);
        utc.timestamp() as f64 + f64::from(utc.timestamp_subsec_nanos()) * 1e-9
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl PartialEq for Timestamp {
    fn eq(&self, other: &Self) -> bool {
        self.instant == other.instant && self.text == other.text
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AttributeValue {
    Text(String),
    Integer(i64),
    Real(f64),
    Timestamp(Timestamp),
    Boolean(bool),
}

impl AttributeValue {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            AttributeValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_timestamp(&self) -> Option<&Timestamp> {
        match self {
            AttributeValue::Timestamp(t) => Some(t),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            AttributeValue::Integer(i) => Some(*i as f64),
            AttributeValue::Real(r) => Some(*r),
            _ => None,
        }
    }
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeValue::Text(s) => f.write_str(s),
            AttributeValue::Integer(i) => write!(f, "{i}"),
            AttributeValue::Real(r) => write!(f, "{r}"),
            AttributeValue::Timestamp(t) => f.write_str(t.as_str()),
            AttributeValue::Boolean(b) => write!(f, "{b}"),
        }
    }
}

impl From<&str> for AttributeValue {
    fn from(s: &str) -> Self {
        AttributeValue::Text(s.to_string())
    }
}

impl From<String> for AttributeValue {
    fn from(s: String) -> Self {
        AttributeValue::Text(s)
    }
}

impl From<i64> for AttributeValue {
    fn from(i: i64) -> Self {
        AttributeValue::Integer(i)
    }
}

impl From<f64> for AttributeValue {
    fn from(r: f64) -> Self {
        AttributeValue::Real(r)
    }
}

impl From<bool> for AttributeValue {
    fn from(b: bool) -> Self {
        AttributeValue::Boolean(b)
    }
}

impl From<Timestamp> for AttributeValue {
    fn from(t: Timestamp) -> Self {
        AttributeValue::Timestamp(t)
    }
}

/// Insertion-ordered attribute map.
pub type Attributes = IndexMap<String, AttributeValue>;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Event {
    pub attributes: Attributes,
}

impl Event {
    pub fn new() -> Self {
        Self::default()
    }

    /// Event with only `concept:name` set.
    pub fn with_activity(activity: &str) -> Self {
        let mut event = Event::new();
        event.set(CONCEPT_NAME, activity);
        event
    }

    pub fn set(&mut self, key: &str, value: impl Into<AttributeValue>) -> &mut Self {
        self.attributes.insert(key.to_string(), value.into());
        self
    }

    pub fn get(&self, key: &str) -> Option<&AttributeValue> {
        self.attributes.get(key)
    }

    pub fn timestamp(&self) -> Option<&Timestamp> {
        self.get(TIME_TIMESTAMP).and_then(AttributeValue::as_timestamp)
    }

    pub fn resource(&self) -> Option<String> {
        self.get(ORG_RESOURCE).map(ToString::to_string)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trace {
    pub attributes: Attributes,
    pub events: Vec<Event>,
}

impl Trace {
    pub fn new(case_id: &str) -> Self {
        let mut attributes = Attributes::new();
        attributes.insert(CONCEPT_NAME.to_string(), case_id.into());
        Trace {
            attributes,
            events: Vec::new(),
        }
    }

    /// Trace whose events carry only the given activity names.
    pub fn from_activities<S: AsRef<str>>(case_id: &str, activities: &[S]) -> Self {
        let mut trace = Trace::new(case_id);
        trace.events = activities.iter().map(|a| Event::with_activity(a.as_ref())).collect();
        trace
    }

    pub fn case_id(&self) -> Option<String> {
        self.attributes.get(CONCEPT_NAME).map(ToString::to_string)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Activity labels under the default classifier.
    pub fn activities(&self) -> Result<Vec<String>, EventLogError> {
        self.events.iter().map(activity).collect()
    }

    /// Timestamps of all events, or `None` if some event has none.
    pub fn timestamps(&self) -> Option<Vec<&Timestamp>> {
        self.events.iter().map(Event::timestamp).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classifier {
    pub name: String,
    pub keys: Vec<String>,
}

impl Classifier {
    pub fn new(name: &str, keys: &[&str]) -> Self {
        Classifier {
            name: name.to_string(),
            keys: keys.iter().map(|k| k.to_string()).collect(),
        }
    }
}

impl Default for Classifier {
    fn default() -> Self {
        Classifier::new("Activity", &[CONCEPT_NAME])
    }
}

/// `<extension>` declaration kept for round-tripping.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub name: String,
    pub prefix: String,
    pub uri: String,
}

/// `<global>` default attributes for a scope (`trace` or `event`).
#[derive(Debug, Clone, PartialEq)]
pub struct Global {
    pub scope: String,
    pub attributes: Attributes,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventLog {
    pub extensions: Vec<Extension>,
    pub globals: Vec<Global>,
    pub classifiers: Vec<Classifier>,
    pub attributes: Attributes,
    pub traces: Vec<Trace>,
}

impl EventLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Log of traces named `0`, `1`, ... from activity sequences.
    pub fn from_activity_traces<S: AsRef<str>>(traces: &[Vec<S>]) -> Self {
        let mut log = EventLog::new();
        log.traces = traces
            .iter()
            .enumerate()
            .map(|(i, t)| Trace::from_activities(&i.to_string(), t))
            .collect();
        log
    }

    /// Same log-level metadata with different traces.
    pub fn with_traces(&self, traces: Vec<Trace>) -> EventLog {
        EventLog {
            extensions: self.extensions.clone(),
            globals: self.globals.clone(),
            classifiers: self.classifiers.clone(),
            attributes: self.attributes.clone(),
            traces,
        }
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn event_count(&self) -> usize {
        self.traces.iter().map(Trace::len).sum()
    }

    /// Activity sequence of every trace, in log order.
    pub fn activity_traces(&self) -> Result<Vec<Vec<String>>, EventLogError> {
        self.traces.iter().map(Trace::activities).collect()
    }

    /// Checks that trace case identifiers are unique (traces without one are ignored).
    pub fn check_unique_case_ids(&self) -> Result<(), EventLogError> {
        let mut seen = std::collections::HashSet::new();
        for trace in &self.traces {
            if let Some(id) = trace.case_id() {
                if !seen.insert(id.clone()) {
                    return Err(EventLogError::DuplicateCaseId(id));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventStream {
    pub case_key: String,
    pub extensions: Vec<Extension>,
    pub globals: Vec<Global>,
    pub classifiers: Vec<Classifier>,
    pub attributes: Attributes,
    pub events: Vec<Event>,
}

impl Default for EventStream {
    fn default() -> Self {
        EventStream {
            case_key: CASE_ID_KEY.to_string(),
            extensions: Vec::new(),
            globals: Vec::new(),
            classifiers: Vec::new(),
            attributes: Attributes::new(),
            events: Vec::new(),
        }
    }
}

impl EventStream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_events(events: Vec<Event>) -> Self {
        EventStream {
            events,
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Stable sort of events by timestamp; events without one keep their relative position at
    /// the end.
    pub fn sort_by_timestamp(&mut self) {
        self.events.sort_by(|a, b| match (a.timestamp(), b.timestamp()) {
            (Some(x), Some(y)) => x.instant().cmp(&y.instant()),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        });
    }
}

pub enum EventData {
    Log(EventLog),
    Stream(EventStream),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataKind {
    Log,
    Stream,
}

/// Converts event data to the requested representation. Never mutates the input.
pub fn convert(data: &EventData, target: DataKind) -> Result<EventData, EventLogError> {
    Ok(match (data, target) {
        (EventData::Log(log), DataKind::Log) => EventData::Log(log.clone()),
        (EventData::Stream(s), DataKind::Stream) => EventData::Stream(s.clone()),
        (EventData::Log(log), DataKind::Stream) => EventData::Stream(convert_to_stream(log)),
        (EventData::Stream(s), DataKind::Log) => EventData::Log(convert_to_log(s)?),
    })
}

/// Flattens traces; each trace attribute `k` is copied onto its events as `case:k`.
pub fn convert_to_stream(log: &EventLog) -> EventStream {
    let mut events = Vec::with_capacity(log.event_count());
    for trace in &log.traces {
        for event in &trace.events {
            let mut attributes = Attributes::with_capacity(trace.attributes.len() + event.attributes.len());
            for (k, v) in &trace.attributes {
                attributes.insert(format!("{CASE_PREFIX}{k}"), v.clone());
            }
            for (k, v) in &event.attributes {
                attributes.insert(k.clone(), v.clone());
            }
            events.push(Event { attributes });
        }
    }
    EventStream {
        case_key: CASE_ID_KEY.to_string(),
        extensions: log.extensions.clone(),
        globals: log.globals.clone(),
        classifiers: log.classifiers.clone(),
        attributes: log.attributes.clone(),
        events,
    }
}

/// Groups stream events by case identifier.
///
/// Traces appear in order of first appearance of their case; events keep stream order. The
/// `case:`-prefixed attributes of a case's first event become the trace attributes and are
/// stripped from all events of that case.
pub fn convert_to_log(stream: &EventStream) -> Result<EventLog, EventLogError> {
    let mut traces: IndexMap<String, Trace> = IndexMap::new();
    for (index, event) in stream.events.iter().enumerate() {
        let case_id = event
            .get(&stream.case_key)
            .map(ToString::to_string)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| EventLogError::MissingCaseId {
                index,
                key: stream.case_key.clone(),
            })?;
        let trace = traces.entry(case_id).or_insert_with(|| {
            let mut attributes: Attributes = event
                .attributes
                .iter()
                .filter_map(|(k, v)| k.strip_prefix(CASE_PREFIX).map(|s| (s.to_string(), v.clone())))
                .collect();
            if stream.case_key != CASE_ID_KEY && !attributes.contains_key(CONCEPT_NAME) {
                if let Some(v) = event.get(&stream.case_key) {
                    attributes.insert(CONCEPT_NAME.to_string(), v.clone());
                }
            }
            Trace {
                attributes,
                events: Vec::new(),
            }
        });
        let attributes = event
            .attributes
            .iter()
            .filter(|(k, _)| !k.starts_with(CASE_PREFIX) && **k != stream.case_key)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        trace.events.push(Event { attributes });
    }
    Ok(EventLog {
        extensions: stream.extensions.clone(),
        globals: stream.globals.clone(),
        classifiers: stream.classifiers.clone(),
        attributes: stream.attributes.clone(),
        traces: traces.into_values().collect(),
    })
}

/// Label of `event` under `classifier`: the `+`-joined renderings of its keys.
pub fn classify(event: &Event, classifier: &Classifier) -> Result<String, EventLogError> {
    let mut parts = Vec::with_capacity(classifier.keys.len());
    for key in &classifier.keys {
        let value = event.get(key).ok_or_else(|| EventLogError::MissingKey(key.clone()))?;
        parts.push(value.to_string());
    }
    Ok(parts.join("+"))
}

/// Activity label under the default classifier. All algorithms read labels through here.
pub fn activity(event: &Event) -> Result<String, EventLogError> {
    match event.get(CONCEPT_NAME) {
        Some(v) => Ok(v.to_string()),
        None => Err(EventLogError::MissingKey(CONCEPT_NAME.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream_event(case: &str, act: &str) -> Event {
        let mut e = Event::with_activity(act);
        e.set(CASE_ID_KEY, case);
        e
    }

    #[test]
    fn stream_groups_by_first_appearance() {
        let stream = EventStream::from_events(vec![
            stream_event("A", "e1"),
            stream_event("B", "e2"),
            stream_event("A", "e3"),
        ]);
        let log = convert_to_log(&stream).unwrap();
        assert_eq!(log.traces.len(), 2);
        assert_eq!(log.traces[0].case_id().as_deref(), Some("A"));
        assert_eq!(log.traces[0].activities().unwrap(), vec!["e1", "e3"]);
        assert_eq!(log.traces[1].activities().unwrap(), vec!["e2"]);
    }

    #[test]
    fn empty_stream_gives_empty_log() {
        let log = convert_to_log(&EventStream::new()).unwrap();
        assert!(log.traces.is_empty());
    }

    #[test]
    fn missing_case_id_is_reported() {
        let stream = EventStream::from_events(vec![stream_event("A", "x"), Event::with_activity("y")]);
        assert_eq!(
            convert_to_log(&stream),
            Err(EventLogError::MissingCaseId {
                index: 1,
                key: CASE_ID_KEY.into()
            })
        );
    }

    #[test]
    fn log_to_stream_prefixes_trace_attributes() {
        let mut log = EventLog::from_activity_traces(&[vec!["a", "b"]]);
        log.traces[0].attributes.insert("cost".into(), 3i64.into());
        let stream = convert_to_stream(&log);
        assert_eq!(stream.events.len(), 2);
        let keys: Vec<_> = stream.events[0].attributes.keys().cloned().collect();
        assert_eq!(keys, vec!["case:concept:name", "case:cost", "concept:name"]);
        assert_eq!(convert_to_log(&stream).unwrap(), log);
    }

    #[test]
    fn classify_default_and_composite() {
        let mut e = Event::with_activity("decide");
        assert_eq!(classify(&e, &Classifier::default()).unwrap(), "decide");
        e.set(LIFECYCLE_TRANSITION, "complete");
        let c = Classifier::new("full", &[CONCEPT_NAME, LIFECYCLE_TRANSITION]);
        assert_eq!(classify(&e, &c).unwrap(), "decide+complete");
    }

    #[test]
    fn classify_missing_key() {
        let e = Event::new();
        assert_eq!(
            classify(&e, &Classifier::default()),
            Err(EventLogError::MissingKey(CONCEPT_NAME.into()))
        );
    }

    #[test]
    fn timestamp_keeps_original_text() {
        let t = Timestamp::parse("2010-12-30T11:02:00.000+01:00").unwrap();
        assert_eq!(t.as_str(), "2010-12-30T11:02:00.000+01:00");
        assert_eq!(t.instant().offset().local_minus_utc(), 3600);
        let naive = Timestamp::parse("2020-01-01T00:00:00").unwrap();
        assert_eq!(naive.epoch_seconds(), 1_577_836_800.0);
        assert!(Timestamp::parse("yesterday").is_err());
    }

    #[test]
    fn duplicate_case_ids_detected() {
        let mut log = EventLog::from_activity_traces(&[vec!["a"], vec!["b"]]);
        assert!(log.check_unique_case_ids().is_ok());
        log.traces[1] = Trace::from_activities("0", &["b"]);
        assert_eq!(
            log.check_unique_case_ids(),
            Err(EventLogError::DuplicateCaseId("0".into()))
        );
    }
}
