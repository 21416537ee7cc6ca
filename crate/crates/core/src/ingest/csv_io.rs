//! CSV import into an event stream (RFC 4180, header row required) and CSV export.

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use indexmap::IndexSet;

use super::IngestError;
use crate::eventlog::{AttributeValue, Event, EventStream, Timestamp, CASE_ID_KEY, CONCEPT_NAME, TIME_TIMESTAMP};

#[derive(Debug, Clone, PartialEq)]
pub struct CsvMapping {
    pub case_column: String,
    pub activity_column: String,
    pub timestamp_column: Option<String>,
    /// chrono format string; ISO-8601 when absent.
    pub timestamp_format: Option<String>,
    pub delimiter: u8,
}

impl Default for CsvMapping {
    fn default() -> Self {
        CsvMapping {
            case_column: CASE_ID_KEY.to_string(),
            activity_column: CONCEPT_NAME.to_string(),
            timestamp_column: Some(TIME_TIMESTAMP.to_string()),
            timestamp_format: None,
            delimiter: b',',
        }
    }
}

impl CsvMapping {
    pub fn new(case_column: &str, activity_column: &str) -> Self {
        CsvMapping {
            case_column: case_column.to_string(),
            activity_column: activity_column.to_string(),
            timestamp_column: None,
            timestamp_format: None,
            delimiter: b',',
        }
    }

    pub fn with_timestamp(mut self, column: &str, format: Option<&str>) -> Self {
        self.timestamp_column = Some(column.to_string());
        self.timestamp_format = format.map(str::to_string);
        self
    }

    fn validate(&self) -> Result<(), IngestError> {
        if self.case_column == self.activity_column {
            return Err(IngestError::InvalidMapping(
                "case and activity columns must differ".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvImport {
    pub stream: EventStream,
    /// 0-based data-row indices dropped because their case identifier was empty.
    pub skipped_rows: Vec<usize>,
}

pub fn import_csv(source: &[u8], mapping: &CsvMapping) -> Result<EventStream, IngestError> {
    import_csv_with_report(source, mapping).map(|r| r.stream)
}

pub fn import_csv_with_report(source: &[u8], mapping: &CsvMapping) -> Result<CsvImport, IngestError> {
    mapping.validate()?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(mapping.delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(source);
    let headers = reader.headers().map_err(csv_error)?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let case_idx = column(&mapping.case_column)?;
    let activity_idx = column(&mapping.activity_column)?;
    let ts_idx = match &mapping.timestamp_column {
        Some(name) => Some(column(name)?),
        None => None,
    };

    let mut events = Vec::new();
    let mut skipped_rows = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let case_id = record.get(case_idx).unwrap_or("");
        if case_id.is_empty() {
            skipped_rows.push(row);
            continue;
        }
        let mut event = Event::new();
        event.set(CASE_ID_KEY, case_id);
        event.set(CONCEPT_NAME, record.get(activity_idx).unwrap_or(""));
        if let Some(idx) = ts_idx {
            let raw = record.get(idx).unwrap_or("");
            let ts =
                parse_timestamp(raw, mapping.timestamp_format.as_deref()).ok_or_else(|| IngestError::BadTimestamp {
                    row,
                    line,
                    value: raw.to_string(),
                })?;
            event.set(TIME_TIMESTAMP, ts);
        }
        for (idx, value) in record.iter().enumerate() {
            if idx == case_idx || idx == activity_idx || Some(idx) == ts_idx || value.is_empty() {
                continue;
            }
            event.set(&headers[idx], value);
        }
        events.push(event);
    }
    Ok(CsvImport {
        stream: EventStream::from_events(events),
        skipped_rows,
    })
}

fn parse_timestamp(raw: &str, format: Option<&str>) -> Option<Timestamp> {
    match format {
        None => Timestamp::parse(raw).ok(),
        Some(fmt) => {
            if let Ok(dt) = DateTime::parse_from_str(raw, fmt) {
                return Some(Timestamp::from_datetime(dt));
            }
            if let Ok(naive) = NaiveDateTime::parse_from_str(raw, fmt) {
                return Some(Timestamp::from_utc(naive.and_utc()));
            }
            NaiveDate::parse_from_str(raw, fmt)
                .ok()
                .and_then(|d| d.and_hms_opt(0, 0, 0))
                .map(|naive| Timestamp::from_utc(naive.and_utc()))
        }
    }
}

fn csv_error(err: csv::Error) -> IngestError {
    let line = err.position().map_or(0, |p| p.line());
    IngestError::Csv {
        line,
        message: err.to_string(),
    }
}

/// Writes a stream as CSV. Columns: case key, `concept:name`, `time:timestamp` (when present),
/// then every other key in order of first appearance.
pub fn export_csv(stream: &EventStream) -> Vec<u8> {
    let mut columns: IndexSet<String> = IndexSet::new();
    columns.insert(stream.case_key.clone());
    columns.insert(CONCEPT_NAME.to_string());
    if stream.events.iter().any(|e| e.get(TIME_TIMESTAMP).is_some()) {
        columns.insert(TIME_TIMESTAMP.to_string());
    }
    for event in &stream.events {
        for key in event.attributes.keys() {
            columns.insert(key.clone());
        }
    }
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    writer
        .write_record(columns.iter())
        .expect("writing to memory cannot fail");
    for event in &stream.events {
        let row = columns
            .iter()
            .map(|c| event.get(c).map(AttributeValue::to_string).unwrap_or_default());
        writer.write_record(row).expect("writing to memory cannot fail");
    }
    writer.into_inner().expect("flushing memory buffer")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eventlog::convert_to_log;

    #[test]
    fn two_rows_one_case() {
        let csv = b"case,act\n1,a\n1,b\n";
        let stream = import_csv(csv, &CsvMapping::new("case", "act")).unwrap();
        assert_eq!(stream.len(), 2);
        let ids: Vec<_> = stream
            .events
            .iter()
            .map(|e| e.get(CASE_ID_KEY).unwrap().to_string())
            .collect();
        assert_eq!(ids, vec!["1", "1"]);
        assert_eq!(
            stream.events[1].get(CONCEPT_NAME),
            Some(&AttributeValue::Text("b".into()))
        );
    }

    #[test]
    fn missing_column() {
        let err = import_csv(b"id,act\n1,a\n", &CsvMapping::new("case", "act")).unwrap_err();
        assert_eq!(err, IngestError::MissingColumn("case".into()));
    }

    #[test]
    fn same_case_and_activity_column_rejected() {
        let err = import_csv(b"a\n1\n", &CsvMapping::new("a", "a")).unwrap_err();
        assert!(matches!(err, IngestError::InvalidMapping(_)));
    }

    #[test]
    fn timestamps_and_extra_columns() {
        let csv = "case;act;when;who\n1;a;01/02/2020 10:00;\"Smith; J\"\n1;b;01/02/2020 11:30;\n";
        let mapping = CsvMapping {
            delimiter: b';',
            ..CsvMapping::new("case", "act").with_timestamp("when", Some("%d/%m/%Y %H:%M"))
        };
        let stream = import_csv(csv.as_bytes(), &mapping).unwrap();
        let first = &stream.events[0];
        assert_eq!(first.timestamp().unwrap().as_str(), "2020-02-01T10:00:00Z");
        assert_eq!(first.get("who"), Some(&AttributeValue::Text("Smith; J".into())));
        assert!(stream.events[1].get("who").is_none());
    }

    #[test]
    fn bad_timestamp_reports_row() {
        let csv = b"case,act,ts\n1,a,2020-01-01T00:00:00Z\n1,b,later\n";
        let mapping = CsvMapping::new("case", "act").with_timestamp("ts", None);
        match import_csv(csv, &mapping).unwrap_err() {
            IngestError::BadTimestamp { row, line, .. } => {
                assert_eq!(row, 1);
                assert_eq!(line, 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_case_rows_are_reported() {
        let csv = b"case,act\n1,a\n,b\n2,c\n";
        let report = import_csv_with_report(csv, &CsvMapping::new("case", "act")).unwrap();
        assert_eq!(report.stream.len(), 2);
        assert_eq!(report.skipped_rows, vec![1]);
    }

    #[test]
    fn synthetic_ten_thousand_rows() {
        let cases = 137usize;
        let mut csv = String::from("case,act\n");
        for i in 0..10_000usize {
            csv.push_str(&format!("c{},act{}\n", (i * 7919) % cases, i % 5));
        }
        let stream = import_csv(csv.as_bytes(), &CsvMapping::new("case", "act")).unwrap();
        assert_eq!(stream.len(), 10_000);
        let log = convert_to_log(&stream).unwrap();
        assert_eq!(log.traces.len(), cases);
        assert_eq!(log.event_count(), 10_000);
    }

    #[test]
    fn export_then_import() {
        let csv = b"case:concept:name,concept:name,time:timestamp,who\n1,a,2020-01-01T00:00:00Z,x\n2,b,2020-01-01T01:00:00Z,\n";
        let stream = import_csv(csv, &CsvMapping::default()).unwrap();
        let out = export_csv(&stream);
        assert_eq!(out, csv.to_vec());
    }
}
