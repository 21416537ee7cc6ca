//! Parsing and serialization of event data (XES and CSV).

mod csv_io;
mod xes;

use std::fmt;

use thiserror::Error;

pub use self::csv_io::{export_csv, import_csv, import_csv_with_report, CsvImport, CsvMapping};
pub use self::xes::{export_xes, import_xes, import_xes_with_warnings, XesImport};

/// 1-based line and column plus the byte offset into the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

impl Position {
    pub fn from_offset(source: &[u8], offset: usize) -> Self {
        let offset = offset.min(source.len());
        let prefix = &source[..offset];
        let line = prefix.iter().filter(|&&b| b == b'\n').count() + 1;
        let line_start = prefix.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
        let column = String::from_utf8_lossy(&prefix[line_start..]).chars().count() + 1;
        Position { line, column, offset }
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportWarning {
    pub position: Position,
    pub message: String,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("XML syntax error at {position}: {message}")]
    XmlSyntax { position: Position, message: String },
    #[error("<{element}> at {position} lacks attribute `{attribute}`")]
    MissingXmlAttribute {
        position: Position,
        element: String,
        attribute: String,
    },
    #[error("bad {kind} value `{value}` for key `{key}` at {position}")]
    BadValue {
        position: Position,
        key: String,
        value: String,
        kind: String,
    },
    #[error("CSV header has no column `{0}`")]
    MissingColumn(String),
    #[error("bad timestamp `{value}` in data row {row} (line {line})")]
    BadTimestamp { row: usize, line: u64, value: String },
    #[error("CSV error at line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("invalid CSV mapping: {0}")]
    InvalidMapping(String),
}
