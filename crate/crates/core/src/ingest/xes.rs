//! XES import and export.
//!
//! Supported attribute types are `string`, `date`, `int`, `float`, `boolean` and `id` (read as a
//! string). Nested attributes are flattened into `/`-joined keys. `list` and `container` values are
//! flattened the same way when their children have distinct keys; otherwise the element is
//! skipped and reported as a warning.

use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event as XmlEvent};
use quick_xml::Reader;

use super::{ImportWarning, IngestError, Position};
use crate::eventlog::{AttributeValue, Attributes, Classifier, Event, EventLog, Extension, Global, Timestamp, Trace};

/// Result of a XES import: the log plus any elements that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct XesImport {
    pub log: EventLog,
    pub warnings: Vec<ImportWarning>,
}

pub fn import_xes(source: &[u8]) -> Result<EventLog, IngestError> {
    import_xes_with_warnings(source).map(|import| import.log)
}

pub fn import_xes_with_warnings(source: &[u8]) -> Result<XesImport, IngestError> {
    let text = std::str::from_utf8(source).map_err(|e| IngestError::XmlSyntax {
        position: Position::from_offset(source, e.valid_up_to()),
        message: "document is not valid UTF-8".to_string(),
    })?;
    let mut parser = XesParser::new(text);
    let log = parser.parse_document()?;
    Ok(XesImport {
        log,
        warnings: parser.warnings,
    })
}

enum Node<'a> {
    Open(BytesStart<'a>),
    Leaf(BytesStart<'a>),
    Close,
    End,
}

struct XesParser<'a> {
    source: &'a str,
    reader: Reader<&'a [u8]>,
    warnings: Vec<ImportWarning>,
    /// Byte offset where the most recently read element starts.
    element_start: usize,
}

impl<'a> XesParser<'a> {
    fn new(source: &'a str) -> Self {
        let mut reader = Reader::from_str(source);
        let config = reader.config_mut();
        config.trim_text(true);
        config.check_end_names = true;
        XesParser {
            source,
            reader,
            warnings: Vec::new(),
            element_start: 0,
        }
    }

    fn position(&self) -> Position {
        Position::from_offset(self.source.as_bytes(), self.element_start)
    }

    fn syntax(&self, offset: usize, message: String) -> IngestError {
        IngestError::XmlSyntax {
            position: Position::from_offset(self.source.as_bytes(), offset),
            message,
        }
    }

    /// Next structural node; text, comments and declarations are skipped.
    fn next(&mut self) -> Result<Node<'a>, IngestError> {
        loop {
            let before = self.reader.buffer_position() as usize;
            let event = match self.reader.read_event() {
                Ok(event) => event,
                Err(err) => {
                    let offset = self.reader.error_position() as usize;
                    return Err(self.syntax(offset, err.to_string()));
                }
            };
            match event {
                XmlEvent::Start(start) => {
                    self.element_start = before;
                    return Ok(Node::Open(start));
                }
                XmlEvent::Empty(start) => {
                    self.element_start = before;
                    return Ok(Node::Leaf(start));
                }
                XmlEvent::End(_) => return Ok(Node::Close),
                XmlEvent::Eof => return Ok(Node::End),
                _ => continue,
            }
        }
    }

    fn unexpected_eof(&self) -> IngestError {
        self.syntax(self.source.len(), "unexpected end of document".to_string())
    }

    fn parse_document(&mut self) -> Result<EventLog, IngestError> {
        let mut log = EventLog::new();
        match self.next()? {
            Node::Open(start) if local_name(&start) == "log" => self.parse_log_body(&mut log)?,
            Node::Leaf(start) if local_name(&start) == "log" => {}
            Node::Open(start) | Node::Leaf(start) => {
                let name = local_name(&start);
                return Err(self.syntax(self.element_start, format!("expected <log> root, found <{name}>")));
            }
            Node::Close => return Err(self.syntax(self.element_start, "unexpected closing tag".into())),
            Node::End => return Err(self.unexpected_eof()),
        }
        match self.next()? {
            Node::End => Ok(log),
            Node::Close => Err(self.syntax(self.element_start, "unexpected closing tag".into())),
            Node::Open(_) | Node::Leaf(_) => Err(self.syntax(self.element_start, "content after </log>".into())),
        }
    }

    fn parse_log_body(&mut self, log: &mut EventLog) -> Result<(), IngestError> {
        loop {
            match self.next()? {
                Node::Close => return Ok(()),
                Node::End => return Err(self.unexpected_eof()),
                Node::Leaf(start) => match local_name(&start).as_str() {
                    "extension" => log.extensions.push(self.parse_extension(&start)?),
                    "classifier" => log.classifiers.push(self.parse_classifier(&start)?),
                    "global" => log.globals.push(Global {
                        scope: self.attr(&start, "scope")?.unwrap_or_else(|| "event".into()),
                        attributes: Attributes::new(),
                    }),
                    "trace" => log.traces.push(Trace::default()),
                    _ => {
                        let attrs = self.parse_attribute(&start, false)?;
                        extend(&mut log.attributes, attrs);
                    }
                },
                Node::Open(start) => match local_name(&start).as_str() {
                    "trace" => {
                        let trace = self.parse_trace()?;
                        log.traces.push(trace);
                    }
                    "global" => {
                        let scope = self.attr(&start, "scope")?.unwrap_or_else(|| "event".into());
                        let mut attributes = Attributes::new();
                        self.parse_attribute_container(&mut attributes)?;
                        log.globals.push(Global { scope, attributes });
                    }
                    "extension" => {
                        let ext = self.parse_extension(&start)?;
                        self.skip_subtree()?;
                        log.extensions.push(ext);
                    }
                    "classifier" => {
                        let classifier = self.parse_classifier(&start)?;
                        self.skip_subtree()?;
                        log.classifiers.push(classifier);
                    }
                    _ => {
                        let attrs = self.parse_attribute(&start, true)?;
                        extend(&mut log.attributes, attrs);
                    }
                },
            }
        }
    }

    fn parse_trace(&mut self) -> Result<Trace, IngestError> {
        let mut trace = Trace::default();
        loop {
            match self.next()? {
                Node::Close => return Ok(trace),
                Node::End => return Err(self.unexpected_eof()),
                Node::Leaf(start) => {
                    if local_name(&start) == "event" {
                        trace.events.push(Event::new());
                    } else {
                        let attrs = self.parse_attribute(&start, false)?;
                        extend(&mut trace.attributes, attrs);
                    }
                }
                Node::Open(start) => {
                    if local_name(&start) == "event" {
                        let mut event = Event::new();
                        self.parse_attribute_container(&mut event.attributes)?;
                        trace.events.push(event);
                    } else {
                        let attrs = self.parse_attribute(&start, true)?;
                        extend(&mut trace.attributes, attrs);
                    }
                }
            }
        }
    }

    /// Reads attribute children until the enclosing element closes.
    fn parse_attribute_container(&mut self, into: &mut Attributes) -> Result<(), IngestError> {
        loop {
            match self.next()? {
                Node::Close => return Ok(()),
                Node::End => return Err(self.unexpected_eof()),
                Node::Leaf(start) => {
                    let attrs = self.parse_attribute(&start, false)?;
                    extend(into, attrs);
                }
                Node::Open(start) => {
                    let attrs = self.parse_attribute(&start, true)?;
                    extend(into, attrs);
                }
            }
        }
    }

    /// Parses one attribute element (and its nested children when `open`) into flattened
    /// key/value pairs.
    fn parse_attribute(
        &mut self,
        start: &BytesStart<'a>,
        open: bool,
    ) -> Result<Vec<(String, AttributeValue)>, IngestError> {
        let offset = self.element_start;
        let kind = local_name(start);
        match kind.as_str() {
            "string" | "date" | "int" | "float" | "boolean" | "id" => {
                let key = self.required_attr(start, "key")?;
                let raw = self.required_attr(start, "value")?;
                let value = parse_value(&kind, &raw).ok_or_else(|| IngestError::BadValue {
                    position: Position::from_offset(self.source.as_bytes(), offset),
                    key: key.clone(),
                    value: raw.clone(),
                    kind: kind.clone(),
                })?;
                let mut out = vec![(key.clone(), value)];
                if open {
                    for (child_key, child_value) in self.parse_nested()? {
                        out.push((format!("{key}/{child_key}"), child_value));
                    }
                }
                Ok(out)
            }
            "list" | "container" => {
                let key = self.required_attr(start, "key")?;
                if !open {
                    return Ok(Vec::new());
                }
                let children = self.parse_nested()?;
                let mut seen = std::collections::HashSet::new();
                if children.iter().all(|(k, _)| seen.insert(k.clone())) {
                    Ok(children.into_iter().map(|(k, v)| (format!("{key}/{k}"), v)).collect())
                } else {
                    self.warnings.push(ImportWarning {
                        position: Position::from_offset(self.source.as_bytes(), offset),
                        message: format!("{kind} `{key}` has repeated child keys; skipped"),
                    });
                    Ok(Vec::new())
                }
            }
            _ => {
                self.warnings.push(ImportWarning {
                    position: Position::from_offset(self.source.as_bytes(), offset),
                    message: format!("unsupported element <{kind}> skipped"),
                });
                if open {
                    self.skip_subtree()?;
                }
                Ok(Vec::new())
            }
        }
    }

    /// Children of an attribute element. `<values>` wrappers (used by lists) are transparent.
    fn parse_nested(&mut self) -> Result<Vec<(String, AttributeValue)>, IngestError> {
        let mut out = Vec::new();
        loop {
            match self.next()? {
                Node::Close => return Ok(out),
                Node::End => return Err(self.unexpected_eof()),
                Node::Leaf(start) => {
                    if local_name(&start) != "values" {
                        out.extend(self.parse_attribute(&start, false)?);
                    }
                }
                Node::Open(start) => {
                    if local_name(&start) == "values" {
                        out.extend(self.parse_nested()?);
                    } else {
                        out.extend(self.parse_attribute(&start, true)?);
                    }
                }
            }
        }
    }

    fn skip_subtree(&mut self) -> Result<(), IngestError> {
        let mut depth = 1usize;
        while depth > 0 {
            match self.next()? {
                Node::Open(_) => depth += 1,
                Node::Close => depth -= 1,
                Node::Leaf(_) => {}
                Node::End => return Err(self.unexpected_eof()),
            }
        }
        Ok(())
    }

    fn parse_extension(&self, start: &BytesStart<'a>) -> Result<Extension, IngestError> {
        Ok(Extension {
            name: self.attr(start, "name")?.unwrap_or_default(),
            prefix: self.attr(start, "prefix")?.unwrap_or_default(),
            uri: self.attr(start, "uri")?.unwrap_or_default(),
        })
    }

    fn parse_classifier(&self, start: &BytesStart<'a>) -> Result<Classifier, IngestError> {
        let name = self.attr(start, "name")?.unwrap_or_default();
        let keys = split_classifier_keys(&self.required_attr(start, "keys")?);
        Ok(Classifier { name, keys })
    }

    fn attr(&self, start: &BytesStart<'a>, name: &str) -> Result<Option<String>, IngestError> {
        for attr in start.attributes() {
            let attr = attr.map_err(|e| self.syntax(self.element_start, e.to_string()))?;
            if attr.key.as_ref() == name.as_bytes() {
                let value = attr
                    .unescape_value()
                    .map_err(|e| self.syntax(self.element_start, e.to_string()))?;
                return Ok(Some(value.into_owned()));
            }
        }
        Ok(None)
    }

    fn required_attr(&self, start: &BytesStart<'a>, name: &str) -> Result<String, IngestError> {
        self.attr(start, name)?.ok_or_else(|| IngestError::MissingXmlAttribute {
            position: self.position(),
            element: local_name(start),
            attribute: name.to_string(),
        })
    }
}

fn local_name(start: &BytesStart<'_>) -> String {
    String::from_utf8_lossy(start.local_name().as_ref()).into_owned()
}

fn extend(into: &mut Attributes, attrs: Vec<(String, AttributeValue)>) {
    for (k, v) in attrs {
        into.insert(k, v);
    }
}

fn parse_value(kind: &str, raw: &str) -> Option<AttributeValue> {
    Some(match kind {
        "string" | "id" => AttributeValue::Text(raw.to_string()),
        "date" => AttributeValue::Timestamp(Timestamp::parse(raw).ok()?),
        "int" => AttributeValue::Integer(raw.trim().parse().ok()?),
        "float" => AttributeValue::Real(parse_float(raw.trim())?),
        "boolean" => match raw.trim() {
            "true" | "1" => AttributeValue::Boolean(true),
            "false" | "0" => AttributeValue::Boolean(false),
            _ => return None,
        },
        _ => return None,
    })
}

fn parse_float(raw: &str) -> Option<f64> {
    match raw {
        "INF" => Some(f64::INFINITY),
        "-INF" => Some(f64::NEG_INFINITY),
        "NaN" => Some(f64::NAN),
        _ => raw.parse().ok(),
    }
}

fn format_float(value: f64) -> String {
    if value.is_nan() {
        "NaN".into()
    } else if value == f64::INFINITY {
        "INF".into()
    } else if value == f64::NEG_INFINITY {
        "-INF".into()
    } else {
        format!("{value:?}")
    }
}

/// Classifier keys are whitespace separated; single quotes group a key containing spaces.
fn split_classifier_keys(raw: &str) -> Vec<String> {
    let mut keys = Vec::new();
    let mut current = String::new();
    let mut quoted = false;
    for c in raw.chars() {
        match c {
            '\'' => {
                if quoted {
                    keys.push(std::mem::take(&mut current));
                }
                quoted = !quoted;
            }
            c if c.is_whitespace() && !quoted => {
                if !current.is_empty() {
                    keys.push(std::mem::take(&mut current));
                }
            }
            c => current.push(c),
        }
    }
    if !current.is_empty() {
        keys.push(current);
    }
    keys
}

fn join_classifier_keys(keys: &[String]) -> String {
    keys.iter()
        .map(|k| {
            if k.chars().any(char::is_whitespace) {
                format!("'{k}'")
            } else {
                k.clone()
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn escape(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

/// Serializes `log` as XES. Output is deterministic: two-space indentation, attributes in stored
/// order.
pub fn export_xes(log: &EventLog) -> Vec<u8> {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let empty = log.extensions.is_empty()
        && log.globals.is_empty()
        && log.classifiers.is_empty()
        && log.attributes.is_empty()
        && log.traces.is_empty();
    if empty {
        out.push_str("<log/>\n");
        return out.into_bytes();
    }
    out.push_str("<log>\n");
    for ext in &log.extensions {
        let _ = writeln!(
            out,
            "  <extension name=\"{}\" prefix=\"{}\" uri=\"{}\"/>",
            escape(&ext.name),
            escape(&ext.prefix),
            escape(&ext.uri)
        );
    }
    for global in &log.globals {
        if global.attributes.is_empty() {
            let _ = writeln!(out, "  <global scope=\"{}\"/>", escape(&global.scope));
        } else {
            let _ = writeln!(out, "  <global scope=\"{}\">", escape(&global.scope));
            write_attributes(&mut out, &global.attributes, 2);
            out.push_str("  </global>\n");
        }
    }
    for classifier in &log.classifiers {
        let _ = writeln!(
            out,
            "  <classifier name=\"{}\" keys=\"{}\"/>",
            escape(&classifier.name),
            escape(&join_classifier_keys(&classifier.keys))
        );
    }
    write_attributes(&mut out, &log.attributes, 1);
    for trace in &log.traces {
        if trace.attributes.is_empty() && trace.events.is_empty() {
            out.push_str("  <trace/>\n");
            continue;
        }
        out.push_str("  <trace>\n");
        write_attributes(&mut out, &trace.attributes, 2);
        for event in &trace.events {
            if event.attributes.is_empty() {
                out.push_str("    <event/>\n");
            } else {
                out.push_str("    <event>\n");
                write_attributes(&mut out, &event.attributes, 3);
                out.push_str("    </event>\n");
            }
        }
        out.push_str("  </trace>\n");
    }
    out.push_str("</log>\n");
    out.into_bytes()
}

fn write_attributes(out: &mut String, attributes: &Attributes, depth: usize) {
    for (key, value) in attributes {
        let (kind, text) = match value {
            AttributeValue::Text(s) => ("string", s.clone()),
            AttributeValue::Integer(i) => ("int", i.to_string()),
            AttributeValue::Real(r) => ("float", format_float(*r)),
            AttributeValue::Timestamp(t) => ("date", t.as_str().to_string()),
            AttributeValue::Boolean(b) => ("boolean", b.to_string()),
        };
        for _ in 0..depth {
            out.push_str("  ");
        }
        let _ = writeln!(out, "<{kind} key=\"{}\" value=\"{}\"/>", escape(key), escape(&text));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eventlog::CONCEPT_NAME;

    #[test]
    fn minimal_document() {
        let log =
            import_xes(br#"<log><trace><event><string key="concept:name" value="a"/></event></trace></log>"#).unwrap();
        assert_eq!(log.traces.len(), 1);
        assert_eq!(log.traces[0].activities().unwrap(), vec!["a"]);
    }

    #[test]
    fn truncated_document_fails() {
        let err = import_xes(b"<log><trace><event><string key=\"concept:name\" value=\"a\"/>").unwrap_err();
        assert!(matches!(err, IngestError::XmlSyntax { .. }), "{err:?}");
    }

    #[test]
    fn malformed_tag_reports_position() {
        let err = import_xes(b"<log>\n  <trace>\n  </event>\n</log>").unwrap_err();
        match err {
            IngestError::XmlSyntax { position, .. } => assert_eq!(position.line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn typed_values_and_nesting() {
        let doc = r#"<?xml version="1.0" encoding="UTF-8"?>
<log xes.version="1.0">
  <extension name="Concept" prefix="concept" uri="http://www.xes-standard.org/concept.xesext"/>
  <global scope="event"><string key="concept:name" value="__INVALID__"/></global>
  <classifier name="Both" keys="concept:name 'my key'"/>
  <string key="source" value="test"/>
  <trace>
    <string key="concept:name" value="c1"/>
    <event>
      <string key="concept:name" value="a"/>
      <date key="time:timestamp" value="2011-01-01T10:00:00.000+01:00"/>
      <int key="n" value="42"/>
      <float key="x" value="1.5"/>
      <boolean key="ok" value="true"/>
      <id key="uid" value="u-1"/>
      <string key="outer" value="o"><int key="inner" value="7"/></string>
      <list key="items"><values><string key="p" value="1"/><string key="q" value="2"/></values></list>
      <list key="dup"><values><string key="p" value="1"/><string key="p" value="2"/></values></list>
      <weird key="w" value="?"/>
    </event>
  </trace>
</log>"#;
        let import = import_xes_with_warnings(doc.as_bytes()).unwrap();
        let log = import.log;
        assert_eq!(import.warnings.len(), 2);
        assert_eq!(log.extensions.len(), 1);
        assert_eq!(log.globals[0].scope, "event");
        assert_eq!(log.classifiers[0].keys, vec!["concept:name", "my key"]);
        let event = &log.traces[0].events[0];
        assert_eq!(event.get(CONCEPT_NAME), Some(&AttributeValue::Text("a".into())));
        assert_eq!(event.get("n"), Some(&AttributeValue::Integer(42)));
        assert_eq!(event.get("x"), Some(&AttributeValue::Real(1.5)));
        assert_eq!(event.get("ok"), Some(&AttributeValue::Boolean(true)));
        assert_eq!(event.get("uid"), Some(&AttributeValue::Text("u-1".into())));
        assert_eq!(event.get("outer/inner"), Some(&AttributeValue::Integer(7)));
        assert_eq!(event.get("items/q"), Some(&AttributeValue::Text("2".into())));
        assert!(event.get("dup/p").is_none());
        assert_eq!(event.timestamp().unwrap().as_str(), "2011-01-01T10:00:00.000+01:00");

        let exported = export_xes(&log);
        assert_eq!(import_xes(&exported).unwrap(), log);
    }

    #[test]
    fn bad_int_value() {
        let err = import_xes(br#"<log><int key="n" value="4x"/></log>"#).unwrap_err();
        assert!(matches!(err, IngestError::BadValue { .. }));
    }

    #[test]
    fn empty_log_exports_empty_root() {
        let text = String::from_utf8(export_xes(&EventLog::new())).unwrap();
        assert!(text.contains("<log/>"));
        assert_eq!(import_xes(text.as_bytes()).unwrap(), EventLog::new());
    }

    #[test]
    fn integer_attribute_rendering() {
        let mut log = EventLog::from_activity_traces(&[vec!["a"]]);
        log.traces[0].events[0].set("amount", 42i64);
        let text = String::from_utf8(export_xes(&log)).unwrap();
        assert!(text.contains(r#"<int key="amount" value="42"/>"#));
    }

    #[test]
    fn escaping_survives_round_trip() {
        let mut log = EventLog::from_activity_traces(&[vec!["a<b>&\"c'\n\td"]]);
        log.attributes.insert("x".into(), AttributeValue::Real(0.1 + 0.2));
        let back = import_xes(&export_xes(&log)).unwrap();
        assert_eq!(back, log);
    }
}
