//! XES (IEEE 1849) ingestion.
//!
//! Reads the `log > trace > event` layout. The trace's `concept:name`
//! becomes the case id; each event needs `concept:name` and
//! `time:timestamp`, with `lifecycle:transition` optional. Only these keys
//! are used, every other attribute is dropped.

use super::{
    normalize_lifecycle, parse_iso_timestamp, Event, EventLog, IngestError, SourceFormat, Timestamp,
};
use quick_xml::events::{BytesStart, Event as XmlEvent};
use quick_xml::Reader;

/// Parses an XES document. With `strict` off, events missing a label,
/// timestamp or case id are skipped and counted; with `strict` on they abort
/// parsing with an error naming the trace and event index.
pub fn parse_xes(input: &[u8], strict: bool) -> Result<EventLog, IngestError> {
    let mut reader = Reader::from_reader(input);
    reader.config_mut().trim_text(true);

    let mut stack: Vec<Vec<u8>> = Vec::new();
    let mut events: Vec<Event> = Vec::new();
    let mut skipped = 0u64;
    let mut seq_no = 0u64;

    let mut trace_counter = 0usize;
    let mut trace_name: Option<String> = None;
    let mut event_index = 0usize;

    let mut current: Option<PendingEvent> = None;

    let mut buf = Vec::new();
    loop {
        let position = reader.buffer_position();
        match reader.read_event_into(&mut buf) {
            Err(error) => {
                let (line, column) = line_column(input, position as usize);
                return Err(IngestError::Xml {
                    line,
                    column,
                    message: error.to_string(),
                });
            }
            Ok(XmlEvent::Eof) => break,
            Ok(XmlEvent::Start(element)) => {
                open_element(
                    &element,
                    &stack,
                    &mut trace_counter,
                    &mut trace_name,
                    &mut event_index,
                    &mut current,
                    input,
                    position as usize,
                )?;
                stack.push(element.local_name().as_ref().to_vec());
            }
            Ok(XmlEvent::Empty(element)) => {
                open_element(
                    &element,
                    &stack,
                    &mut trace_counter,
                    &mut trace_name,
                    &mut event_index,
                    &mut current,
                    input,
                    position as usize,
                )?;
                if element.local_name().as_ref() == b"event" {
                    finish_event(
                        current.take(),
                        &trace_name,
                        trace_counter,
                        event_index,
                        strict,
                        &mut events,
                        &mut skipped,
                        &mut seq_no,
                    )?;
                }
            }
            Ok(XmlEvent::End(element)) => {
                stack.pop();
                match element.local_name().as_ref() {
                    b"event" => finish_event(
                        current.take(),
                        &trace_name,
                        trace_counter,
                        event_index,
                        strict,
                        &mut events,
                        &mut skipped,
                        &mut seq_no,
                    )?,
                    b"trace" => trace_name = None,
                    _ => {}
                }
            }
            Ok(_) => {}
        }
        buf.clear();
    }

    if events.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    Ok(EventLog::from_events(events, SourceFormat::Xes, skipped))
}

#[derive(Default)]
struct PendingEvent {
    label: Option<String>,
    timestamp: Option<Timestamp>,
    lifecycle: Option<String>,
}

#[allow(clippy::too_many_arguments)]
fn open_element(
    element: &BytesStart<'_>,
    stack: &[Vec<u8>],
    trace_counter: &mut usize,
    trace_name: &mut Option<String>,
    event_index: &mut usize,
    current: &mut Option<PendingEvent>,
    input: &[u8],
    position: usize,
) -> Result<(), IngestError> {
    let name = element.local_name();
    let parent = stack.last().map(|n| n.as_slice());
    match name.as_ref() {
        b"trace" if parent == Some(b"log") => {
            *trace_counter += 1;
            *trace_name = None;
            *event_index = 0;
        }
        b"event" if matches!(parent, Some(b"trace") | Some(b"log")) => {
            *event_index += 1;
            *current = Some(PendingEvent::default());
        }
        b"string" | b"date" | b"int" | b"float" | b"boolean" | b"id" => {
            let (key, value) = key_value(element, input, position)?;
            if parent == Some(b"event") {
                if let Some(pending) = current.as_mut() {
                    match key.as_str() {
                        "concept:name" if !value.trim().is_empty() => {
                            pending.label = Some(value);
                        }
                        "time:timestamp" => pending.timestamp = parse_iso_timestamp(&value),
                        "lifecycle:transition" => pending.lifecycle = normalize_lifecycle(&value),
                        _ => {}
                    }
                }
            } else if parent == Some(b"trace") && key == "concept:name" && !value.trim().is_empty()
            {
                *trace_name = Some(value);
            }
        }
        _ => {}
    }
    Ok(())
}

fn key_value(
    element: &BytesStart<'_>,
    input: &[u8],
    position: usize,
) -> Result<(String, String), IngestError> {
    let mut key = String::new();
    let mut value = String::new();
    for attr in element.attributes() {
        let attr = attr.map_err(|error| {
            let (line, column) = line_column(input, position);
            IngestError::Xml {
                line,
                column,
                message: error.to_string(),
            }
        })?;
        let text = attr
            .unescape_value()
            .map_err(|error| {
                let (line, column) = line_column(input, position);
                IngestError::Xml {
                    line,
                    column,
                    message: error.to_string(),
                }
            })?
            .into_owned();
        match attr.key.as_ref() {
            b"key" => key = text,
            b"value" => value = text,
            _ => {}
        }
    }
    Ok((key, value))
}

#[allow(clippy::too_many_arguments)]
fn finish_event(
    pending: Option<PendingEvent>,
    trace_name: &Option<String>,
    trace_counter: usize,
    event_index: usize,
    strict: bool,
    events: &mut Vec<Event>,
    skipped: &mut u64,
    seq_no: &mut u64,
) -> Result<(), IngestError> {
    let Some(pending) = pending else {
        return Ok(());
    };
    let trace_display = trace_name
        .clone()
        .unwrap_or_else(|| format!("#{trace_counter}"));
    let missing = if trace_name.is_none() {
        Some("concept:name (trace)")
    } else if pending.label.is_none() {
        Some("concept:name")
    } else if pending.timestamp.is_none() {
        Some("time:timestamp")
    } else {
        None
    };
    if let Some(attribute) = missing {
        if strict {
            return Err(IngestError::MissingAttribute {
                trace: trace_display,
                event_index,
                attribute,
            });
        }
        *skipped += 1;
        return Ok(());
    }
    events.push(Event {
        case_id: trace_name.clone().expect("checked above"),
        label: pending.label.expect("checked above"),
        timestamp: pending.timestamp.expect("checked above"),
        lifecycle: pending.lifecycle,
        seq_no: *seq_no,
    });
    *seq_no += 1;
    Ok(())
}

fn line_column(input: &[u8], offset: usize) -> (usize, usize) {
    let upto = offset.min(input.len());
    let mut line = 1;
    let mut column = 1;
    for &byte in &input[..upto] {
        if byte == b'\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIMPLE: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<log xes.version="1.0">
  <trace>
    <string key="concept:name" value="c1"/>
    <event>
      <string key="concept:name" value="A"/>
      <string key="lifecycle:transition" value="START"/>
      <date key="time:timestamp" value="2024-01-01T10:00:00.000+00:00"/>
    </event>
    <event>
      <string key="concept:name" value="A"/>
      <string key="lifecycle:transition" value="complete"/>
      <date key="time:timestamp" value="2024-01-01T10:05:00.000+00:00"/>
    </event>
  </trace>
</log>"#;

    #[test]
    fn reads_events_with_case_and_lifecycle() {
        let log = parse_xes(SIMPLE.as_bytes(), true).unwrap();
        assert_eq!(log.len(), 2);
        let first = &log.events()[0];
        assert_eq!(first.case_id, "c1");
        assert_eq!(first.label, "A");
        assert_eq!(
            first.lifecycle.as_deref(),
            Some("start"),
            "lifecycle is lowercased"
        );
        assert_eq!(log.source_meta().distinct_cases, 1);
    }

    #[test]
    fn missing_timestamp_is_skipped_when_lenient() {
        let xes = r#"<log><trace><string key="concept:name" value="c1"/>
            <event><string key="concept:name" value="A"/></event>
            <event><string key="concept:name" value="B"/>
                   <date key="time:timestamp" value="2024-01-01T10:00:00Z"/></event>
        </trace></log>"#;
        let log = parse_xes(xes.as_bytes(), false).unwrap();
        assert_eq!(log.len(), 1);
        assert_eq!(log.source_meta().records_skipped, 1);
        assert_eq!(log.source_meta().records_read, 2);
    }

    #[test]
    fn missing_timestamp_aborts_when_strict() {
        let xes = r#"<log><trace><string key="concept:name" value="c1"/>
            <event><string key="concept:name" value="A"/></event>
        </trace></log>"#;
        let err = parse_xes(xes.as_bytes(), true).unwrap_err();
        match err {
            IngestError::MissingAttribute {
                trace,
                event_index,
                attribute,
            } => {
                assert_eq!(trace, "c1");
                assert_eq!(event_index, 1);
                assert_eq!(attribute, "time:timestamp");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn events_are_sorted_by_timestamp_then_position() {
        let xes = r#"<log><trace><string key="concept:name" value="c1"/>
            <event><string key="concept:name" value="E"/><date key="time:timestamp" value="2024-01-01T10:04:00Z"/></event>
            <event><string key="concept:name" value="B"/><date key="time:timestamp" value="2024-01-01T10:01:00Z"/></event>
            <event><string key="concept:name" value="D"/><date key="time:timestamp" value="2024-01-01T10:03:00Z"/></event>
            <event><string key="concept:name" value="A"/><date key="time:timestamp" value="2024-01-01T10:00:00Z"/></event>
            <event><string key="concept:name" value="C"/><date key="time:timestamp" value="2024-01-01T10:02:00Z"/></event>
        </trace></log>"#;
        let log = parse_xes(xes.as_bytes(), true).unwrap();
        let labels: Vec<&str> = log.events().iter().map(|e| e.label.as_str()).collect();
        assert_eq!(labels, ["A", "B", "C", "D", "E"]);
    }

    #[test]
    fn equal_timestamps_tie_break_by_file_order() {
        let xes = r#"<log><trace><string key="concept:name" value="c1"/>
            <event><string key="concept:name" value="X"/><date key="time:timestamp" value="2024-01-01T10:00:00Z"/></event>
            <event><string key="concept:name" value="Y"/><date key="time:timestamp" value="2024-01-01T10:00:00Z"/></event>
        </trace></log>"#;
        let log = parse_xes(xes.as_bytes(), true).unwrap();
        let labels: Vec<&str> = log.events().iter().map(|e| e.label.as_str()).collect();
        assert_eq!(labels, ["X", "Y"]);
        assert!(log.events()[0].seq_no < log.events()[1].seq_no);
    }

    #[test]
    fn malformed_xml_reports_position() {
        let err = parse_xes(b"<log><trace></log>", false).unwrap_err();
        assert!(matches!(err, IngestError::Xml { .. }));
    }

    #[test]
    fn empty_log_is_an_error() {
        let err = parse_xes(b"<log></log>", false).unwrap_err();
        assert!(matches!(err, IngestError::EmptyInput));
    }

    #[test]
    fn global_declarations_are_ignored() {
        let xes = r#"<log>
          <global scope="event"><string key="concept:name" value="__INVALID__"/></global>
          <trace><string key="concept:name" value="c1"/>
            <event><string key="concept:name" value="A"/><date key="time:timestamp" value="2024-01-01T10:00:00Z"/></event>
          </trace></log>"#;
        let log = parse_xes(xes.as_bytes(), true).unwrap();
        assert_eq!(log.len(), 1);
        assert_eq!(log.events()[0].label, "A");
    }
}
