//! CSV ingestion with a configurable column mapping.

use super::{normalize_lifecycle, parse_with_pattern, Event, EventLog, IngestError, SourceFormat};
use std::collections::BTreeMap;

/// Column mapping for CSV input. When `start_timestamp` is mapped and the
/// cell is non-empty, each row expands into a start/complete event pair.
#[derive(Debug, Clone)]
pub struct CsvMapping {
    pub case: String,
    pub activity: String,
    pub timestamp: String,
    pub start_timestamp: Option<String>,
    pub lifecycle: Option<String>,
    pub delimiter: u8,
}

impl Default for CsvMapping {
    fn default() -> Self {
        CsvMapping {
            case: "case".into(),
            activity: "activity".into(),
            timestamp: "timestamp".into(),
            start_timestamp: None,
            lifecycle: None,
            delimiter: b',',
        }
    }
}

/// Parses CSV input (UTF-8, header row required). Rows with an unusable
/// case, activity or timestamp are skipped and counted.
pub fn parse_csv(
    input: &[u8],
    mapping: &CsvMapping,
    timestamp_format: &str,
) -> Result<EventLog, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(mapping.delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(input);

    let headers = reader.headers().map_err(map_csv_error)?.clone();
    let available: Vec<String> = headers.iter().map(str::to_string).collect();
    let index_of: BTreeMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let column = |name: &str| -> Result<usize, IngestError> {
        index_of
            .get(name)
            .copied()
            .ok_or_else(|| IngestError::MissingColumn {
                column: name.to_string(),
                available: available.clone(),
            })
    };

    let case_col = column(&mapping.case)?;
    let activity_col = column(&mapping.activity)?;
    let timestamp_col = column(&mapping.timestamp)?;
    let start_col = mapping.start_timestamp.as_deref().map(column).transpose()?;
    let lifecycle_col = mapping.lifecycle.as_deref().map(column).transpose()?;

    let mut events = Vec::new();
    let mut skipped = 0u64;
    let mut seq_no = 0u64;

    for record in reader.records() {
        let record = record.map_err(map_csv_error)?;
        let cell = |idx: usize| record.get(idx).unwrap_or("").trim();

        let case_id = cell(case_col);
        let label = cell(activity_col);
        let Some(timestamp) = parse_with_pattern(cell(timestamp_col), timestamp_format) else {
            skipped += 1;
            continue;
        };
        if case_id.is_empty() || label.is_empty() {
            skipped += 1;
            continue;
        }

        let start_cell = start_col.map(cell).filter(|s| !s.is_empty());
        if let Some(start_text) = start_cell {
            let Some(start) = parse_with_pattern(start_text, timestamp_format) else {
                skipped += 1;
                continue;
            };
            events.push(Event {
                case_id: case_id.to_string(),
                label: label.to_string(),
                timestamp: start,
                lifecycle: Some("start".to_string()),
                seq_no,
            });
            seq_no += 1;
            events.push(Event {
                case_id: case_id.to_string(),
                label: label.to_string(),
                timestamp,
                lifecycle: Some("complete".to_string()),
                seq_no,
            });
            seq_no += 1;
        } else {
            let lifecycle = lifecycle_col.map(cell).and_then(normalize_lifecycle);
            events.push(Event {
                case_id: case_id.to_string(),
                label: label.to_string(),
                timestamp,
                lifecycle,
                seq_no,
            });
            seq_no += 1;
        }
    }

    if events.is_empty() {
        return Err(IngestError::EmptyInput);
    }
    Ok(EventLog::from_events(events, SourceFormat::Csv, skipped))
}

fn map_csv_error(error: csv::Error) -> IngestError {
    match error.kind() {
        csv::ErrorKind::Utf8 { .. } => IngestError::Encoding,
        _ => IngestError::Io(std::io::Error::other(error.to_string())),
    }
}
