//! Normalized event logs and timestamp handling.
//!
//! Parsing XES or CSV input yields a flat, immutable [`EventLog`] sorted by
//! (timestamp, file position). All timestamps are normalized to UTC
//! milliseconds at parse time so downstream behavior is identical across
//! machines. Records that cannot be used are skipped and counted unless
//! strict parsing is requested.

mod csv_input;
mod xes;

pub use csv_input::{parse_csv, CsvMapping};
pub use xes::parse_xes;

use chrono::{DateTime, NaiveDate, NaiveDateTime, TimeZone, Utc};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed XML at line {line}, column {column}: {message}")]
    Xml {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("trace {trace} event {event_index}: missing mandatory attribute `{attribute}`")]
    MissingAttribute {
        trace: String,
        event_index: usize,
        attribute: &'static str,
    },
    #[error("no usable events in the input")]
    EmptyInput,
    #[error("mapped column `{column}` not found; available headers: {}", available.join(", "))]
    MissingColumn {
        column: String,
        available: Vec<String>,
    },
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// UTC instant in milliseconds since the epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(pub i64);

impl Timestamp {
    /// Floors the instant to the start of its second, minute, hour or day
    /// (UTC). `Granularity::None` is the identity.
    pub fn floor(self, granularity: Granularity) -> Timestamp {
        match granularity.unit_millis() {
            None => self,
            Some(unit) => Timestamp(self.0.div_euclid(unit) * unit),
        }
    }

    pub fn millis(self) -> i64 {
        self.0
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match Utc.timestamp_millis_opt(self.0).single() {
            Some(dt) => write!(f, "{}", dt.format("%Y-%m-%dT%H:%M:%S%.3fZ")),
            None => write!(f, "@{}ms", self.0),
        }
    }
}

/// Granularity for timestamp abstraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Granularity {
    #[default]
    None,
    Second,
    Minute,
    Hour,
    Day,
}

impl Granularity {
    fn unit_millis(self) -> Option<i64> {
        match self {
            Granularity::None => None,
            Granularity::Second => Some(1_000),
            Granularity::Minute => Some(60_000),
            Granularity::Hour => Some(3_600_000),
            Granularity::Day => Some(86_400_000),
        }
    }
}

/// One raw log record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub case_id: String,
    /// Non-empty activity label.
    pub label: String,
    pub timestamp: Timestamp,
    /// Normalized (lowercased, trimmed) lifecycle phase, if any.
    pub lifecycle: Option<String>,
    /// Position of the record in the source file; unique and increasing.
    pub seq_no: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    Xes,
    Csv,
}

impl fmt::Display for SourceFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceFormat::Xes => "xes",
            SourceFormat::Csv => "csv",
        })
    }
}

/// Format tag and parse statistics. `records_read` counts usable plus
/// skipped event records, so `records_read = events + records_skipped`
/// always holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceMeta {
    pub format: SourceFormat,
    pub records_read: u64,
    pub records_skipped: u64,
    pub distinct_cases: u64,
    pub distinct_labels: u64,
}

/// A normalized event log, sorted by (timestamp, seq_no).
#[derive(Debug, Clone)]
pub struct EventLog {
    events: Vec<Event>,
    source_meta: SourceMeta,
}

impl EventLog {
    /// Builds a log from in-memory events: sorts by (timestamp, seq_no) and
    /// computes the parse statistics.
    pub fn from_events(
        mut events: Vec<Event>,
        format: SourceFormat,
        records_skipped: u64,
    ) -> EventLog {
        events.sort_by_key(|e| (e.timestamp, e.seq_no));
        let distinct_cases = events
            .iter()
            .map(|e| e.case_id.as_str())
            .collect::<BTreeSet<_>>()
            .len() as u64;
        let distinct_labels = events
            .iter()
            .map(|e| e.label.as_str())
            .collect::<BTreeSet<_>>()
            .len() as u64;
        let records_read = events.len() as u64 + records_skipped;
        EventLog {
            events,
            source_meta: SourceMeta {
                format,
                records_read,
                records_skipped,
                distinct_cases,
                distinct_labels,
            },
        }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn source_meta(&self) -> &SourceMeta {
        &self.source_meta
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }
}

/// Floors every timestamp to the given granularity (UTC) and re-sorts the log
/// by (timestamp, seq_no). `Granularity::None` returns the log unchanged.
pub fn abstract_timestamps(log: &EventLog, granularity: Granularity) -> EventLog {
    if granularity == Granularity::None {
        return log.clone();
    }
    let mut events = log.events.clone();
    for event in &mut events {
        event.timestamp = event.timestamp.floor(granularity);
    }
    events.sort_by_key(|e| (e.timestamp, e.seq_no));
    EventLog {
        events,
        source_meta: log.source_meta.clone(),
    }
}

/// Parses an ISO-8601 / RFC 3339 timestamp; values without a zone are read
/// as UTC.
pub(crate) fn parse_iso_timestamp(text: &str) -> Option<Timestamp> {
    let text = text.trim();
    if let Ok(dt) = DateTime::parse_from_rfc3339(text) {
        return Some(Timestamp(dt.with_timezone(&Utc).timestamp_millis()));
    }
    for pattern in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(text, pattern) {
            return Some(Timestamp(naive.and_utc().timestamp_millis()));
        }
    }
    if let Ok(date) = NaiveDate::parse_from_str(text, "%Y-%m-%d") {
        return Some(Timestamp(
            date.and_hms_opt(0, 0, 0)?.and_utc().timestamp_millis(),
        ));
    }
    None
}

/// Parses a timestamp with a strftime-like pattern (chrono syntax). An empty
/// pattern falls back to ISO-8601. Patterns with a zone specifier produce
/// zone-aware instants; all others are read as UTC.
pub(crate) fn parse_with_pattern(text: &str, pattern: &str) -> Option<Timestamp> {
    let text = text.trim();
    if pattern.is_empty() {
        return parse_iso_timestamp(text);
    }
    if pattern.contains("%z") || pattern.contains("%:z") || pattern.contains("%#z") {
        if let Ok(dt) = DateTime::parse_from_str(text, pattern) {
            return Some(Timestamp(dt.with_timezone(&Utc).timestamp_millis()));
        }
        return None;
    }
    if let Ok(naive) = NaiveDateTime::parse_from_str(text, pattern) {
        return Some(Timestamp(naive.and_utc().timestamp_millis()));
    }
    if let Ok(date) = NaiveDate::parse_from_str(text, pattern) {
        return Some(Timestamp(
            date.and_hms_opt(0, 0, 0)?.and_utc().timestamp_millis(),
        ));
    }
    None
}

pub(crate) fn normalize_lifecycle(raw: &str) -> Option<String> {
    let normalized = raw.trim().to_lowercase();
    if normalized.is_empty() {
        None
    } else {
        Some(normalized)
    }
}
