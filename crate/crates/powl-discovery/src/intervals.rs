//! Interval event logs: complete activity executions with start and end
//! timestamps.
//!
//! Start and complete lifecycle events of the same activity within a case
//! are matched first-in-first-out. Events without usable lifecycle
//! information, completes with no queued start, and leftover starts become
//! atomic intervals (start = end), so every recorded event contributes an
//! interval and the discovery pipeline works on any log.

use crate::event_log::{EventLog, Timestamp};
use std::collections::{BTreeMap, BTreeSet, VecDeque};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalOrigin {
    /// Built from a matched start/complete pair.
    Matched,
    /// Built from a single event; start equals end.
    Atomic,
}

/// One complete activity execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalEvent {
    pub label: String,
    pub case_id: String,
    pub start: Timestamp,
    pub end: Timestamp,
    pub origin: IntervalOrigin,
}

/// Interval events in canonical order (case, start, end, label) plus the set
/// of case ids and matching statistics.
#[derive(Debug, Clone)]
pub struct IntervalLog {
    intervals: Vec<IntervalEvent>,
    cases: BTreeSet<String>,
    matched: u64,
    atomic: u64,
    unmatched_starts: u64,
}

impl IntervalLog {
    pub fn intervals(&self) -> &[IntervalEvent] {
        &self.intervals
    }

    pub fn cases(&self) -> &BTreeSet<String> {
        &self.cases
    }

    /// Intervals of one case, in canonical order.
    pub fn intervals_of(&self, case_id: &str) -> Vec<IntervalEvent> {
        self.intervals
            .iter()
            .filter(|i| i.case_id == case_id)
            .cloned()
            .collect()
    }

    pub fn matched_count(&self) -> u64 {
        self.matched
    }

    pub fn atomic_count(&self) -> u64 {
        self.atomic
    }

    /// Starts that never saw a complete and were therefore emitted as atomic
    /// intervals. Reported so noisy logs are visible.
    pub fn unmatched_start_count(&self) -> u64 {
        self.unmatched_starts
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

/// Builds the interval log from a normalized event log.
///
/// Per (case, label), `start` events queue up in timestamp order and each
/// `complete` pops the oldest queued start. A complete with an empty queue,
/// any event with a lifecycle other than start/complete (or none), and any
/// leftover start becomes an atomic interval at its own timestamp.
pub fn build_interval_log(log: &EventLog) -> IntervalLog {
    let mut queues: BTreeMap<(String, String), VecDeque<Timestamp>> = BTreeMap::new();
    let mut intervals: Vec<IntervalEvent> = Vec::with_capacity(log.len());
    let mut matched = 0u64;
    let mut atomic = 0u64;
    let mut unmatched_starts = 0u64;

    for event in log.events() {
        match event.lifecycle.as_deref() {
            Some("start") => {
                queues
                    .entry((event.case_id.clone(), event.label.clone()))
                    .or_default()
                    .push_back(event.timestamp);
            }
            Some("complete") => {
                let queued = queues
                    .get_mut(&(event.case_id.clone(), event.label.clone()))
                    .and_then(VecDeque::pop_front);
                match queued {
                    Some(start) => {
                        matched += 1;
                        intervals.push(IntervalEvent {
                            label: event.label.clone(),
                            case_id: event.case_id.clone(),
                            start,
                            end: event.timestamp,
                            origin: IntervalOrigin::Matched,
                        });
                    }
                    None => {
                        atomic += 1;
                        intervals.push(atomic_interval(event.label.clone(), event));
                    }
                }
            }
            _ => {
                atomic += 1;
                intervals.push(atomic_interval(event.label.clone(), event));
            }
        }
    }

    for ((case_id, label), queue) in queues {
        for start in queue {
            unmatched_starts += 1;
            atomic += 1;
            intervals.push(IntervalEvent {
                label: label.clone(),
                case_id: case_id.clone(),
                start,
                end: start,
                origin: IntervalOrigin::Atomic,
            });
        }
    }

    intervals.sort_by(|a, b| {
        (&a.case_id, a.start, a.end, &a.label).cmp(&(&b.case_id, b.start, b.end, &b.label))
    });
    let cases = intervals.iter().map(|i| i.case_id.clone()).collect();
    IntervalLog {
        intervals,
        cases,
        matched,
        atomic,
        unmatched_starts,
    }
}

fn atomic_interval(label: String, event: &crate::event_log::Event) -> IntervalEvent {
    IntervalEvent {
        label,
        case_id: event.case_id.clone(),
        start: event.timestamp,
        end: event.timestamp,
        origin: IntervalOrigin::Atomic,
    }
}
