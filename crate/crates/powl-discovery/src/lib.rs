//! Concurrency-aware process discovery.
//!
//! This crate turns raw event logs into process models that preserve the
//! concurrency visible in the data. The pipeline has four stages:
//!
//! 1. [`event_log`] parses XES or CSV input into a normalized event log,
//!    optionally abstracting timestamps to a coarser granularity.
//! 2. [`intervals`] matches start/complete lifecycle events into interval
//!    events (one per activity execution).
//! 3. [`pot`] derives one partially ordered trace per case — overlapping
//!    executions stay unordered — and folds identical traces into weighted
//!    variants.
//! 4. [`discovery`] aggregates the variants into a single hierarchical
//!    model ([`PowlModel`]) of transitions, exclusive choices, loops and
//!    partial orders. Every linearization of every input trace is accepted
//!    by the result, and the model translates to a sound workflow net
//!    ([`petri`]).
//!
//! The [`oracle`] module provides the independent verification machinery:
//! linearization enumeration, a perfect-fitness checker, and seeded
//! model/log generators for property testing.
//!
//! ```rust
//! use powl_discovery::event_log::{parse_csv, CsvMapping};
//! use powl_discovery::intervals::build_interval_log;
//! use powl_discovery::pot::build_pot_multiset;
//! use powl_discovery::discovery::discover;
//!
//! let csv = "case,activity,timestamp\n\
//!            c1,register,2024-01-01 09:00\n\
//!            c1,decide,2024-01-01 12:00\n\
//!            c2,register,2024-01-02 09:00\n\
//!            c2,decide,2024-01-02 11:00\n";
//! let log = parse_csv(csv.as_bytes(), &CsvMapping::default(), "%Y-%m-%d %H:%M").unwrap();
//! let intervals = build_interval_log(&log);
//! let pots = build_pot_multiset(&intervals).unwrap();
//! let model = discover(&pots).unwrap();
//! assert_eq!(model.labels().len(), 2);
//! ```

pub mod cli;
pub mod discovery;
pub mod event_log;
pub mod intervals;
pub mod oracle;
pub mod petri;
pub mod pot;
pub mod powl;

pub use discovery::{combine_orders, discover, AggregatedOrder, DiscoveryError};
pub use event_log::{abstract_timestamps, parse_csv, parse_xes, EventLog, Granularity};
pub use intervals::{build_interval_log, IntervalLog};
pub use oracle::{linearizations, verify_perfect_fitness, FitnessReport};
pub use petri::{check_soundness, export_net_dot, export_pnml, to_workflow_net, WorkflowNet};
pub use pot::{build_pot, build_pot_multiset, Pot, PotMultiset};
pub use powl::{accepts, enumerate_language, PowlModel};

// The guide's code blocks run as doctests so the book can never drift from
// the crate. One module per chapter keeps failures attributable.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/event-logs.md")]
    pub mod event_logs {}
    #[doc = include_str!("../../../book/src/intervals.md")]
    pub mod intervals {}
    #[doc = include_str!("../../../book/src/partial-orders.md")]
    pub mod partial_orders {}
    #[doc = include_str!("../../../book/src/models.md")]
    pub mod models {}
    #[doc = include_str!("../../../book/src/discovery.md")]
    pub mod discovery {}
    #[doc = include_str!("../../../book/src/workflow-nets.md")]
    pub mod workflow_nets {}
    #[doc = include_str!("../../../book/src/verification.md")]
    pub mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
