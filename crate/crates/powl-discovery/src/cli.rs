//! Command implementations behind the `powl-discovery` binary.
//!
//! Every command is deterministic given identical inputs and configuration:
//! file outputs are byte-stable across runs. Outputs are buffered in memory
//! and written only after the whole pipeline succeeded, so a failing run
//! leaves no partial artifacts behind.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 format
//! error, 4 budget exhausted / inconclusive.

use crate::discovery::{discover, DiscoveryError};
use crate::event_log::{
    abstract_timestamps, parse_csv, parse_xes, CsvMapping, EventLog, Granularity, IngestError,
};
use crate::intervals::build_interval_log;
use crate::oracle::{verify_perfect_fitness, OracleError};
use crate::petri::{
    check_soundness, export_net_dot, export_pnml, to_workflow_net, NetError, Verdict,
};
use crate::pot::{build_pot_multiset, export_pot_dot, Pot, PotError, PotMultiset};
use crate::powl::{ModelJsonError, PowlModel};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;
use thiserror::Error;

pub const DEFAULT_LIN_CAP: usize = 1_000;
pub const DEFAULT_ACCEPT_BUDGET: usize = 100_000;
pub const DEFAULT_SOUNDNESS_BUDGET: usize = 100_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    UnreadableInput {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    UnwritableOutput {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Pot(#[from] PotError),
    #[error(transparent)]
    Discovery(#[from] DiscoveryError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("model file is not valid: {0}")]
    ModelFormat(#[from] ModelJsonError),
    #[error("verification failed: {failures} linearization(s) rejected")]
    FitnessFailed { failures: usize },
    #[error("net is unsound")]
    Unsound,
    #[error("soundness check inconclusive within the budget")]
    Inconclusive,
    #[error("discover requires at least one of --out-model, --out-dot, --out-pnml, --out-pots")]
    NoOutputRequested,
    #[error("cannot infer the input format of {0}; pass --format")]
    UnknownFormat(PathBuf),
    #[error("config file {path}: {message}")]
    BadConfig { path: PathBuf, message: String },
}

impl CliError {
    /// Exit code policy: see module docs.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::FitnessFailed { .. } | CliError::Unsound => 1,
            CliError::UnreadableInput { .. }
            | CliError::UnwritableOutput { .. }
            | CliError::Ingest(_)
            | CliError::Pot(_)
            | CliError::NoOutputRequested
            | CliError::UnknownFormat(_)
            | CliError::BadConfig { .. }
            | CliError::Oracle(_)
            | CliError::Discovery(_) => 2,
            CliError::ModelFormat(_) => 3,
            CliError::Net(NetError::ZeroBudget) => 2,
            CliError::Net(NetError::StateCapExceeded(_)) => 4,
            CliError::Net(_) => 3,
            CliError::Inconclusive => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    Xes,
    Csv,
}

/// Resolved configuration of a pipeline run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub format: Option<InputFormat>,
    pub granularity: Granularity,
    pub csv: CsvMapping,
    pub timestamp_format: String,
    pub strict: bool,
    pub out_model: Option<PathBuf>,
    pub out_dot: Option<PathBuf>,
    pub out_pnml: Option<PathBuf>,
    pub out_pots: Option<PathBuf>,
    pub lin_cap: usize,
    pub accept_budget: usize,
    pub soundness_budget: usize,
    pub seed: u64,
    pub verbose: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: PathBuf::new(),
            format: None,
            granularity: Granularity::None,
            csv: CsvMapping::default(),
            timestamp_format: String::new(),
            strict: false,
            out_model: None,
            out_dot: None,
            out_pnml: None,
            out_pots: None,
            lin_cap: DEFAULT_LIN_CAP,
            accept_budget: DEFAULT_ACCEPT_BUDGET,
            soundness_budget: DEFAULT_SOUNDNESS_BUDGET,
            seed: 0,
            verbose: false,
        }
    }
}

/// Key=value lines, `#` comments; unknown keys are rejected so typos fail
/// loudly. Flags given on the command line win over the file.
pub fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::UnreadableInput {
        path: path.to_path_buf(),
        source,
    })?;
    let mut values = BTreeMap::new();
    for (number, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::BadConfig {
                path: path.to_path_buf(),
                message: format!("line {}: expected key=value", number + 1),
            });
        };
        values.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(values)
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::UnreadableInput {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_log(cfg: &RunConfig) -> Result<EventLog, CliError> {
    let bytes = read_input(&cfg.input)?;
    let format = match cfg.format {
        Some(format) => format,
        None => match cfg.input.extension().and_then(|e| e.to_str()) {
            Some("xes") => InputFormat::Xes,
            Some("csv") => InputFormat::Csv,
            _ => return Err(CliError::UnknownFormat(cfg.input.clone())),
        },
    };
    let log = match format {
        InputFormat::Xes => parse_xes(&bytes, cfg.strict)?,
        InputFormat::Csv => parse_csv(&bytes, &cfg.csv, &cfg.timestamp_format)?,
    };
    Ok(abstract_timestamps(&log, cfg.granularity))
}

fn pots_from_log(
    cfg: &RunConfig,
    log: &EventLog,
) -> Result<(PotMultiset, PipelineStats), CliError> {
    let intervals = build_interval_log(log);
    let stats = PipelineStats {
        events: log.len() as u64,
        skipped: log.source_meta().records_skipped,
        cases: intervals.cases().len() as u64,
        matched: intervals.matched_count(),
        atomic: intervals.atomic_count(),
        unmatched_starts: intervals.unmatched_start_count(),
    };
    let multiset = build_pot_multiset(&intervals)?;
    let _ = cfg;
    Ok((multiset, stats))
}

#[derive(Debug, Clone, Copy)]
struct PipelineStats {
    events: u64,
    skipped: u64,
    cases: u64,
    matched: u64,
    atomic: u64,
    unmatched_starts: u64,
}

/// Buffered output files, written together on success.
struct OutputSet {
    files: Vec<(PathBuf, String)>,
}

impl OutputSet {
    fn new() -> OutputSet {
        OutputSet { files: Vec::new() }
    }

    fn add(&mut self, path: PathBuf, contents: String) {
        self.files.push((path, contents));
    }

    fn write_all(self) -> Result<(), CliError> {
        let mut written: Vec<PathBuf> = Vec::new();
        for (path, contents) in &self.files {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    if let Err(source) = std::fs::create_dir_all(parent) {
                        remove_files(&written);
                        return Err(CliError::UnwritableOutput {
                            path: path.clone(),
                            source,
                        });
                    }
                }
            }
            if let Err(source) = std::fs::write(path, contents) {
                remove_files(&written);
                return Err(CliError::UnwritableOutput {
                    path: path.clone(),
                    source,
                });
            }
            written.push(path.clone());
        }
        Ok(())
    }
}

fn remove_files(paths: &[PathBuf]) {
    for path in paths {
        let _ = std::fs::remove_file(path);
    }
}

/// Full pipeline: parse, derive intervals and traces, discover, export.
/// Returns the summary line on success.
pub fn cmd_discover(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.out_model.is_none()
        && cfg.out_dot.is_none()
        && cfg.out_pnml.is_none()
        && cfg.out_pots.is_none()
    {
        return Err(CliError::NoOutputRequested);
    }
    let started = Instant::now();
    let log = parse_log(cfg)?;
    let (multiset, stats) = pots_from_log(cfg, &log)?;
    let model = discover(&multiset)?;

    let mut outputs = OutputSet::new();
    if let Some(path) = &cfg.out_model {
        outputs.add(path.clone(), model.to_canonical_json());
    }
    if cfg.out_dot.is_some() || cfg.out_pnml.is_some() {
        let net = to_workflow_net(&model);
        if let Some(path) = &cfg.out_dot {
            outputs.add(path.clone(), export_net_dot(&net));
        }
        if let Some(path) = &cfg.out_pnml {
            outputs.add(path.clone(), export_pnml(&net));
        }
    }
    if let Some(dir) = &cfg.out_pots {
        add_pot_outputs(&mut outputs, dir, &multiset);
    }
    outputs.write_all()?;

    let mut summary = String::new();
    write!(
        summary,
        "cases={} variants={} labels={} events={} skipped={} matched={} atomic={} \
         unmatched_starts={} model_leaves={} model_operators={} wall_ms={}",
        stats.cases,
        multiset.variant_count(),
        model.labels().len(),
        stats.events,
        stats.skipped,
        stats.matched,
        stats.atomic,
        stats.unmatched_starts,
        model.leaf_count(),
        model.operator_count(),
        started.elapsed().as_millis()
    )
    .expect("writing to a string");
    Ok(summary)
}

/// Variants ordered by descending count, then folding key; used for table
/// rows and `variant_<k>.dot` numbering.
fn ordered_variants(multiset: &PotMultiset) -> Vec<(String, u64, Pot)> {
    let mut rows: Vec<(String, u64, Pot)> = multiset
        .variants()
        .map(|(variant, count)| {
            let key = multiset.variant_key(variant);
            (key, count, variant_pot(multiset, variant))
        })
        .collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows
}

fn variant_pot(multiset: &PotMultiset, variant: &crate::pot::PotVariant) -> Pot {
    let nodes: Vec<crate::pot::NodeId> = variant.nodes().iter().copied().collect();
    let position: BTreeMap<crate::pot::NodeId, usize> =
        nodes.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let payloads: Vec<PowlModel> = nodes
        .iter()
        .map(|id| multiset.payload(*id).clone())
        .collect();
    let edges: Vec<(usize, usize)> = variant
        .edges()
        .iter()
        .map(|(a, b)| (position[a], position[b]))
        .collect();
    Pot::new(payloads, edges).expect("variants are valid traces")
}

fn add_pot_outputs(outputs: &mut OutputSet, dir: &Path, multiset: &PotMultiset) {
    for (k, (_, _, pot)) in ordered_variants(multiset).iter().enumerate() {
        outputs.add(
            dir.join(format!("variant_{}.dot", k + 1)),
            export_pot_dot(pot),
        );
    }
}

/// Variant table (TSV: key, count) plus one DOT file per variant.
pub fn cmd_pots(cfg: &RunConfig) -> Result<String, CliError> {
    let log = parse_log(cfg)?;
    let (multiset, _) = pots_from_log(cfg, &log)?;
    let rows = ordered_variants(&multiset);

    let mut table = String::from("variant\tcount\n");
    for (key, count, _) in &rows {
        writeln!(table, "{key}\t{count}").expect("writing to a string");
    }
    if let Some(dir) = &cfg.out_pots {
        let mut outputs = OutputSet::new();
        add_pot_outputs(&mut outputs, dir, &multiset);
        outputs.write_all()?;
    }
    Ok(table)
}

/// Replays a discovered model against a log and reports fitness. Exit is
/// nonzero iff some linearization is rejected.
pub fn cmd_check(
    model_path: &Path,
    cfg: &RunConfig,
    report_path: Option<&Path>,
) -> Result<String, CliError> {
    let model_text = read_input(model_path).and_then(|bytes| {
        String::from_utf8(bytes).map_err(|_| CliError::Ingest(IngestError::Encoding))
    })?;
    let model = PowlModel::from_json(&model_text)?;
    let log = parse_log(cfg)?;
    let (multiset, _) = pots_from_log(cfg, &log)?;
    let report = verify_perfect_fitness(&model, &multiset, cfg.lin_cap, cfg.accept_budget)?;

    let json = report.to_json();
    if let Some(path) = report_path {
        let mut outputs = OutputSet::new();
        outputs.add(path.to_path_buf(), json.clone());
        outputs.write_all()?;
    }
    if !report.is_perfect() {
        return Err(CliError::FitnessFailed {
            failures: report.failures.len(),
        });
    }
    Ok(json)
}

/// Translates a model file to PNML and DOT.
pub fn cmd_convert(
    model_path: &Path,
    out_pnml: Option<&Path>,
    out_dot: Option<&Path>,
) -> Result<String, CliError> {
    let model_text = read_input(model_path).and_then(|bytes| {
        String::from_utf8(bytes).map_err(|_| CliError::Ingest(IngestError::Encoding))
    })?;
    let model = PowlModel::from_json(&model_text)?;
    let net = to_workflow_net(&model);
    let mut outputs = OutputSet::new();
    if let Some(path) = out_pnml {
        outputs.add(path.to_path_buf(), export_pnml(&net));
    }
    if let Some(path) = out_dot {
        outputs.add(path.to_path_buf(), export_net_dot(&net));
    }
    outputs.write_all()?;
    Ok(format!(
        "places={} transitions={} arcs={}",
        net.place_count(),
        net.transition_count(),
        net.arc_count()
    ))
}

/// Translates a model file to a workflow net and checks soundness.
pub fn cmd_soundness(model_path: &Path, budget: usize) -> Result<String, CliError> {
    let model_text = read_input(model_path).and_then(|bytes| {
        String::from_utf8(bytes).map_err(|_| CliError::Ingest(IngestError::Encoding))
    })?;
    let model = PowlModel::from_json(&model_text)?;
    let net = to_workflow_net(&model);
    let report = check_soundness(&net, budget)?;
    let summary = format!(
        "verdict={} explored_states={}{}",
        report.verdict,
        report.explored_states,
        match &report.witness {
            Some(crate::petri::Witness::Marking(marking)) => format!(
                " witness_marking={}",
                marking
                    .iter()
                    .map(|(p, c)| format!("p{p}:{c}"))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            Some(crate::petri::Witness::DeadTransition(t)) => format!(" dead_transition=t{t}"),
            None => String::new(),
        }
    );
    match report.verdict {
        Verdict::Sound => Ok(summary),
        Verdict::Unsound => {
            eprintln!("{summary}");
            Err(CliError::Unsound)
        }
        Verdict::Inconclusive => {
            eprintln!("{summary}");
            Err(CliError::Inconclusive)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn write_temp(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
        let path = dir.path().join(name);
        let mut file = std::fs::File::create(&path).unwrap();
        file.write_all(contents.as_bytes()).unwrap();
        path
    }

    const CSV: &str = "case,activity,timestamp\n\
        c1,a,2024-01-01 10:00\nc1,b,2024-01-01 11:00\n\
        c2,a,2024-01-02 10:00\nc2,b,2024-01-02 11:00\n\
        c3,a,2024-01-03 10:00\n";

    #[test]
    fn discover_writes_requested_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_temp(&dir, "log.csv", CSV);
        let cfg = RunConfig {
            input,
            timestamp_format: "%Y-%m-%d %H:%M".into(),
            out_model: Some(dir.path().join("model.json")),
            out_pnml: Some(dir.path().join("net.pnml")),
            ..RunConfig::default()
        };
        let summary = cmd_discover(&cfg).unwrap();
        assert!(summary.contains("cases=3"));
        assert!(summary.contains("variants=2"));
        assert!(dir.path().join("model.json").exists());
        assert!(dir.path().join("net.pnml").exists());
    }

    #[test]
    fn discover_without_outputs_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_temp(&dir, "log.csv", CSV);
        let cfg = RunConfig {
            input,
            ..RunConfig::default()
        };
        let err = cmd_discover(&cfg).unwrap_err();
        assert!(matches!(err, CliError::NoOutputRequested));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unreadable_input_exits_2_without_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig {
            input: dir.path().join("missing.csv"),
            out_model: Some(dir.path().join("model.json")),
            ..RunConfig::default()
        };
        let err = cmd_discover(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(!dir.path().join("model.json").exists());
    }

    #[test]
    fn discover_twice_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_temp(&dir, "log.csv", CSV);
        let out1 = dir.path().join("m1.json");
        let out2 = dir.path().join("m2.json");
        for out in [&out1, &out2] {
            let cfg = RunConfig {
                input: input.clone(),
                timestamp_format: "%Y-%m-%d %H:%M".into(),
                out_model: Some(out.clone()),
                ..RunConfig::default()
            };
            cmd_discover(&cfg).unwrap();
        }
        assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
    }

    #[test]
    fn check_accepts_its_own_discovery() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_temp(&dir, "log.csv", CSV);
        let model_path = dir.path().join("model.json");
        let cfg = RunConfig {
            input: input.clone(),
            timestamp_format: "%Y-%m-%d %H:%M".into(),
            out_model: Some(model_path.clone()),
            ..RunConfig::default()
        };
        cmd_discover(&cfg).unwrap();
        let check_cfg = RunConfig {
            input,
            timestamp_format: "%Y-%m-%d %H:%M".into(),
            ..RunConfig::default()
        };
        let json = cmd_check(&model_path, &check_cfg, None).unwrap();
        assert!(json.contains("\"failures\": []"));
    }

    #[test]
    fn check_rejects_a_wrong_model() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_temp(&dir, "log.csv", CSV);
        let model_path = write_temp(
            &dir,
            "model.json",
            r#"{"kind":"xor","children":[{"kind":"transition","label":"a"},{"kind":"transition","label":"b"}]}"#,
        );
        let cfg = RunConfig {
            input,
            timestamp_format: "%Y-%m-%d %H:%M".into(),
            ..RunConfig::default()
        };
        let err = cmd_check(&model_path, &cfg, None).unwrap_err();
        assert!(matches!(err, CliError::FitnessFailed { .. }));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn invalid_model_json_exits_3() {
        let dir = tempfile::tempdir().unwrap();
        let model_path = write_temp(&dir, "model.json", r#"{"kind":"and"}"#);
        let err = cmd_soundness(&model_path, 1000).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn pots_table_orders_by_count() {
        let dir = tempfile::tempdir().unwrap();
        let input = write_temp(&dir, "log.csv", CSV);
        let cfg = RunConfig {
            input,
            timestamp_format: "%Y-%m-%d %H:%M".into(),
            out_pots: Some(dir.path().join("pots")),
            ..RunConfig::default()
        };
        let table = cmd_pots(&cfg).unwrap();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 3, "header plus two variants");
        assert!(lines[1].ends_with("\t2"));
        assert!(lines[2].ends_with("\t1"));
        assert!(dir.path().join("pots/variant_1.dot").exists());
        assert!(dir.path().join("pots/variant_2.dot").exists());
    }

    #[test]
    fn convert_reports_net_size() {
        let dir = tempfile::tempdir().unwrap();
        let model_path = write_temp(&dir, "model.json", r#"{"kind":"transition","label":"a"}"#);
        let out = dir.path().join("net.pnml");
        let summary = cmd_convert(&model_path, Some(&out), None).unwrap();
        assert_eq!(summary, "places=2 transitions=1 arcs=2");
        let pnml = std::fs::read_to_string(out).unwrap();
        assert_eq!(pnml.matches("<place ").count(), 2);
    }

    #[test]
    fn soundness_of_a_leaf_model() {
        let dir = tempfile::tempdir().unwrap();
        let model_path = write_temp(&dir, "model.json", r#"{"kind":"transition","label":"a"}"#);
        let summary = cmd_soundness(&model_path, 1000).unwrap();
        assert!(summary.starts_with("verdict=sound"));
    }

    #[test]
    fn config_file_parses_key_value_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_temp(
            &dir,
            "run.conf",
            "# comment\ngranularity = day\nlin-cap=50\n",
        );
        let values = load_config_file(&path).unwrap();
        assert_eq!(values.get("granularity").map(String::as_str), Some("day"));
        assert_eq!(values.get("lin-cap").map(String::as_str), Some("50"));
    }

    #[test]
    fn malformed_config_line_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_temp(&dir, "run.conf", "granularity day\n");
        assert!(load_config_file(&path).is_err());
    }
}
