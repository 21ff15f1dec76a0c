//! `powl-discovery` — discover concurrency-aware process models from event
//! logs.

use clap::{Args, Parser, Subcommand};
use powl_discovery::cli::{
    cmd_check, cmd_convert, cmd_discover, cmd_pots, cmd_soundness, load_config_file, CliError,
    InputFormat, RunConfig, DEFAULT_ACCEPT_BUDGET, DEFAULT_LIN_CAP, DEFAULT_SOUNDNESS_BUDGET,
};
use powl_discovery::event_log::{CsvMapping, Granularity};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "powl-discovery",
    version,
    about = "Discover concurrency-aware process models from event logs",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: parse, derive partially ordered traces,
    /// discover a model, export artifacts.
    Discover {
        #[command(flatten)]
        input: InputArgs,
        /// Write the model as canonical JSON.
        #[arg(long)]
        out_model: Option<PathBuf>,
        /// Write the workflow net as Graphviz DOT.
        #[arg(long)]
        out_dot: Option<PathBuf>,
        /// Write the workflow net as PNML.
        #[arg(long)]
        out_pnml: Option<PathBuf>,
        /// Write one DOT file per trace variant into this directory.
        #[arg(long)]
        out_pots: Option<PathBuf>,
    },
    /// Verify that a model accepts every linearization of every trace.
    Check {
        /// Model JSON produced by `discover`.
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        input: InputArgs,
        /// Write the fitness report as JSON.
        #[arg(long)]
        out_report: Option<PathBuf>,
    },
    /// Print the trace-variant table (TSV) and optionally export DOT files.
    Pots {
        #[command(flatten)]
        input: InputArgs,
        /// Write one DOT file per variant into this directory.
        #[arg(long)]
        out_pots: Option<PathBuf>,
    },
    /// Translate a model JSON file into PNML and/or DOT.
    Convert {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out_pnml: Option<PathBuf>,
        #[arg(long)]
        out_dot: Option<PathBuf>,
    },
    /// Translate a model to a workflow net and check soundness.
    Soundness {
        #[arg(long)]
        model: PathBuf,
        /// Marking budget for the state-space exploration.
        #[arg(long)]
        budget: Option<usize>,
    },
}

/// Input options shared by log-reading commands. Every option can also come
/// from `--config` (key = long flag name); explicit flags win.
#[derive(Args)]
struct InputArgs {
    /// Event log file (.xes or .csv).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Input format; inferred from the extension when omitted.
    #[arg(long, value_enum)]
    format: Option<InputFormat>,
    /// Timestamp abstraction applied after parsing.
    #[arg(long, value_enum)]
    granularity: Option<Granularity>,
    /// strftime-like pattern for CSV timestamps; empty means ISO-8601.
    #[arg(long)]
    timestamp_format: Option<String>,
    /// Abort on records with missing mandatory attributes.
    #[arg(long)]
    strict: bool,
    /// CSV column holding the case identifier.
    #[arg(long)]
    csv_case: Option<String>,
    /// CSV column holding the activity label.
    #[arg(long)]
    csv_activity: Option<String>,
    /// CSV column holding the (completion) timestamp.
    #[arg(long)]
    csv_timestamp: Option<String>,
    /// Optional CSV column holding a start timestamp; rows expand into
    /// start/complete pairs.
    #[arg(long)]
    csv_start_timestamp: Option<String>,
    /// Optional CSV column holding the lifecycle phase.
    #[arg(long)]
    csv_lifecycle: Option<String>,
    /// CSV delimiter.
    #[arg(long)]
    csv_delimiter: Option<char>,
    /// Cap on linearizations enumerated per variant.
    #[arg(long)]
    lin_cap: Option<usize>,
    /// State budget per trace replay.
    #[arg(long)]
    accept_budget: Option<usize>,
    /// Marking budget for soundness checks.
    #[arg(long)]
    soundness_budget: Option<usize>,
    /// Seed for randomized helpers.
    #[arg(long)]
    seed: Option<u64>,
    /// Optional key=value config file; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print progress details to stderr.
    #[arg(long)]
    verbose: bool,
}

impl InputArgs {
    fn resolve(self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => load_config_file(path)?,
            None => BTreeMap::new(),
        };
        let from_file = |key: &str| file.get(key).cloned();
        let bad = |key: &str, value: &str| CliError::BadConfig {
            path: self.config.clone().unwrap_or_default(),
            message: format!("invalid value `{value}` for `{key}`"),
        };

        let input = match self.input.or_else(|| from_file("input").map(PathBuf::from)) {
            Some(path) => path,
            None => {
                return Err(CliError::BadConfig {
                    path: self.config.clone().unwrap_or_default(),
                    message: "missing required `--input`".into(),
                })
            }
        };
        let format = match self.format {
            Some(format) => Some(format),
            None => match from_file("format").as_deref() {
                Some("xes") => Some(InputFormat::Xes),
                Some("csv") => Some(InputFormat::Csv),
                Some(other) => return Err(bad("format", other)),
                None => None,
            },
        };
        let granularity = match self.granularity {
            Some(granularity) => granularity,
            None => match from_file("granularity").as_deref() {
                Some("none") | None => Granularity::None,
                Some("second") => Granularity::Second,
                Some("minute") => Granularity::Minute,
                Some("hour") => Granularity::Hour,
                Some("day") => Granularity::Day,
                Some(other) => return Err(bad("granularity", other)),
            },
        };
        let parse_usize = |key: &str| -> Result<Option<usize>, CliError> {
            match from_file(key) {
                Some(value) => value.parse().map(Some).map_err(|_| bad(key, &value)),
                None => Ok(None),
            }
        };
        let defaults = CsvMapping::default();
        let csv = CsvMapping {
            case: self
                .csv_case
                .or_else(|| from_file("csv-case"))
                .unwrap_or(defaults.case),
            activity: self
                .csv_activity
                .or_else(|| from_file("csv-activity"))
                .unwrap_or(defaults.activity),
            timestamp: self
                .csv_timestamp
                .or_else(|| from_file("csv-timestamp"))
                .unwrap_or(defaults.timestamp),
            start_timestamp: self
                .csv_start_timestamp
                .or_else(|| from_file("csv-start-timestamp")),
            lifecycle: self.csv_lifecycle.or_else(|| from_file("csv-lifecycle")),
            delimiter: match self.csv_delimiter {
                Some(ch) => ch as u8,
                None => match from_file("csv-delimiter") {
                    Some(value) if value.len() == 1 => value.as_bytes()[0],
                    Some(other) => return Err(bad("csv-delimiter", &other)),
                    None => defaults.delimiter,
                },
            },
        };
        Ok(RunConfig {
            input,
            format,
            granularity,
            csv,
            timestamp_format: self
                .timestamp_format
                .or_else(|| from_file("timestamp-format"))
                .unwrap_or_default(),
            strict: self.strict || from_file("strict").as_deref() == Some("true"),
            out_model: None,
            out_dot: None,
            out_pnml: None,
            out_pots: None,
            lin_cap: self
                .lin_cap
                .or(parse_usize("lin-cap")?)
                .unwrap_or(DEFAULT_LIN_CAP),
            accept_budget: self
                .accept_budget
                .or(parse_usize("accept-budget")?)
                .unwrap_or(DEFAULT_ACCEPT_BUDGET),
            soundness_budget: self
                .soundness_budget
                .or(parse_usize("soundness-budget")?)
                .unwrap_or(DEFAULT_SOUNDNESS_BUDGET),
            seed: match self.seed {
                Some(seed) => seed,
                None => match from_file("seed") {
                    Some(value) => value.parse().map_err(|_| bad("seed", &value))?,
                    None => 0,
                },
            },
            verbose: self.verbose,
        })
    }
}

fn run() -> Result<String, CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Discover {
            input,
            out_model,
            out_dot,
            out_pnml,
            out_pots,
        } => {
            let mut cfg = input.resolve()?;
            cfg.out_model = out_model;
            cfg.out_dot = out_dot;
            cfg.out_pnml = out_pnml;
            cfg.out_pots = out_pots;
            cmd_discover(&cfg)
        }
        Command::Check {
            model,
            input,
            out_report,
        } => {
            let cfg = input.resolve()?;
            cmd_check(&model, &cfg, out_report.as_deref())
        }
        Command::Pots { input, out_pots } => {
            let mut cfg = input.resolve()?;
            cfg.out_pots = out_pots;
            cmd_pots(&cfg)
        }
        Command::Convert {
            model,
            out_pnml,
            out_dot,
        } => cmd_convert(&model, out_pnml.as_deref(), out_dot.as_deref()),
        Command::Soundness { model, budget } => {
            cmd_soundness(&model, budget.unwrap_or(DEFAULT_SOUNDNESS_BUDGET))
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(output) => {
            println!("{}", output.trim_end());
            ExitCode::SUCCESS
        }
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(error.exit_code())
        }
    }
}
