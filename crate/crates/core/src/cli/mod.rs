//! Command-line front end: `procmine <command> ...`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 algorithm error.

mod document;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, FixedOffset};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use document::{DfgDocument, NetDocument, TransitionDocument};

use crate::analytics::{
    attribute_distribution, case_statistics, filter_log, sna, time_series, AnalyticsError, FilterAction, FilterSpec,
    Level, SnaMetric, TimeMode, TimeSeriesKind, VariantSelection,
};
use crate::conformance::{
    align_with, token_replay, AlignOptions, AlignmentCosts, ConformanceError, DEFAULT_SEARCH_BUDGET,
};
use crate::discovery::{
    discover, discover_dfg, discover_imdf_log, Algorithm, DiscoveryError, Parameters, NOISE_THRESHOLD,
};
use crate::evaluation::{evaluate, EvaluationError, FitnessMethod};
use crate::eventlog::{convert_to_log, convert_to_stream, EventLog, EventLogError, Timestamp};
use crate::ingest::{export_csv, export_xes, import_csv_with_report, import_xes_with_warnings, CsvMapping};
use crate::petrinet::{reachability_graph, NetError, ProcessTree, DEFAULT_STATE_BOUND};
use crate::render::{dfg_to_dot, petri_to_dot, sna_to_dot, tree_to_dot, ts_to_dot};

pub const THREADS_ENV: &str = "PROCMINE_THREADS";

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Algorithm(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Algorithm(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Algorithm(m) => m,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn data(e: impl ToString) -> CliError {
    CliError::Data(e.to_string())
}

impl From<EventLogError> for CliError {
    fn from(e: EventLogError) -> Self {
        data(e)
    }
}

impl From<NetError> for CliError {
    fn from(e: NetError) -> Self {
        CliError::Algorithm(e.to_string())
    }
}

impl From<DiscoveryError> for CliError {
    fn from(e: DiscoveryError) -> Self {
        match e {
            DiscoveryError::UnknownAlgorithm(_)
            | DiscoveryError::UnknownParameter { .. }
            | DiscoveryError::InvalidParameter { .. } => CliError::Usage(e.to_string()),
            DiscoveryError::Log(e) => e.into(),
            other => CliError::Algorithm(other.to_string()),
        }
    }
}

impl From<ConformanceError> for CliError {
    fn from(e: ConformanceError) -> Self {
        match e {
            ConformanceError::Log(e) => e.into(),
            ConformanceError::InvalidCosts => CliError::Usage(e.to_string()),
            other => CliError::Algorithm(other.to_string()),
        }
    }
}

impl From<EvaluationError> for CliError {
    fn from(e: EvaluationError) -> Self {
        match e {
            EvaluationError::Conformance(e) => e.into(),
            EvaluationError::UnknownMethod(_) => CliError::Usage(e.to_string()),
            other => CliError::Algorithm(other.to_string()),
        }
    }
}

impl From<AnalyticsError> for CliError {
    fn from(e: AnalyticsError) -> Self {
        match e {
            AnalyticsError::InvalidFilter(_) | AnalyticsError::InvalidBins | AnalyticsError::UnknownMetric(_) => {
                CliError::Usage(e.to_string())
            }
            AnalyticsError::NoResources => CliError::Algorithm(e.to_string()),
            other => data(other),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "procmine", version, about = "Process mining on XES and CSV event logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct CsvArgs {
    /// Case identifier column of CSV input.
    #[arg(long, default_value = "case:concept:name")]
    case_column: String,
    /// Activity column of CSV input.
    #[arg(long, default_value = "concept:name")]
    activity_column: String,
    /// Timestamp column of CSV input.
    #[arg(long, default_value = "time:timestamp")]
    timestamp_column: String,
    /// CSV input has no timestamp column.
    #[arg(long)]
    no_timestamp: bool,
    /// chrono format of CSV timestamps (ISO-8601 when omitted).
    #[arg(long)]
    timestamp_format: Option<String>,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

impl CsvArgs {
    fn mapping(&self) -> CliResult<CsvMapping> {
        if !self.delimiter.is_ascii() {
            return Err(CliError::Usage("delimiter must be an ASCII character".into()));
        }
        let mut mapping = CsvMapping::new(&self.case_column, &self.activity_column);
        if !self.no_timestamp {
            mapping = mapping.with_timestamp(&self.timestamp_column, self.timestamp_format.as_deref());
        }
        mapping.delimiter = self.delimiter as u8;
        Ok(mapping)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Alpha,
    AlphaPlus,
    Imdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Token,
    Alignment,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FilterKind {
    TimeFrame,
    CasePerformance,
    Endpoints,
    Variants,
    Attribute,
    Path,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Contained,
    Intersecting,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LevelArg {
    Trace,
    Event,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SeriesArg {
    EventsPerTime,
    CaseDuration,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MetricArg {
    Handover,
    WorkingTogether,
    Subcontracting,
    SimilarActivities,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert between XES and CSV (log <-> stream).
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        csv: CsvArgs,
    },
    /// Discover a Petri net.
    Discover {
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        /// IMDF edge filter threshold in [0, 1].
        #[arg(long)]
        noise: Option<String>,
        #[arg(long)]
        input: PathBuf,
        /// Net as JSON.
        #[arg(long)]
        model_out: Option<PathBuf>,
        /// Net as DOT.
        #[arg(long)]
        dot_out: Option<PathBuf>,
        /// Process tree as DOT (imdf only).
        #[arg(long)]
        tree_dot_out: Option<PathBuf>,
        /// Directly-follows graph as JSON.
        #[arg(long)]
        dfg_out: Option<PathBuf>,
        #[command(flatten)]
        csv: CsvArgs,
    },
    /// Replay or align a log on a net.
    Conform {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        report_out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 10)]
        log_move_cost: u64,
        #[arg(long, default_value_t = 10)]
        model_move_cost: u64,
        /// Expanded-state cap per trace variant.
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: usize,
        /// Plain Dijkstra instead of A*.
        #[arg(long)]
        no_heuristic: bool,
        #[command(flatten)]
        csv: CsvArgs,
    },
    /// Fitness, precision, generalization and simplicity.
    Evaluate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value = "token")]
        method: MethodArg,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        csv: CsvArgs,
    },
    /// Filter a log.
    Filter {
        #[arg(long, value_enum)]
        kind: FilterKind,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Window start (time-frame).
        #[arg(long)]
        start: Option<String>,
        /// Window end (time-frame).
        #[arg(long)]
        end: Option<String>,
        #[arg(long, value_enum, default_value = "contained")]
        mode: ModeArg,
        /// Minimum case duration in seconds (case-performance).
        #[arg(long)]
        min_duration: Option<f64>,
        /// Maximum case duration in seconds (case-performance).
        #[arg(long)]
        max_duration: Option<f64>,
        /// Allowed start activity (endpoints, repeatable).
        #[arg(long)]
        start_activity: Vec<String>,
        /// Allowed end activity (endpoints, repeatable).
        #[arg(long)]
        end_activity: Vec<String>,
        /// Keep the k most frequent variants.
        #[arg(long)]
        top_k: Option<usize>,
        /// Variant to keep, labels joined by `,` (repeatable).
        #[arg(long)]
        variant: Vec<String>,
        #[arg(long, value_enum, default_value = "trace")]
        level: LevelArg,
        #[arg(long)]
        key: Option<String>,
        /// Attribute value to match (repeatable).
        #[arg(long)]
        value: Vec<String>,
        /// Directly-follows path source activity.
        #[arg(long)]
        from: Option<String>,
        /// Directly-follows path target activity.
        #[arg(long)]
        to: Option<String>,
        /// Drop matching traces/events instead of keeping them.
        #[arg(long)]
        drop: bool,
        #[command(flatten)]
        csv: CsvArgs,
    },
    /// Variant and case statistics.
    Stats {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum)]
        time_series: Option<SeriesArg>,
        /// Numeric event attribute to histogram.
        #[arg(long)]
        attribute: Option<String>,
        #[arg(long, default_value_t = 10)]
        bins: usize,
        #[command(flatten)]
        csv: CsvArgs,
    },
    /// Social network analysis.
    Sna {
        #[arg(long, value_enum)]
        metric: MetricArg,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        dot_out: Option<PathBuf>,
        /// Edges below this value are left out of the DOT output.
        #[arg(long, default_value_t = 0.0)]
        threshold: f64,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        csv: CsvArgs,
    },
    /// Render a net or DFG JSON document as DOT.
    Render {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        dot_out: Option<PathBuf>,
        /// Render the reachability graph of a net instead of the net.
        #[arg(long)]
        reachability: bool,
    },
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| data(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| data(format!("cannot write {}: {e}", path.display())))
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn load_log(path: &Path, csv: &CsvArgs, err: &mut dyn Write) -> CliResult<EventLog> {
    let bytes = read(path)?;
    if is_csv(path) {
        let import = import_csv_with_report(&bytes, &csv.mapping()?).map_err(data)?;
        if !import.skipped_rows.is_empty() {
            let _ = writeln!(
                err,
                "warning: skipped {} rows without case id",
                import.skipped_rows.len()
            );
        }
        Ok(convert_to_log(&import.stream)?)
    } else {
        let import = import_xes_with_warnings(&bytes).map_err(data)?;
        for w in &import.warnings {
            let _ = writeln!(err, "warning: {}: {}", w.position, w.message);
        }
        Ok(import.log)
    }
}

fn save_log(path: &Path, log: &EventLog) -> CliResult<()> {
    if is_csv(path) {
        write_file(path, &export_csv(&convert_to_stream(log)))
    } else {
        write_file(path, &export_xes(log))
    }
}

fn load_net(path: &Path) -> CliResult<crate::petrinet::AcceptingPetriNet> {
    let doc: NetDocument = serde_json::from_slice(&read(path)?)
        .map_err(|e| data(format!("{}: not a net document: {e}", path.display())))?;
    doc.to_net().map_err(data)
}

fn json_text(value: &impl serde::Serialize) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => write_file(p, text.as_bytes()),
        None => out.write_all(text.as_bytes()).map_err(data),
    }
}

fn parse_instant(text: &str) -> CliResult<DateTime<FixedOffset>> {
    Timestamp::parse(text)
        .map(|t| t.instant())
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn require<T: Clone>(value: &Option<T>, flag: &str, kind: &str) -> CliResult<T> {
    value
        .clone()
        .ok_or_else(|| CliError::Usage(format!("--kind {kind} requires --{flag}")))
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Convert { input, output, csv } => {
            let log = load_log(&input, &csv, err)?;
            save_log(&output, &log)
        }
        Command::Discover {
            algorithm,
            noise,
            input,
            model_out,
            dot_out,
            tree_dot_out,
            dfg_out,
            csv,
        } => {
            let log = load_log(&input, &csv, err)?;
            let algorithm = match algorithm {
                AlgorithmArg::Alpha => Algorithm::Alpha,
                AlgorithmArg::AlphaPlus => Algorithm::AlphaPlus,
                AlgorithmArg::Imdf => Algorithm::Imdf,
            };
            let mut params = Parameters::new();
            if let Some(noise) = &noise {
                params.insert(NOISE_THRESHOLD.to_string(), noise.clone());
            }
            let anet = discover(&log, algorithm, &params)?;
            if let Some(path) = &tree_dot_out {
                if algorithm != Algorithm::Imdf {
                    return Err(CliError::Usage("--tree-dot-out requires --algorithm imdf".into()));
                }
                let threshold = noise.as_deref().and_then(|n| n.trim().parse().ok()).unwrap_or(0.0);
                let tree: ProcessTree = discover_imdf_log(&log, threshold)?;
                write_file(path, tree_to_dot(&tree).map_err(data)?.as_bytes())?;
            }
            if let Some(path) = &dfg_out {
                write_file(path, json_text(&DfgDocument::from_dfg(&discover_dfg(&log)?)).as_bytes())?;
            }
            if let Some(path) = &model_out {
                write_file(path, json_text(&NetDocument::from_net(&anet)).as_bytes())?;
            }
            match &dot_out {
                Some(path) => write_file(path, petri_to_dot(&anet).as_bytes()),
                None if model_out.is_none() => emit(None, &json_text(&NetDocument::from_net(&anet)), out),
                None => Ok(()),
            }
        }
        Command::Conform {
            method,
            input,
            model,
            report_out,
            json,
            log_move_cost,
            model_move_cost,
            budget,
            no_heuristic,
            csv,
        } => {
            let log = load_log(&input, &csv, err)?;
            let anet = load_net(&model)?;
            let ids: Vec<String> = log
                .traces
                .iter()
                .enumerate()
                .map(|(i, t)| t.case_id().unwrap_or_else(|| i.to_string()))
                .collect();
            let text = match method {
                MethodArg::Token => {
                    let results = token_replay(&log, &anet)?;
                    if json {
                        let rows: Vec<Value> = ids
                            .iter()
                            .zip(&results)
                            .map(|(id, r)| {
                                json!({
                                    "case_id": id,
                                    "produced": r.produced,
                                    "consumed": r.consumed,
                                    "missing": r.missing,
                                    "remaining": r.remaining,
                                    "fitness": r.trace_fitness,
                                    "reached_final": r.reached_final,
                                })
                            })
                            .collect();
                        json_text(&rows)
                    } else {
                        let mut text = String::from("case_id\tproduced\tconsumed\tmissing\tremaining\tfitness\n");
                        for (id, r) in ids.iter().zip(&results) {
                            writeln!(
                                text,
                                "{id}\t{}\t{}\t{}\t{}\t{}",
                                r.produced, r.consumed, r.missing, r.remaining, r.trace_fitness
                            )
                            .unwrap();
                        }
                        text
                    }
                }
                MethodArg::Alignment => {
                    let options = AlignOptions {
                        costs: AlignmentCosts {
                            log_move: log_move_cost,
                            visible_model_move: model_move_cost,
                        },
                        heuristic: !no_heuristic,
                        budget,
                    };
                    let alignments = align_with(&log, &anet, options)?;
                    if json {
                        let rows: Vec<Value> = ids
                            .iter()
                            .zip(&alignments)
                            .map(|(id, a)| {
                                json!({
                                    "case_id": id,
                                    "cost": a.cost,
                                    "fitness": a.fitness,
                                    "moves": a.moves.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                                })
                            })
                            .collect();
                        json_text(&rows)
                    } else {
                        let mut text = String::from("case_id\tcost\tfitness\talignment\n");
                        for (id, a) in ids.iter().zip(&alignments) {
                            writeln!(text, "{id}\t{}\t{}\t{}", a.cost, a.fitness, a.moves_text()).unwrap();
                        }
                        text
                    }
                }
            };
            emit(report_out.as_deref(), &text, out)
        }
        Command::Evaluate {
            input,
            model,
            method,
            json,
            csv,
        } => {
            let log = load_log(&input, &csv, err)?;
            let anet = load_net(&model)?;
            let method = match method {
                MethodArg::Token => FitnessMethod::Token,
                MethodArg::Alignment => FitnessMethod::Alignment,
            };
            let q = evaluate(&log, &anet, method)?;
            let text = if json {
                json_text(&json!({
                    "fitness": {
                        "average_trace_fitness": q.fitness.average_trace_fitness,
                        "perc_fit_traces": q.fitness.perc_fit_traces,
                        "method": q.fitness.method.to_string(),
                    },
                    "precision": q.precision,
                    "generalization": q.generalization,
                    "simplicity": q.simplicity,
                }))
            } else {
                format!(
                    "metric\tvalue\nfitness.method\t{}\nfitness.average_trace_fitness\t{}\nfitness.perc_fit_traces\t{}\nprecision\t{}\ngeneralization\t{}\nsimplicity\t{}\n",
                    q.fitness.method,
                    q.fitness.average_trace_fitness,
                    q.fitness.perc_fit_traces,
                    q.precision,
                    q.generalization,
                    q.simplicity
                )
            };
            emit(None, &text, out)
        }
        Command::Filter {
            kind,
            input,
            output,
            start,
            end,
            mode,
            min_duration,
            max_duration,
            start_activity,
            end_activity,
            top_k,
            variant,
            level,
            key,
            value,
            from,
            to,
            drop,
            csv,
        } => {
            let action = if drop { FilterAction::Drop } else { FilterAction::Keep };
            let spec = match kind {
                FilterKind::TimeFrame => FilterSpec::TimeFrame {
                    start: parse_instant(&require(&start, "start", "time-frame")?)?,
                    end: parse_instant(&require(&end, "end", "time-frame")?)?,
                    mode: match mode {
                        ModeArg::Contained => TimeMode::Contained,
                        ModeArg::Intersecting => TimeMode::Intersecting,
                    },
                },
                FilterKind::CasePerformance => FilterSpec::CasePerformance {
                    min_seconds: min_duration.unwrap_or(0.0),
                    max_seconds: max_duration.unwrap_or(f64::INFINITY),
                },
                FilterKind::Endpoints => FilterSpec::Endpoints {
                    start_in: start_activity.into_iter().collect(),
                    end_in: end_activity.into_iter().collect(),
                },
                FilterKind::Variants => match (top_k, variant.is_empty()) {
                    (Some(k), true) => FilterSpec::Variants(VariantSelection::TopK(k)),
                    (None, false) => FilterSpec::Variants(VariantSelection::Keep(variant)),
                    _ => {
                        return Err(CliError::Usage(
                            "--kind variants requires exactly one of --top-k or --variant".into(),
                        ))
                    }
                },
                FilterKind::Attribute => FilterSpec::Attribute {
                    level: match level {
                        LevelArg::Trace => Level::Trace,
                        LevelArg::Event => Level::Event,
                    },
                    key: require(&key, "key", "attribute")?,
                    values: value.into_iter().collect::<BTreeSet<_>>(),
                    action,
                },
                FilterKind::Path => FilterSpec::Path {
                    from: require(&from, "from", "path")?,
                    to: require(&to, "to", "path")?,
                    action,
                },
            };
            let log = load_log(&input, &csv, err)?;
            let filtered = filter_log(&log, &spec)?;
            save_log(&output, &filtered)
        }
        Command::Stats {
            input,
            json,
            time_series: series,
            attribute,
            bins,
            csv,
        } => {
            let log = load_log(&input, &csv, err)?;
            let stats = case_statistics(&log)?;
            let mut report = json!({
                "traces": log.len(),
                "events": log.event_count(),
                "mean_duration_seconds": stats.mean_duration(),
                "variants": stats.variants.iter().map(|(v, n)| json!({"variant": v, "count": n})).collect::<Vec<_>>(),
                "cases": stats.cases.iter().map(|c| json!({
                    "case_id": c.id,
                    "start": c.start.as_ref().map(|t| t.as_str().to_string()),
                    "end": c.end.as_ref().map(|t| t.as_str().to_string()),
                    "duration_seconds": c.duration_seconds,
                    "events": c.event_count,
                    "variant": c.variant,
                })).collect::<Vec<_>>(),
            });
            let mut text = format!("traces\t{}\nevents\t{}\n", log.len(), log.event_count());
            if let Some(mean) = stats.mean_duration() {
                writeln!(text, "mean_duration_seconds\t{mean}").unwrap();
            }
            text.push_str("\nvariant\tcount\n");
            for (v, n) in &stats.variants {
                writeln!(text, "{v}\t{n}").unwrap();
            }
            text.push_str("\ncase_id\tstart\tend\tduration_seconds\tevents\n");
            for c in &stats.cases {
                writeln!(
                    text,
                    "{}\t{}\t{}\t{}\t{}",
                    c.id.as_deref().unwrap_or(""),
                    c.start.as_ref().map_or("", |t| t.as_str()),
                    c.end.as_ref().map_or("", |t| t.as_str()),
                    c.duration_seconds.map(|d| d.to_string()).unwrap_or_default(),
                    c.event_count
                )
                .unwrap();
            }
            if let Some(series) = series {
                let kind = match series {
                    SeriesArg::EventsPerTime => TimeSeriesKind::EventsPerTime,
                    SeriesArg::CaseDuration => TimeSeriesKind::CaseDuration,
                };
                let bins = time_series(&log, kind, bins)?;
                text.push_str("\nbin\tcount\n");
                for b in &bins {
                    writeln!(text, "{}\t{}", b.label, b.count).unwrap();
                }
                report["time_series"] = bins.iter().map(|b| json!({"bin": b.label, "count": b.count})).collect();
            }
            if let Some(key) = attribute {
                let h = attribute_distribution(&log, &key, bins)?;
                text.push_str("\nlower\tcount\n");
                for b in &h.bins {
                    writeln!(text, "{}\t{}", b.lower, b.count).unwrap();
                }
                writeln!(text, "ignored\t{}", h.ignored).unwrap();
                report["attribute"] = json!({
                    "key": key,
                    "bins": h.bins.iter().map(|b| json!({"lower": b.lower, "count": b.count})).collect::<Vec<_>>(),
                    "ignored": h.ignored,
                });
            }
            emit(None, &if json { json_text(&report) } else { text }, out)
        }
        Command::Sna {
            metric,
            input,
            dot_out,
            threshold,
            json,
            csv,
        } => {
            let log = load_log(&input, &csv, err)?;
            let metric = match metric {
                MetricArg::Handover => SnaMetric::Handover,
                MetricArg::WorkingTogether => SnaMetric::WorkingTogether,
                MetricArg::Subcontracting => SnaMetric::Subcontracting,
                MetricArg::SimilarActivities => SnaMetric::SimilarActivities,
            };
            let result = sna(&log, metric)?;
            if result.skipped_events > 0 {
                let _ = writeln!(
                    err,
                    "warning: skipped {} events without resource",
                    result.skipped_events
                );
            }
            if let Some(path) = &dot_out {
                write_file(path, sna_to_dot(&result, threshold).map_err(data)?.as_bytes())?;
            }
            let text = if json {
                json_text(&json!({
                    "metric": metric.name(),
                    "directed": result.directed,
                    "resources": result.resources,
                    "matrix": result.matrix,
                }))
            } else {
                let mut text = format!("{}\t{}\n", metric.name(), result.resources.join("\t"));
                for (r, row) in result.resources.iter().zip(&result.matrix) {
                    let cells: Vec<String> = row.iter().map(f64::to_string).collect();
                    writeln!(text, "{r}\t{}", cells.join("\t")).unwrap();
                }
                text
            };
            emit(None, &text, out)
        }
        Command::Render {
            input,
            dot_out,
            reachability,
        } => {
            let bytes = read(&input)?;
            let value: Value =
                serde_json::from_slice(&bytes).map_err(|e| data(format!("{}: invalid JSON: {e}", input.display())))?;
            let text = if value.get("places").is_some() {
                let doc: NetDocument = serde_json::from_value(value).map_err(data)?;
                let anet = doc.to_net().map_err(data)?;
                if reachability {
                    ts_to_dot(&reachability_graph(&anet, DEFAULT_STATE_BOUND)?).map_err(data)?
                } else {
                    petri_to_dot(&anet)
                }
            } else if value.get("activities").is_some() {
                if reachability {
                    return Err(CliError::Usage("--reachability needs a net document".into()));
                }
                let doc: DfgDocument = serde_json::from_value(value).map_err(data)?;
                dfg_to_dot(&doc.to_dfg())
            } else {
                return Err(data(format!("{}: neither a net nor a DFG document", input.display())));
            };
            emit(dot_out.as_deref(), &text, out)
        }
    }
}

fn thread_pool() -> CliResult<Option<rayon::ThreadPool>> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(None);
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map(Some)
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let (mut stdout, mut stderr) = (Vec::new(), Vec::new());
    let result = thread_pool().and_then(|pool| match pool {
        Some(pool) => pool.install(|| execute(cli.command, &mut stdout, &mut stderr)),
        None => execute(cli.command, &mut stdout, &mut stderr),
    });
    let _ = out.write_all(&stdout);
    let _ = err.write_all(&stderr);
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}
