//! Batch front-end: simulate sessions, hybridize logs, analyze dual
//! traces, and emit reports, with file-based stage boundaries.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analyzer::{analyze_dual_trace, MaxMatchSegmenter, Segmenter};
use crate::error::{AnalysisError, HybridizeError, LogError, ScriptError};
use crate::hybridizer::hybridize;
use crate::simulator::{parse_script, run_session, Layout, Lexicon, SessionConfig};
use crate::trace::{
    dual_trace_to_string, keystroke_log_to_string, parse_dual_trace, parse_keystroke_log,
    parse_text_log, text_log_to_string,
};

pub const EXIT_PARSE: i32 = 10;
pub const EXIT_INTEGRITY: i32 = 11;
pub const EXIT_HYBRIDIZE: i32 = 12;
pub const EXIT_ANALYSIS: i32 = 13;
pub const EXIT_IO: i32 = 14;
pub const EXIT_SCRIPT: i32 = 15;

#[derive(Debug, Parser)]
#[command(name = "dualtrace", version, about = "Align keystroke and text logs; analyze typing timing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayoutArg {
    Latin,
    Pinyin,
}

#[derive(Debug, Args)]
pub struct AnalyzeOpts {
    /// Lexicon file (pinyin -> candidates), also the segmentation dictionary.
    #[arg(long, env = "DUALTRACE_LEXICON")]
    pub lexicon: Option<PathBuf>,
    /// Outlier filter multiplier: samples outside mean +/- k*sd are dropped.
    #[arg(long = "outlier-sd", default_value_t = 2.0)]
    pub outlier_sd: f64,
    /// Word segmenter to use.
    #[arg(long, default_value = "fmm")]
    pub segmenter: String,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Replay a session script into paired keystroke/text logs plus ground truth.
    Simulate {
        /// Action script, one action per line.
        script: PathBuf,
        #[arg(long, env = "DUALTRACE_LEXICON")]
        lexicon: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = LayoutArg::Latin)]
        layout: LayoutArg,
        #[arg(long, default_value = "")]
        initial_text: String,
        /// Clock base in epoch-style milliseconds.
        #[arg(long, default_value_t = 0)]
        start_ms: u64,
        /// Output directory (keys.jsonl, text.jsonl, truth.json).
        #[arg(long)]
        out: PathBuf,
    },
    /// Align a keystroke log with a text log into a dual trace.
    Hybridize {
        #[arg(long = "in-keys")]
        in_keys: PathBuf,
        #[arg(long = "in-text")]
        in_text: PathBuf,
        /// Output directory (dual.jsonl, diagnostics.json).
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute metrics from a dual trace.
    Analyze {
        #[arg(long = "in-dual")]
        in_dual: PathBuf,
        #[command(flatten)]
        opts: AnalyzeOpts,
        /// Output directory (metrics.csv or metrics.txt, diagnostics.json).
        #[arg(long)]
        out: PathBuf,
    },
    /// Run hybridize + analyze in one process and write a combined summary.
    Report {
        #[arg(long = "in-keys")]
        in_keys: PathBuf,
        #[arg(long = "in-text")]
        in_text: PathBuf,
        #[command(flatten)]
        opts: AnalyzeOpts,
        /// Output directory (summary.txt, dual.jsonl, metrics.csv).
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<LogError> for CliError {
    fn from(e: LogError) -> Self {
        let code = match &e {
            LogError::Malformed { .. } | LogError::Schema { .. } => EXIT_PARSE,
            LogError::Integrity { .. } => EXIT_INTEGRITY,
            LogError::Io(_) => EXIT_IO,
        };
        CliError { code, message: e.to_string() }
    }
}

impl From<HybridizeError> for CliError {
    fn from(e: HybridizeError) -> Self {
        let code = match &e {
            HybridizeError::MismatchedLogs { .. } => EXIT_INTEGRITY,
            HybridizeError::Log(inner) => return CliError::from_log_ref(inner, e.to_string()),
            _ => EXIT_HYBRIDIZE,
        };
        CliError { code, message: e.to_string() }
    }
}

impl CliError {
    fn from_log_ref(e: &LogError, message: String) -> Self {
        let code = match e {
            LogError::Malformed { .. } | LogError::Schema { .. } => EXIT_PARSE,
            LogError::Integrity { .. } => EXIT_INTEGRITY,
            LogError::Io(_) => EXIT_IO,
        };
        CliError { code, message }
    }

    fn io(e: std::io::Error, path: &Path) -> Self {
        CliError { code: EXIT_IO, message: format!("{}: {e}", path.display()) }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError { code: EXIT_ANALYSIS, message: e.to_string() }
    }
}

impl From<ScriptError> for CliError {
    fn from(e: ScriptError) -> Self {
        CliError { code: EXIT_SCRIPT, message: e.to_string() }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(e, path))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| CliError::io(e, parent))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(e, path))
}

fn load_lexicon(path: &Option<PathBuf>) -> Result<Lexicon, CliError> {
    match path {
        Some(p) => {
            let text = read_file(p)?;
            Ok(Lexicon::parse(&text)?)
        }
        None => Ok(Lexicon::default()),
    }
}

fn make_segmenter(name: &str, lexicon: &Lexicon) -> Result<Box<dyn Segmenter>, CliError> {
    match name {
        "fmm" => Ok(Box::new(MaxMatchSegmenter::from_lexicon(lexicon))),
        other => Err(CliError {
            code: EXIT_SCRIPT,
            message: format!("unknown segmenter \"{other}\" (available: fmm)"),
        }),
    }
}

fn truth_json(truth: &crate::simulator::GroundTruth) -> String {
    // Hand-rolled so the ground-truth schema stays stable and readable.
    let mut out = String::from("{\n  \"passes\": [\n");
    for (i, p) in truth.pass_states.iter().enumerate() {
        let comma = if i + 1 == truth.pass_states.len() { "" } else { "," };
        out.push_str(&format!(
            "    {{\"pass\": {}, \"t_ms\": {}, \"text\": {}}}{comma}\n",
            p.pass_id,
            p.t.millis(),
            serde_json::to_string(&p.text).expect("string"),
        ));
    }
    out.push_str("  ],\n  \"confirmations\": [\n");
    for (i, c) in truth.confirmations.iter().enumerate() {
        let comma = if i + 1 == truth.confirmations.len() { "" } else { "," };
        out.push_str(&format!(
            "    {{\"key_event_id\": {}, \"text\": {}, \"pinyin\": {}, \"start\": {}, \"end\": {}}}{comma}\n",
            c.key_event_id,
            serde_json::to_string(&c.text).expect("string"),
            serde_json::to_string(&c.pinyin).expect("string"),
            c.start,
            c.end,
        ));
    }
    out.push_str(&format!(
        "  ],\n  \"final_text\": {},\n  \"warnings\": {}\n}}\n",
        serde_json::to_string(&truth.final_text).expect("string"),
        serde_json::to_string(&truth.warnings).expect("strings"),
    ));
    out
}

/// Run one subcommand; errors carry their exit code.
pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { script, lexicon, layout, initial_text, start_ms, out } => {
            let script_text = read_file(&script)?;
            let actions = parse_script(&script_text)?;
            let lexicon = load_lexicon(&lexicon)?;
            let config = SessionConfig {
                layout: match layout {
                    LayoutArg::Latin => Layout::Latin,
                    LayoutArg::Pinyin => Layout::Pinyin,
                },
                initial_text,
                start_ms,
                ..SessionConfig::default()
            };
            let output = run_session(&actions, &lexicon, &config)?;
            write_file(&out.join("keys.jsonl"), &keystroke_log_to_string(&output.key_log))?;
            write_file(&out.join("text.jsonl"), &text_log_to_string(&output.text_log))?;
            write_file(&out.join("truth.json"), &truth_json(&output.truth))?;
            println!(
                "simulated {} key events, {} snapshots -> {}",
                output.key_log.len(),
                output.text_log.len(),
                out.display()
            );
            Ok(())
        }
        Command::Hybridize { in_keys, in_text, out } => {
            let keys = parse_keystroke_log(BufReader::new(
                fs::File::open(&in_keys).map_err(|e| CliError::io(e, &in_keys))?,
            ))?;
            let snapshots = parse_text_log(BufReader::new(
                fs::File::open(&in_text).map_err(|e| CliError::io(e, &in_text))?,
            ))?;
            let (trace, diagnostics) = hybridize(&keys, &snapshots)?;
            write_file(&out.join("dual.jsonl"), &dual_trace_to_string(&trace))?;
            write_file(&out.join("diagnostics.json"), &diagnostics.to_json())?;
            println!(
                "aligned {} events: {} coherent, {} resolved, {} unresolved -> {}",
                diagnostics.keydowns,
                diagnostics.coherent,
                diagnostics.resolved_total(),
                diagnostics.unresolved,
                out.display()
            );
            Ok(())
        }
        Command::Analyze { in_dual, opts, out } => {
            let trace = parse_dual_trace(BufReader::new(
                fs::File::open(&in_dual).map_err(|e| CliError::io(e, &in_dual))?,
            ))?;
            let lexicon = load_lexicon(&opts.lexicon)?;
            let segmenter = make_segmenter(&opts.segmenter, &lexicon)?;
            let analysis = analyze_dual_trace(&trace, segmenter.as_ref(), opts.outlier_sd)?;
            let (name, contents) = match opts.format {
                OutputFormat::Csv => ("metrics.csv", analysis.report.to_csv()),
                OutputFormat::Table => ("metrics.txt", analysis.report.to_table()),
            };
            write_file(&out.join(name), &contents)?;
            write_file(&out.join("diagnostics.json"), &analysis.diagnostics.to_json())?;
            println!(
                "analyzed {} keydowns ({} resolved incoherences) -> {}",
                analysis.diagnostics.keydowns,
                analysis.diagnostics.resolved_total(),
                out.display()
            );
            Ok(())
        }
        Command::Report { in_keys, in_text, opts, out } => {
            let keys = parse_keystroke_log(BufReader::new(
                fs::File::open(&in_keys).map_err(|e| CliError::io(e, &in_keys))?,
            ))?;
            let snapshots = parse_text_log(BufReader::new(
                fs::File::open(&in_text).map_err(|e| CliError::io(e, &in_text))?,
            ))?;
            let (trace, diagnostics) = hybridize(&keys, &snapshots)?;
            let lexicon = load_lexicon(&opts.lexicon)?;
            let segmenter = make_segmenter(&opts.segmenter, &lexicon)?;
            let analysis = analyze_dual_trace(&trace, segmenter.as_ref(), opts.outlier_sd)?;

            let mut summary = String::new();
            summary.push_str("alignment\n");
            summary.push_str(&format!(
                "  keydowns: {}\n  coherent: {}\n  unresolved: {}\n",
                diagnostics.keydowns, diagnostics.coherent, diagnostics.unresolved
            ));
            for (rule, count) in &diagnostics.resolved {
                summary.push_str(&format!("  resolved {rule}: {count}\n"));
            }
            summary.push('\n');
            summary.push_str(&analysis.report.to_table());

            write_file(&out.join("summary.txt"), &summary)?;
            write_file(&out.join("dual.jsonl"), &dual_trace_to_string(&trace))?;
            write_file(&out.join("metrics.csv"), &analysis.report.to_csv())?;
            println!("report -> {}", out.join("summary.txt").display());
            Ok(())
        }
    }
}
