//! Command-line driver for the qppkit library.
//!
//! Every subcommand emits one artifact (JSON by default, CSV on request)
//! carrying the seed, the query count and the library version. Timing is
//! only recorded with `--timing`, so that a fixed seed reproduces the
//! artifact byte for byte.

pub mod commands;
pub mod error;
pub mod io;
pub mod parse;
pub mod verify;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

/// Seed used when neither `--seed` nor `QPPKIT_SEED` is given.
pub const DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Parser)]
#[command(name = "qppkit", version, about = "Quantum phase processing experiments on a dense simulator")]
pub struct Cli {
    /// RNG seed; falls back to QPPKIT_SEED, then to the built-in default.
    #[arg(long, global = true, env = "QPPKIT_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Write the artifact here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Record wall-clock time in the artifact (breaks byte-for-byte reproducibility).
    #[arg(long, global = true)]
    pub timing: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// QSP angles for an approximant or a polynomial file.
    Angles(commands::AnglesArgs),
    /// Build a polynomial approximant.
    Approx(commands::ApproxArgs),
    /// Quantum phase search.
    Qps(commands::QpsArgs),
    /// Order finding through phase search.
    Period(commands::PeriodArgs),
    /// Amplitude estimation through phase search.
    Qae(commands::QaeArgs),
    /// Hamiltonian simulation on a qubitized block encoding.
    Hamsim(commands::HamsimArgs),
    /// Entropy estimation from a density matrix file.
    Entropy(commands::EntropyArgs),
    /// Run the invariant suite of every module.
    Verify,
    /// Run a subcommand described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Config file accepted by `qppkit run`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub subcommand: String,
    #[serde(default)]
    pub parameters: Map<String, Value>,
    pub seed: Option<u64>,
    pub output_path: Option<String>,
    pub format: Option<Format>,
}

impl RunConfig {
    /// Equivalent command line. Parameter keys become `--key` flags, so
    /// unknown keys are rejected by the argument parser.
    pub fn to_args(&self) -> CliResult<Vec<String>> {
        if self.subcommand == "run" {
            return Err(CliError::Usage("a config file cannot invoke 'run'".into()));
        }
        let mut args = vec!["qppkit".to_string(), self.subcommand.clone()];
        for (key, value) in &self.parameters {
            let flag = format!("--{}", key.replace('_', "-"));
            match value {
                Value::Bool(true) => args.push(flag),
                Value::Bool(false) | Value::Null => {}
                Value::String(s) => args.extend([flag, s.clone()]),
                Value::Number(n) => args.extend([flag, n.to_string()]),
                Value::Array(items) => {
                    let parts: Vec<String> = items
                        .iter()
                        .map(|v| match v {
                            Value::String(s) => Ok(s.clone()),
                            Value::Number(n) => Ok(n.to_string()),
                            _ => Err(CliError::Usage(format!("parameter '{key}' has a non-scalar entry"))),
                        })
                        .collect::<CliResult<_>>()?;
                    args.extend([flag, parts.join(",")]);
                }
                Value::Object(_) => {
                    return Err(CliError::Usage(format!("parameter '{key}' must be a scalar or list")))
                }
            }
        }
        if let Some(seed) = self.seed {
            args.extend(["--seed".into(), seed.to_string()]);
        }
        if let Some(path) = &self.output_path {
            args.extend(["--output".into(), path.clone()]);
        }
        if let Some(format) = self.format {
            let f = match format {
                Format::Json => "json",
                Format::Csv => "csv",
            };
            args.extend(["--format".into(), f.into()]);
        }
        Ok(args)
    }
}

/// What a subcommand hands back for emission.
#[derive(Debug, Default)]
pub struct Report {
    pub fields: Map<String, Value>,
    /// One row per sweep point; emitted as CSV lines in CSV mode.
    pub rows: Vec<Map<String, Value>>,
    pub query_count: u64,
    /// Nonzero when the run completed but its checks failed.
    pub exit_code: i32,
}

/// Parses `args`, runs the subcommand, writes the artifact and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let err = CliError::Usage(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.exit_code()
        }
    }
}

fn execute(cli: Cli) -> CliResult<i32> {
    let name = match &cli.command {
        Command::Angles(_) => "angles",
        Command::Approx(_) => "approx",
        Command::Qps(_) => "qps",
        Command::Period(_) => "period",
        Command::Qae(_) => "qae",
        Command::Hamsim(_) => "hamsim",
        Command::Entropy(_) => "entropy",
        Command::Verify => "verify",
        Command::Run { config } => {
            let text = std::fs::read_to_string(config).map_err(|e| CliError::io(config.display(), e))?;
            let cfg: RunConfig =
                serde_json::from_str(&text).map_err(|e| CliError::format(config.display(), e))?;
            let args = cfg.to_args()?;
            let inner = Cli::try_parse_from(&args)
                .map_err(|e| CliError::Usage(e.to_string().trim().to_string()))?;
            return execute(inner);
        }
    };
    let seed = cli.seed;
    let start = Instant::now();
    let report = match &cli.command {
        Command::Angles(a) => commands::angles(a)?,
        Command::Approx(a) => commands::approx(a)?,
        Command::Qps(a) => commands::qps(a, seed)?,
        Command::Period(a) => commands::period(a, seed)?,
        Command::Qae(a) => commands::qae(a, seed)?,
        Command::Hamsim(a) => commands::hamsim(a)?,
        Command::Entropy(a) => commands::entropy(a, seed)?,
        Command::Verify => verify::report(seed),
        Command::Run { .. } => unreachable!(),
    };
    let wall = cli.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let text = render(name, seed, wall, &report, cli.format);
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path.display(), e))?,
        None => print!("{text}"),
    }
    Ok(report.exit_code)
}

/// Serializes a report; keys are sorted, so equal reports give equal bytes.
pub fn render(name: &str, seed: u64, wall_ms: Option<f64>, report: &Report, format: Format) -> String {
    let mut top = report.fields.clone();
    top.insert("command".into(), json!(name));
    top.insert("seed".into(), json!(seed));
    top.insert("query_count".into(), json!(report.query_count));
    top.insert("wall_time_ms".into(), json!(wall_ms));
    top.insert("library_version".into(), json!(qppkit::VERSION));
    match format {
        Format::Json => {
            if !report.rows.is_empty() {
                top.insert("rows".into(), Value::Array(report.rows.iter().cloned().map(Value::Object).collect()));
            }
            serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values serialize") + "\n"
        }
        Format::Csv => {
            let rows: Vec<Map<String, Value>> = if report.rows.is_empty() {
                vec![top.into_iter().filter(|(_, v)| !v.is_array() && !v.is_object()).collect()]
            } else {
                report
                    .rows
                    .iter()
                    .map(|r| {
                        let mut r = r.clone();
                        r.insert("seed".into(), json!(seed));
                        r
                    })
                    .collect()
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            let header: Vec<String> = rows[0].keys().cloned().collect();
            w.write_record(&header).expect("in-memory write");
            for r in &rows {
                let cells: Vec<String> = header.iter().map(|k| cell(r.get(k))).collect();
                w.write_record(&cells).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
        }
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}
