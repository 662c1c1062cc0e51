//! Command-line front end for `possverif`.
//!
//! Forecast archives are newline-delimited JSON (see [`archive`]); results
//! are written as named tables in JSON or CSV (see [`table`]).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use possverif::Universe;

pub mod archive;
mod commands;
pub mod table;

pub use archive::{read_archive, write_archive, ArchiveRecord, ObsRef};
pub use table::{write_table, write_tables, Cell, Format, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("line {line}: parse error: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: invalid record: {message}")]
    Validation { line: usize, message: String },
    #[error(transparent)]
    Core(#[from] possverif::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::Core(_) => {
                EXIT_VALIDATION
            }
            CliError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "possverif",
    version,
    about = "Verify possibilistic categorical forecasts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Universe file: {"categories": [...], "climatology": [...]}. Defaults to
    /// the six SPC outlook categories.
    #[arg(long, global = true)]
    pub universe: Option<PathBuf>,

    /// Forecast archive (NDJSON), or `-` for standard input.
    #[arg(long, global = true)]
    pub input: Option<String>,

    /// Output path, or `-` for standard output.
    #[arg(long, global = true, default_value = "-")]
    pub output: String,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Probability floor for log scores.
    #[arg(long, global = true, default_value_t = possverif::bridge::DEFAULT_EPSILON)]
    pub epsilon: f64,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-pair scorecard and aggregate means.
    Score,
    /// Probability conversion, surprise, information gain and decomposition.
    Bridge {
        /// Archive to use as the baseline instead of climatology.
        #[arg(long)]
        baseline: Option<String>,
    },
    /// Contingency tables, confusion matrix and categorical scores.
    Cat {
        /// Threshold category label (or index); events are "at least this severe".
        #[arg(long, conflicts_with = "all_thresholds")]
        threshold: Option<String>,
        /// Report every threshold (the default when --threshold is absent).
        #[arg(long)]
        all_thresholds: bool,
    },
    /// Performance, commitment and reliability diagram tables.
    Diag {
        #[arg(long, default_value_t = possverif::diagnostics::DEFAULT_TAU_STEP)]
        tau_step: f64,
        #[arg(long, default_value_t = possverif::diagnostics::DEFAULT_GRIDSIZE)]
        gridsize: usize,
    },
    /// Synthetic forecast archive (always NDJSON).
    Gen {
        #[arg(long, default_value_t = 800)]
        n: usize,
    },
    /// Compare a candidate archive against the --input baseline.
    Compare {
        #[arg(long)]
        candidate: String,
        #[arg(long, default_value_t = 1000)]
        resamples: usize,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        /// Threshold category for POD/FAR/CSI/PSS.
        #[arg(long)]
        threshold: Option<String>,
        /// Resample the two archives independently.
        #[arg(long)]
        unpaired: bool,
    },
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "possverif: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let universe = load_universe(cli.universe.as_ref())?;
    let mut buf = Vec::new();
    commands::dispatch(cli, &universe, &mut buf)?;
    if cli.output == "-" {
        stdout
            .write_all(&buf)
            .map_err(|e| CliError::Io(e.to_string()))?;
        stdout.flush().map_err(|e| CliError::Io(e.to_string()))
    } else {
        std::fs::write(&cli.output, &buf).map_err(|e| CliError::Io(format!("{}: {e}", cli.output)))
    }
}

pub fn load_universe(path: Option<&PathBuf>) -> Result<Universe, CliError> {
    let Some(path) = path else {
        return Ok(Universe::spc());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        line: e.line(),
        message: format!("{}: {e}", path.display()),
    })
}

fn open(path: &str) -> Result<Box<dyn BufRead>, CliError> {
    if path == "-" {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let file = File::open(path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    Ok(Box::new(BufReader::new(file)))
}

pub(crate) fn load_archive(
    path: &str,
    universe: &Universe,
) -> Result<Vec<possverif::VerificationPair>, CliError> {
    read_archive(open(path)?, universe)
}
