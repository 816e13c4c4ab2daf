//! Batch front-end: runs one JSON-configured job per invocation and writes
//! a CSV table with a JSON metadata header, or compares completed preset
//! runs against the library's headline claims.

mod commands;
mod compare;
mod config;
mod table;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad or inconsistent configuration; names the offending key. Exit 1.
    Config { key: String, reason: String },
    /// Filesystem failure. Exit 2.
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(key: &'static str, reason: impl Into<String>) -> Self {
        CliError::Config {
            key: key.to_string(),
            reason: reason.into(),
        }
    }

    pub fn parse(path: &Path, reason: impl Into<String>) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, reason.into()),
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 1,
            CliError::Io { .. } => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { key, reason } => write!(f, "config error: {key}: {reason}"),
            CliError::Io { path, source } => write!(f, "io error: {path}: {source}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "oswsim",
    version,
    about = "Standing-wave qubit gate simulations: protocol dumps, robustness sweeps, motional ensembles, and pulse optimization"
)]
struct Cli {
    /// JSON run configuration (required unless a subcommand is given).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured output path.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Overrides the configured random seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Size of the worker thread pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluates the headline claims against completed preset runs.
    Compare {
        /// Directory holding the preset run outputs.
        #[arg(long)]
        results_dir: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::config("threads", "must be >= 1"));
        }
        // Ignore the error if a pool already exists (e.g. under tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    if let Some(Command::Compare { results_dir }) = &cli.command {
        let report = compare::compare_figures(results_dir)?;
        match &cli.output {
            Some(path) => std::fs::write(path, &report).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                source: e,
            })?,
            None => print!("{report}"),
        }
        return Ok(());
    }

    let config_path = cli.config.as_ref().ok_or_else(|| {
        CliError::config("config", "--config <path> is required (or use the compare subcommand)")
    })?;
    let text = std::fs::read_to_string(config_path).map_err(|e| CliError::Io {
        path: config_path.display().to_string(),
        source: e,
    })?;
    let parsed: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Config {
        key: "command".to_string(),
        reason: e.to_string(),
    })?;
    let resolved = parsed.with_overrides(
        cli.output.as_ref().map(|p| p.display().to_string()),
        cli.seed,
    );

    let table = commands::execute(&resolved)?;
    let out = PathBuf::from(resolved.output_path());
    table.write(&out)?;
    eprintln!("wrote {} ({} rows)", out.display(), table.rows.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
