mod commands;
mod config;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::GlobalFlags;

/// Infer gender from names and web images, and evaluate the methods against
/// labeled data.
#[derive(Debug, Parser)]
#[command(name = "namegender", version)]
struct Cli {
    #[command(flatten)]
    flags: GlobalFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Predict the gender of one person with each configured method.
    Infer {
        /// Full name, e.g. "Ada Lovelace".
        name: String,
        /// ISO 3166 alpha-2 country of the person.
        #[arg(long)]
        country: Option<String>,
    },
    /// Run every method over a labeled CSV (full_name,country,gender) and write reports.
    Evaluate {
        dataset: std::path::PathBuf,
        /// Directory for methods.csv, countries.csv and report.txt.
        #[arg(long, default_value = "report")]
        out_dir: std::path::PathBuf,
    },
    /// Inspect or maintain the response cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
    /// Print the tables of an earlier evaluation from its report files.
    Report {
        /// Directory holding methods.csv and countries.csv.
        dir: std::path::PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum CacheAction {
    /// Entry counts per backend.
    Stats,
    /// Drop records superseded by a later one for the same key.
    Prune,
    /// Fetch every web response a dataset needs into the cache.
    Warm { dataset: std::path::PathBuf },
}

#[derive(Debug)]
pub enum CliError {
    /// Bad invocation or configuration; exit code 2.
    Usage(String),
    /// Failure while running; exit code 1.
    Runtime(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Runtime(_) => ExitCode::from(1),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.flags.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let result = match cli.command {
        Command::Infer { name, country } => commands::infer(&cli.flags, &name, country.as_deref()),
        Command::Evaluate { dataset, out_dir } => commands::evaluate(&cli.flags, &dataset, &out_dir),
        Command::Cache { action } => match action {
            CacheAction::Stats => commands::cache_stats(&cli.flags),
            CacheAction::Prune => commands::cache_prune(&cli.flags),
            CacheAction::Warm { dataset } => commands::cache_warm(&cli.flags, &dataset),
        },
        Command::Report { dir } => commands::report(&cli.flags, &dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("namegender: {e}");
            e.exit_code()
        }
    }
}
