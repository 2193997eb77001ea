//! Command-line front end: one JSON configuration, one subcommand per
//! pipeline stage, artifacts plus a manifest in the output directory.

mod config;
mod output;
mod pipeline;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use config::{
    fraction_from_file_name, load, parse_config, DatasetConfig, EconomicsConfig, ExternalConfig, Overrides, Resolved,
    RunConfig, SamplingConfig, ScenarioConfig, DEFAULT_EXTERNAL_LABEL,
};
pub use output::{sha256_hex, write_atomic};
pub use pipeline::{load_corpus, load_external, slug, ExternalPredictions, Failure};

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "roiml", version, about = "Learning-curve economics for dependency classifiers")]
pub struct Cli {
    /// Run configuration (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output` in the config.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Overrides `sampling.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Comma-separated training fractions; overrides `sampling.fractions`.
    #[arg(long, global = true, value_delimiter = ',', value_name = "A,B,C")]
    pub fractions: Option<Vec<f64>>,
    /// Glob of external prediction files named by fraction (`preds_0.40.csv`).
    #[arg(long = "external-preds", global = true, value_name = "GLOB")]
    pub external_preds: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Parse an issue export into a requirement set.
    Ingest,
    /// Build the balanced pair corpus, test split and training schedule.
    Pairs,
    /// Run learning curves and write curve CSV/JSON with decisions.
    Curve,
    /// Compare techniques: crossovers and overlay charts.
    Compare,
    /// Re-derive decisions under the configured cost scenarios.
    Scenario,
    /// Full markdown report with charts.
    Report,
    /// Check the configuration and echo the resolved economics.
    ValidateConfig,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::Pairs => "pairs",
            Command::Curve => "curve",
            Command::Compare => "compare",
            Command::Scenario => "scenario",
            Command::Report => "report",
            Command::ValidateConfig => "validate-config",
        }
    }
}

/// `{"error":{"kind":..,"module":..,"message":..}}`
pub fn error_json(kind: &str, module: &str, message: &str) -> String {
    serde_json::json!({ "error": { "kind": kind, "module": module, "message": message } }).to_string()
}

fn report(stderr: &mut dyn Write, kind: &str, err: &Error) {
    let _ = writeln!(stderr, "{}", error_json(kind, err.module(), &err.to_string()));
}

/// Parse `args` (program name first) and run. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let message = e.kind().as_str().map_or_else(|| e.to_string(), str::to_string);
            let _ = writeln!(stderr, "{}", error_json("usage", "cli", &message));
            let _ = write!(stderr, "{e}");
            return EXIT_USAGE;
        }
    };
    execute(&cli, stdout, stderr)
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let Some(path) = &cli.config else {
        let _ = writeln!(stderr, "{}", error_json("usage", "cli", "--config <PATH> is required"));
        return EXIT_USAGE;
    };
    let overrides = Overrides {
        out: cli.out.clone(),
        seed: cli.seed,
        fractions: cli.fractions.clone(),
        external_preds: cli.external_preds.clone(),
    };
    let resolved = match load(path, &overrides) {
        Ok(r) => r,
        Err(e) => {
            report(stderr, "validation", &e);
            return EXIT_VALIDATION;
        }
    };
    for a in resolved.parameters.advisories() {
        log::warn!("{a}");
    }
    log::info!("{} with seed {}", cli.command.name(), resolved.seed);
    let outcome = match cli.command {
        Command::ValidateConfig => pipeline::validate_config(&resolved, stdout),
        Command::Ingest => pipeline::run_ingest(&resolved, stdout),
        Command::Pairs => pipeline::run_pairs(&resolved, stdout),
        Command::Curve => pipeline::run_curve_command(&resolved, stdout),
        Command::Compare => pipeline::run_compare(&resolved, stdout),
        Command::Scenario => pipeline::run_scenario(&resolved, stdout),
        Command::Report => pipeline::run_report(&resolved, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Validation(e)) => {
            report(stderr, "validation", &e);
            EXIT_VALIDATION
        }
        Err(Failure::Runtime(e)) => {
            report(stderr, "runtime", &e);
            EXIT_RUNTIME
        }
    }
}
