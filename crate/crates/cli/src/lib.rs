//! Command-line front end: argument parsing, config, dispatch and exit codes.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use config::{RunConfig, CONFIG_ENV};
use error::CliError;
use output::{Format, Report};

#[derive(Debug, Parser)]
#[command(
    name = "basstune",
    version,
    about = "Sub-bass drum pitch analysis and transposition gain advice"
)]
pub struct Cli {
    /// Emit the versioned JSON report.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit flat CSV tables.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Config file (overrides the BASSTUNE_CONFIG environment variable).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a synthetic 808-style bass drum to a WAV file.
    Synth(commands::synth::Args),
    /// Pitch track, sweep, partials and f0 distribution of WAV files.
    Analyze(commands::analyze::Args),
    /// Equal-loudness contour (ISO 226:2003) at one loudness level.
    Contour(commands::contour::Args),
    /// Median near-field monitor response with quartiles.
    Monitors(commands::monitors::Args),
    /// Level change of a drum profile transposed by some semitones.
    Loss(commands::loss::Args),
    /// Rank song keys by how well the drum's pitch translates.
    Advise(commands::advise::Args),
    /// Per-year band power of a dated audio corpus.
    Corpus(commands::corpus::Args),
}

/// Result of one invocation: exit code and the two output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the tool. `config_env` is the value of `BASSTUNE_CONFIG`, if set.
/// Data goes to `stdout` only when the command succeeds.
pub fn run<I, S>(args: I, config_env: Option<OsString>) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: error::EXIT_INPUT, stdout: String::new(), stderr: text }
            } else {
                // --help and --version
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli, config_env) {
        Ok(text) => Outcome { code: 0, stdout: text, stderr: String::new() },
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn execute(cli: &Cli, config_env: Option<OsString>) -> Result<String, CliError> {
    let config_path = cli.config.clone().or_else(|| config_env.filter(|v| !v.is_empty()).map(PathBuf::from));
    let config = match config_path {
        Some(path) => RunConfig::load(&path)?,
        None => RunConfig::default(),
    };
    let format = if cli.json {
        Format::Json
    } else if cli.csv {
        Format::Csv
    } else {
        config.format
    };
    let report: Report = match &cli.command {
        Command::Synth(a) => commands::synth::run(a, &config)?,
        Command::Analyze(a) => commands::analyze::run(a, &config)?,
        Command::Contour(a) => commands::contour::run(a, &config)?,
        Command::Monitors(a) => commands::monitors::run(a, &config)?,
        Command::Loss(a) => commands::loss::run(a, &config)?,
        Command::Advise(a) => commands::advise::run(a, &config)?,
        Command::Corpus(a) => commands::corpus::run(a, &config)?,
    };
    Ok(report.render(format))
}

/// Reads `BASSTUNE_CONFIG` from the process environment.
pub fn config_from_env() -> Option<OsString> {
    std::env::var_os(CONFIG_ENV)
}
