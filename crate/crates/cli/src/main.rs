//! `gerstner`: speed, surface profiles, Eulerian fields, particle paths and
//! the full verification sweep for Gerstner waves with Coriolis correction.
//!
//! Exit status: 0 on success, 1 when a verification, fit or inversion fails,
//! 2 for invalid parameters, configuration or usage.

mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "gerstner", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Wave speed c from the rotating dispersion relation
    Speed(Opts),
    /// Free-surface elevation over one wavelength
    Profile(Opts),
    /// Velocity, pressure and vorticity on a grid below the surface
    Field(Opts),
    /// Integrate one particle path and fit its orbit
    Trace(Opts),
    /// Run every residual check and print a JSON report
    Verify(Opts),
}

#[derive(Debug, clap::Args)]
struct Opts {
    /// Flat TOML file with any of the options below; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunConfig,
}

/// How a command ended, mapped onto the exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad parameters, configuration or options (status 2).
    Usage(anyhow::Error),
    /// The computation ran but did not meet its target (status 1).
    Failure(anyhow::Error),
}

pub trait Classify<T> {
    fn usage(self) -> Result<T, CliError>;
    fn failure(self) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Usage(e.into()))
    }

    fn failure(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Failure(e.into()))
    }
}

/// Rendered output and whether the command met its acceptance target.
pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let (command, opts) = match cli.command {
        Command::Speed(o) => (commands::speed as commands::Handler, o),
        Command::Profile(o) => (commands::profile as commands::Handler, o),
        Command::Field(o) => (commands::field as commands::Handler, o),
        Command::Trace(o) => (commands::trace as commands::Handler, o),
        Command::Verify(o) => (commands::verify as commands::Handler, o),
    };
    let file = match &opts.config {
        Some(path) => RunConfig::from_file(path).usage()?,
        None => RunConfig::default(),
    };
    let cfg = opts.run.over(file);
    let outcome = command(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &outcome.text)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))
            .usage()?,
        None => {
            let mut stdout = std::io::stdout().lock();
            // A closed pipe is not an error worth reporting.
            let _ = stdout.write_all(outcome.text.as_bytes());
        }
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome { pass: true, .. }) => ExitCode::SUCCESS,
        Ok(Outcome { pass: false, .. }) => ExitCode::from(1),
        Err(CliError::Failure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
