//! `qecnoise`: command-line front end for the correlated-noise QEC toolkit.
//!
//! Exit status: 0 on success, 1 on an invalid configuration or a module
//! error, 2 on a usage error.

mod commands;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use thiserror::Error;

use commands::{Artifact, Command};
use params::{Format, Params};

#[derive(Debug, Parser)]
#[command(name = "qecnoise", version, about = "Quantum error correction under correlated noise")]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Flat JSON object of parameters; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Report configuration problems and exit without running.
    #[arg(long, global = true)]
    validate: bool,

    #[command(flatten)]
    params: Params,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Module(#[from] qecnoise::Error),
    #[error("{0:#}")]
    Io(#[from] anyhow::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn resolve(cli: &Cli) -> Result<(Command, Params), CliError> {
    let params = match &cli.config {
        Some(path) => cli.params.over(&Params::from_file(path)?),
        None => cli.params.clone(),
    };
    let command = match (cli.command, params.command.as_deref()) {
        (Some(c), _) => c,
        (None, Some(name)) => {
            Command::from_str(name, false).map_err(|_| CliError::Usage(format!("unknown command `{name}` in config")))?
        }
        (None, None) => return Err(CliError::Usage("no command given (see --help)".into())),
    };
    Ok((command, params))
}

fn write_artifact(artifact: &Artifact, params: &Params) -> anyhow::Result<()> {
    use anyhow::Context;
    let Some(path) = &params.output else {
        return Ok(());
    };
    let body = match params.format() {
        Format::Csv => artifact.csv.clone(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&artifact.json).context("serialising artifact")?;
            s.push('\n');
            s
        }
    };
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let (command, params) = resolve(cli)?;
    let diags = commands::validate(command, &params);
    if cli.validate {
        if diags.is_empty() {
            println!("{}: configuration ok", command.name());
            return Ok(());
        }
        return Err(CliError::Invalid(diags));
    }
    if !diags.is_empty() {
        return Err(CliError::Invalid(diags));
    }
    if let Some(n) = params.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(anyhow::anyhow!("thread pool: {e}")))?;
    }
    let artifact = commands::run(command, &params)?;
    write_artifact(&artifact, &params)?;
    println!("{}", artifact.summary);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
