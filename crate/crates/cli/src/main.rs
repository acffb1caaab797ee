//! `amoebalab` command-line runner.
//!
//! Exit status: 0 when the run passes its acceptance check (or has none),
//! 2 when the check fails, 1 on any error.

mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use output::{to_json, OutputDir};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] amoebalab::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match args::merge_config(argv).map(Cli::try_parse_from) {
        Ok(Ok(cli)) => cli,
        Ok(Err(e)) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&cli.command) {
        Ok(Some(false)) => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(command: &Command) -> Result<Option<bool>, CliError> {
    let started = Instant::now();
    let (common, config) = match command {
        Command::Multivolume(a) => (&a.common, to_json(a)?),
        Command::ThetaInvariance(a) => (&a.common, to_json(a)?),
        Command::ShubSmale(a) => (&a.common, to_json(a)?),
        Command::ToricScaling(a) => (&a.common, to_json(a)?),
        Command::Bounds(a) => (&a.common, to_json(a)?),
        Command::JacobianCheck(a) => (&a.common, to_json(a)?),
        Command::Raster(a) => (&a.common, to_json(a)?),
        Command::MixedVolume(a) => (&a.common, to_json(a)?),
    };
    let mut out = OutputDir::new(common.out.as_deref())?;
    let outcome = match command {
        Command::Multivolume(a) => commands::multivolume(a, &mut out)?,
        Command::ThetaInvariance(a) => commands::theta_invariance(a, &mut out)?,
        Command::ShubSmale(a) => commands::shub_smale(a)?,
        Command::ToricScaling(a) => commands::toric_scaling(a)?,
        Command::Bounds(a) => commands::bounds(a)?,
        Command::JacobianCheck(a) => commands::jacobian_check(a)?,
        Command::Raster(a) => commands::raster(a, &mut out)?,
        Command::MixedVolume(a) => commands::mixed_volume_cmd(a)?,
    };
    out.write_json("summary.json", &outcome.summary)?;
    println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
    if out.is_enabled() {
        let mut outputs: Vec<String> = out.written().iter().map(|p| p.display().to_string()).collect();
        outputs.push(
            common
                .out
                .as_ref()
                .map(|d| d.join("manifest.json").display().to_string())
                .unwrap_or_default(),
        );
        let manifest = json!({
            "subcommand": command.name(),
            "config": config,
            "master_seed": common.seed,
            "version": env!("CARGO_PKG_VERSION"),
            "outputs": outputs,
            "duration_secs": started.elapsed().as_secs_f64(),
        });
        out.write_json("manifest.json", &manifest)?;
    }
    Ok(outcome.verdict)
}
