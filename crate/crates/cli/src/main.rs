//! `dilute-bose`: scattering lengths, energy bounds and oracle checks from
//! the command line.
//!
//! Exit status: 0 ok, 2 config error, 3 input outside the physical domain,
//! 4 oracle or solver failure.

// `!(x < y)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;
mod output;
mod plot;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{Command, Common, Format, RunConfig};
use error::CliError;
use output::Report;

#[derive(Parser)]
#[command(
    name = "dilute-bose",
    version,
    about = "Energy bounds for the dilute Bose gas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

fn emit(cfg: &RunConfig, report: &Report) -> Result<(), CliError> {
    let text = match cfg.format {
        Format::Csv => report.table.to_csv(),
        Format::Json => report.to_json(cfg),
    };
    std::io::stdout().lock().write_all(text.as_bytes())?;
    if let Some(path) = &cfg.plot {
        let (x, ys) = report.plot.as_ref().ok_or_else(|| {
            CliError::Config(format!("no plot available for '{}'", cfg.command.name()))
        })?;
        let xs = report.table.column(x).unwrap_or_default();
        let series: Vec<(&str, Vec<f64>)> = ys
            .iter()
            .map(|c| (*c, report.table.column(c).unwrap_or_default()))
            .collect();
        fs::write(path, plot::log_log_svg(x, &xs, &series))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (cfg, pot) = RunConfig::resolve(cli.command, cli.common)?;
    let report = commands::run(&cfg, pot.as_ref())?;
    emit(&cfg, &report)?;
    match report.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
