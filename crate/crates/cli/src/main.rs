mod args;
mod cache;
mod commands;
mod error;
mod output;
mod plot;
mod report;

use args::{Cli, Command, Format};
use clap::Parser;
use error::{CliError, CliResult};
use std::path::PathBuf;
use std::process::ExitCode;

/// Rendered output of one command.
pub struct Report {
    pub text: String,
    pub svg: Option<String>,
    /// Raised after the report is written (a soundness violation).
    pub failure: Option<CliError>,
}

fn run(cli: &Cli) -> CliResult<()> {
    let cache = cache::Cache::new(&cli.cache_dir);
    let json_out = cli.format == Format::Json;
    let (report, plot_name) = match &cli.command {
        Command::Spectrum(a) => (commands::spectrum(a, &cache, json_out)?, format!("spectrum-{}", a.kind.name())),
        Command::Bounds(a) => (commands::bounds(a, json_out)?, format!("bounds-{}", a.theorem.name())),
        Command::Certify(a) => (commands::certify(a, json_out)?, format!("certify-{}", a.target.name())),
        Command::Report(a) => (report::run(a, &cache, json_out)?, a.experiment.name().to_string()),
    };
    output::emit(&report.text, cli.output.as_deref())?;
    if let Some(p) = &cli.plot {
        match &report.svg {
            Some(svg) => {
                let path = p.clone().unwrap_or_else(|| PathBuf::from(format!("{plot_name}.svg")));
                cache::write_atomic(&path, svg.as_bytes())?;
            }
            None => eprintln!("note: this command has no plot"),
        }
    }
    match report.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
