//! `arcpade`: orthogonal polynomials and Padé approximants on symmetric arcs
//! from a JSON run configuration.

mod commands;
mod config;
mod output;
mod plot;

use clap::{Parser, Subcommand};
use config::RunConfig;
use output::{CliError, Output, Stage};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "arcpade", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Working precision in bits; overrides the configuration and ARC_PADE_BITS.
    #[arg(long, global = true)]
    bits: Option<u32>,
    /// Suppress progress messages.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Clone, Copy, Subcommand)]
enum Command {
    /// Trace the curve and report its residuals.
    Trace,
    /// Build scheme levels and their symmetry diagnostics.
    Scheme,
    /// Solve for q_n and write coefficients and zeros.
    Ortho,
    /// Evaluate approximants, numerators and error fields.
    Pade,
    /// Check the asymptotic laws against the configured tolerances.
    Verify,
    /// Plot zeros against the arc from earlier outputs.
    Plot,
}

impl Command {
    fn stage(self) -> Stage {
        match self {
            Command::Trace | Command::Scheme => Stage::Trace,
            Command::Ortho | Command::Pade => Stage::Ortho,
            Command::Verify => Stage::Verify,
            Command::Plot => Stage::Plot,
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::new(Stage::Config, "--config is required"))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::new(Stage::Config, format!("{}: {e}", path.display())))?;
    Ok(RunConfig::parse(&text, cli.bits)?)
}

fn run(cli: &Cli, out: &Output) -> Result<(), CliError> {
    let cfg = load(cli)?;
    commands::write_resolved(&cfg, out, cli.command.stage())?;
    match cli.command {
        Command::Trace => commands::trace(&cfg, out),
        Command::Scheme => commands::scheme(&cfg, out),
        Command::Ortho => commands::ortho(&cfg, out),
        Command::Pade => commands::pade_cmd(&cfg, out),
        Command::Verify => commands::verify(&cfg, out),
        Command::Plot => plot::plot(&cfg.degrees, out),
    }
}

fn main() -> ExitCode {
    // clap's own failure status (2) is taken by the tracing stage
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(64) } else { ExitCode::SUCCESS };
        }
    };
    let out = Output::new(&cli.out, cli.quiet);
    let _ = std::fs::remove_file(out.path("error.json"));
    match run(&cli, &out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let doc = e.to_json();
            eprintln!("{doc}");
            if e.stage != Stage::Config {
                // best effort; the message already went to stderr
                let _ = out.write_json(e.stage, "error.json", &doc);
            }
            ExitCode::from(e.stage.exit_code() as u8)
        }
    }
}
