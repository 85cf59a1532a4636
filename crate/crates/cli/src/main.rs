use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use levytype_cli::commands::{self, Outcome};
use levytype_cli::output::TableFormat;
use levytype_cli::config::*;
use levytype_cli::{error_kind, exit_code_for_error};

/// Construct, simulate and verify Lévy and Lévy-type processes.
#[derive(Parser)]
#[command(name = "levytype", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON configuration file for the command.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; sample k uses stream id k.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Table format. CSV is the native format; `json` additionally mirrors
    /// tables as JSON arrays.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Emit single-file SVG line charts alongside tables.
    #[arg(long, global = true, default_value_t = false)]
    plot: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate a characteristic exponent from a triplet document.
    Exponent,
    /// Generate sample paths by one of the explicit constructions.
    Simulate {
        #[arg(long, value_parser = ["poisson", "cpp", "bm-levy", "levy-ito", "series", "sde"])]
        method: String,
    },
    /// Run a Monte Carlo validation suite and write its report.
    Validate {
        #[arg(long, value_parser = ["cf", "campbell", "isometry", "dynkin", "martingale", "ck"])]
        suite: String,
    },
    /// Estimate the probabilistic symbol along a frequency sweep.
    Symbol,
    /// Blumenthal–Getoor/Pruitt indices and exit-time brackets.
    Indices,
}

fn load_config<T: serde::de::DeserializeOwned>(path: &Option<PathBuf>) -> Result<T, AnyError> {
    let path = path
        .as_ref()
        .ok_or_else(|| -> AnyError { "this command requires --config <file>".into() })?;
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn run(cli: &Cli) -> Result<Outcome, AnyError> {
    let format = match cli.format {
        Format::Csv => TableFormat::Csv,
        Format::Json => TableFormat::Json,
    };
    match &cli.command {
        Command::Exponent => {
            let cfg: ExponentConfig = load_config(&cli.config)?;
            commands::cmd_exponent(&cfg, cli.seed, &cli.out, format, cli.plot)
        }
        Command::Simulate { method } => {
            let cfg: SimulateConfig = load_config(&cli.config)?;
            commands::cmd_simulate(method, &cfg, cli.seed, &cli.out, format, cli.plot)
        }
        Command::Validate { suite } => {
            let cfg: ValidateConfig = match &cli.config {
                Some(_) => load_config(&cli.config)?,
                None => serde_json::from_str("{}")?,
            };
            commands::cmd_validate(suite, &cfg, cli.seed, &cli.out)
        }
        Command::Symbol => {
            let cfg: SymbolCmdConfig = load_config(&cli.config)?;
            commands::cmd_symbol(&cfg, cli.seed, &cli.out, format, cli.plot)
        }
        Command::Indices => {
            let cfg: IndicesConfig = load_config(&cli.config)?;
            commands::cmd_indices(&cfg, cli.seed, &cli.out, format, cli.plot)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(err) => {
            let payload = serde_json::json!({
                "error": err.to_string(),
                "kind": error_kind(&err),
            });
            eprintln!("{payload}");
            ExitCode::from(exit_code_for_error(&err) as u8)
        }
    }
}
