use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use soilpower_cli::{cmd_curve, cmd_design, cmd_simulate, load, CliError};

/// Solar-powered soil humidity controller: converter design, P-V curves and
/// closed-loop simulation.
#[derive(Parser)]
#[command(name = "soilpower", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Size the buck converter and check the chosen L and C.
    Design(Common),
    /// Export P-V curves and maximum power points as CSV.
    Curve(Common),
    /// Run the closed-loop simulation and export the time series as CSV.
    Simulate(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a configuration value, e.g. `--set controller.setpoint=45`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE")]
    overrides: Vec<String>,
}

fn read_config(common: &Common) -> Result<soilpower_cli::Settings, CliError> {
    let text = match &common.config {
        Some(path) => std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => String::new(),
    };
    Ok(load(&text, &common.overrides)?)
}

fn emit(common: &Common, text: &str) -> Result<(), CliError> {
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(command: &Command) -> Result<i32, CliError> {
    match command {
        Command::Design(common) => {
            let outcome = cmd_design(&read_config(common)?)?;
            emit(common, &outcome.text)?;
            Ok(outcome.exit_code())
        }
        Command::Curve(common) => {
            let csv = cmd_curve(&read_config(common)?)?;
            emit(common, &csv)?;
            Ok(0)
        }
        Command::Simulate(common) => {
            let csv = cmd_simulate(&read_config(common)?)?;
            emit(common, &csv)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
