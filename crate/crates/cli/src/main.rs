use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mazer_cli::commands;
use mazer_cli::{CliError, Format, Preset, RunConfig, Table};

#[derive(Parser)]
#[command(name = "mazer", version, about = "Transmission of ultracold atoms through a detuned micromaser")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Start from a figure recipe.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    /// TOML file of key = value settings (keys as the long flags).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Subcommand)]
enum Command {
    /// Exact and ultracold transmission along k/kappa or delta/g.
    #[command(after_help = "Columns: k, detuning, [detuning_hz], t_a, t_b, t_total, t_ultracold, ultracold_valid")]
    #[command(allow_negative_numbers = true)]
    Transmission(Common),
    /// Resonance catalog along k/kappa, or resonances of T versus delta/g.
    #[command(after_help = "Columns (axis k): detuning, m, k, amplitude, closed_form_amplitude, width, refined\n\
                            Columns (axis detuning): k, detuning, amplitude, width, [detuning_hz, width_hz]")]
    #[command(allow_negative_numbers = true)]
    Resonances(Common),
    /// Amplitude of resonance m as the detuning varies.
    #[command(after_help = "Columns: detuning, [detuning_hz], m, k, amplitude, ultracold_peak, closed")]
    #[command(allow_negative_numbers = true)]
    Amplitude(Common),
    /// Beam-averaged emission and stationary photon distribution.
    #[command(after_help = "Columns: detuning, n, mean_emission, probability")]
    #[command(allow_negative_numbers = true)]
    Pump(Common),
    /// Initial and final velocity distributions of the transmitted beam.
    #[command(after_help = "Columns: curve, detuning, k, density")]
    #[command(allow_negative_numbers = true)]
    Select(Common),
    /// Compare the closed form with the coupled-channel solver on a random grid.
    #[command(after_help = "Columns: samples, seed, max_delta_t_a, max_delta_t_b, max_flux_error, fallbacks, tolerance, passed\n\
                            Exits with status 1 when the tolerance is exceeded.")]
    #[command(allow_negative_numbers = true)]
    OracleCheck(Common),
}

fn resolve(c: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = c.preset.map(RunConfig::preset).unwrap_or_default();
    if let Some(path) = &c.config {
        cfg = cfg.overlay(&RunConfig::from_file(path)?);
    }
    Ok(cfg.overlay(&c.run))
}

fn emit(table: &Table, c: &Common) -> Result<(), CliError> {
    match &c.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            table.write(c.format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            table.write(c.format, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, command) = match &cli.command {
        Command::Transmission(c)
        | Command::Resonances(c)
        | Command::Amplitude(c)
        | Command::Pump(c)
        | Command::Select(c)
        | Command::OracleCheck(c) => (c, &cli.command),
    };
    let cfg = resolve(common)?;
    let table = match command {
        Command::Transmission(_) => commands::transmission(&cfg)?,
        Command::Resonances(_) => commands::resonances(&cfg)?,
        Command::Amplitude(_) => commands::amplitude(&cfg)?,
        Command::Pump(_) => commands::pump(&cfg)?,
        Command::Select(_) => commands::select(&cfg)?,
        Command::OracleCheck(_) => {
            let (table, passed) = commands::oracle_check(&cfg)?;
            emit(&table, common)?;
            if !passed {
                return Err(CliError::CheckFailed(format!(
                    "closed form and oracle differ by more than {}",
                    cfg.tolerance.unwrap_or(1e-9)
                )));
            }
            return Ok(());
        }
    };
    emit(&table, common)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mazer: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
