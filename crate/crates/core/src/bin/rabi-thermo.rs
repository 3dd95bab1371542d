use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rabi_thermo::commands;
use rabi_thermo::config::{parse_methods, RunConfig};
use rabi_thermo::Error;

#[derive(Parser)]
#[command(version, about = "Qubit-oscillator dynamics and qubit thermometry")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Comma-separated solvers: exact, single, series, poles.
    #[arg(long)]
    solvers: Option<String>,
    /// Harmonic cutoff of the correlation series.
    #[arg(long)]
    nmax: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the selected solvers and write trajectory.csv, metadata.json, weights.csv.
    Simulate(Common),
    /// Amplitude spectra of rho00, from a config or an existing trajectory CSV.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Temperature round trips over the configured grid.
    Thermometry(Common),
    /// Correlation-series weight table.
    Weights(Common),
}

fn load(c: &Common) -> Result<Option<RunConfig>, Error> {
    let Some(path) = &c.config else {
        return Ok(None);
    };
    let mut cfg = RunConfig::load(path)?;
    if let Some(list) = &c.solvers {
        cfg.methods = parse_methods(&list.split(',').collect::<Vec<_>>())?;
    }
    if let Some(n) = c.nmax {
        cfg.n_max = n;
    }
    Ok(Some(cfg))
}

fn required(c: &Common) -> Result<RunConfig, Error> {
    load(c)?.ok_or_else(|| Error::Config("--config is required".into()))
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, Error> {
    match cli.command {
        Command::Simulate(c) => commands::cmd_simulate(&required(&c)?, &c.out),
        Command::Spectrum { common, input } => {
            let cfg = load(&common)?;
            commands::cmd_spectrum(cfg.as_ref(), input.as_deref(), &common.out)
        }
        Command::Thermometry(c) => commands::cmd_thermometry(&required(&c)?, &c.out),
        Command::Weights(c) => commands::cmd_weights(&required(&c)?, &c.out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
