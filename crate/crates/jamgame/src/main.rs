//! Command-line driver for the jamming-game solver and simulator.

use clap::{Parser, Subcommand};
use jamgame::game::SimulationMode;
use jamgame::scenario::{
    cmd_allocate, cmd_check, cmd_simulate, cmd_sweep, parse_config, ScenarioConfig,
};
use jamgame::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "jamgame",
    about = "Two-team jamming power-allocation game: equilibrium solver and trajectory simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the static allocation game at the initial geometry.
    Allocate {
        #[arg(long)]
        config: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate the team trajectories and write trace.csv + summary.txt.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the config's trajectory mode.
        #[arg(long, value_parser = parse_mode)]
        mode: Option<SimulationMode>,
    },
    /// Report the equilibrium-existence certificates for a scenario.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-run the simulation over a linear range of one config key.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Config key to vary, e.g. physical.energy or agents.a1.speed.
        #[arg(long)]
        vary: String,
        /// LO:HI:N inclusive linear range.
        #[arg(long)]
        range: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_mode(s: &str) -> Result<SimulationMode, String> {
    match s {
        "saddle" => Ok(SimulationMode::Saddle),
        "myopic" => Ok(SimulationMode::Myopic),
        other => Err(format!("unknown mode '{other}' (saddle|myopic)")),
    }
}

fn load_config(path: &PathBuf) -> Result<ScenarioConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Domain(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Exit-code contract: 0 success, 1 solver non-convergence or runtime
/// failure, 2 input error.
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Domain(_) => 2,
        Error::Singularity(_)
        | Error::RootFinding { .. }
        | Error::NashNonConvergence { .. }
        | Error::SweepStep { .. } => 1,
    }
}

fn run() -> Result<(), Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Allocate { config, out } => {
            let cfg = load_config(&config)?;
            let report = cmd_allocate(&cfg)?;
            match out {
                Some(path) => std::fs::write(&path, &report)
                    .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))?,
                None => print!("{report}"),
            }
        }
        Command::Simulate { config, out, mode } => {
            let cfg = load_config(&config)?;
            let summary = cmd_simulate(&cfg, &out, mode)?;
            print!("{summary}");
        }
        Command::Check { config } => {
            let cfg = load_config(&config)?;
            print!("{}", cmd_check(&cfg)?);
        }
        Command::Sweep {
            config,
            vary,
            range,
            out,
        } => {
            let cfg = load_config(&config)?;
            let parts: Vec<&str> = range.split(':').collect();
            if parts.len() != 3 {
                return Err(Error::Domain(format!(
                    "range must be LO:HI:N, got '{range}'"
                )));
            }
            let lo: f64 = parts[0]
                .parse()
                .map_err(|e| Error::Domain(format!("range LO: {e}")))?;
            let hi: f64 = parts[1]
                .parse()
                .map_err(|e| Error::Domain(format!("range HI: {e}")))?;
            let n: usize = parts[2]
                .parse()
                .map_err(|e| Error::Domain(format!("range N: {e}")))?;
            let index = cmd_sweep(&cfg, &vary, lo, hi, n, &out)?;
            print!("{index}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
