use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use photon_fluid::cli_io::{derive_parameters, replay, run_command, Command, Config, DEFAULT_CONFIG};
use photon_fluid::{Error, Result};

/// Photon-fluid simulator for a planar Kerr cavity.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file; the bundled defaults when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, short, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Sub {
    /// Print the derived parameter report.
    Derive {
        #[arg(long, short)]
        config: Option<PathBuf>,
    },
    /// Evolve the background field and write snapshots.
    Simulate(RunArgs),
    /// Measure the excitation spectrum by simulation.
    Dispersion(RunArgs),
    /// Point-source sound-wave probe.
    Probe(RunArgs),
    /// Flow past an obstacle at each configured speed.
    Obstacle(RunArgs),
    /// Bracket the critical velocity by bisection.
    Scan(RunArgs),
    /// Dense linearized-operator spectrum against the closed form.
    Oracle(RunArgs),
    /// Re-run the command recorded in a manifest.
    Replay {
        manifest: PathBuf,
        #[arg(long, short, default_value = "replay")]
        out: PathBuf,
    },
    /// Print the bundled default configuration.
    DefaultConfig,
}

fn load(path: Option<&PathBuf>) -> Result<Config> {
    match path {
        Some(p) => Config::parse(&std::fs::read_to_string(p).map_err(|e| Error::Io {
            path: p.clone(),
            source: e,
        })?),
        None => Config::parse(DEFAULT_CONFIG),
    }
}

fn execute(cli: Cli) -> Result<()> {
    let (command, args) = match cli.command {
        Sub::Derive { config } => {
            print!("{}", derive_parameters(&load(config.as_ref())?)?.report_text());
            return Ok(());
        }
        Sub::DefaultConfig => {
            print!("{DEFAULT_CONFIG}");
            return Ok(());
        }
        Sub::Replay { manifest, out } => {
            let s = replay(&manifest, &out)?;
            println!("{}", s.message);
            println!("manifest: {}", s.manifest.display());
            return Ok(());
        }
        Sub::Simulate(a) => (Command::Simulate, a),
        Sub::Dispersion(a) => (Command::Dispersion, a),
        Sub::Probe(a) => (Command::Probe, a),
        Sub::Obstacle(a) => (Command::Obstacle, a),
        Sub::Scan(a) => (Command::Scan, a),
        Sub::Oracle(a) => (Command::Oracle, a),
    };
    let config = load(args.config.as_ref())?;
    let s = run_command(command, &config, &args.out)?;
    println!("{}", s.message);
    println!("manifest: {}", s.manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
