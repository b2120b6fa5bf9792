use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use decohere_cli::{execute, load_config, CliError, Kind};

#[derive(Parser)]
#[command(name = "decohere", version, about = "Run decoherence scenarios and write reproducible CSV/JSON outputs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time-averaged coherence of a nondegenerate level system
    Thermal(RunArgs),
    /// Two-state system under constant monitoring
    Twostate(RunArgs),
    /// Growth of the off-diagonal interaction element when V and h do not commute
    Noncommutative(RunArgs),
    /// Lattice particle monitored through its position
    Localize(RunArgs),
    /// Several runs of one scenario over a list of parameter values
    Sweep(RunArgs),
    /// Parse and check a config without running it
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Seed for randomized scenarios; overrides the config
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress progress messages
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Do not print the resolved config
    #[arg(long)]
    quiet: bool,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (kind, args) = match cli.command {
        Command::Validate(v) => {
            let cfg = load_config(&v.config, None, v.seed)?;
            if !v.quiet {
                println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
            }
            return Ok(());
        }
        Command::Thermal(a) => (Kind::Thermal, a),
        Command::Twostate(a) => (Kind::Twostate, a),
        Command::Noncommutative(a) => (Kind::Noncommutative, a),
        Command::Localize(a) => (Kind::Localize, a),
        Command::Sweep(a) => (Kind::Sweep, a),
    };
    let cfg = load_config(&args.config, Some(kind), args.seed)?;
    let manifest = execute(&cfg, &args.out)?;
    if !args.quiet {
        eprintln!(
            "{}: wrote {} files to {} in {:.2}s",
            kind.name(),
            manifest.outputs.len() + 1,
            args.out.display(),
            manifest.wall_time_seconds
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("decohere: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
