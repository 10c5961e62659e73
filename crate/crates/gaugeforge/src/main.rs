use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gaugeforge::commands::{self, Context};
use gaugeforge::{Result, RunConfig};

#[derive(Parser)]
#[command(
    name = "gaugeforge",
    version,
    about = "Gauge construction and decay experiments for -Δv = Ωv"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded antisymmetric potential.
    Gen(Common),
    /// Construct the gauge A for the stored potential.
    Gauge(Common),
    /// Solve directly and in conservation form.
    Solve(Common),
    /// Local decay experiment and integrability table.
    Morrey(Common),
    /// Refinement study over several resolutions.
    Study(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override a configuration key, e.g. `--set omega.seed=7`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn run(cli: Cli) -> Result<()> {
    let (common, f): (&Common, fn(&Context) -> Result<()>) = match &cli.command {
        Command::Gen(c) => (c, commands::gen),
        Command::Gauge(c) => (c, commands::gauge),
        Command::Solve(c) => (c, commands::solve),
        Command::Morrey(c) => (c, commands::morrey),
        Command::Study(c) => (c, commands::study),
    };
    let cfg = RunConfig::load(Some(&common.config), &common.set)?;
    f(&Context::new(cfg)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Exit code 2 is reserved for monitor breaches.
            return if e.use_stderr() {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gaugeforge: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
