use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vatom_cli::config::PartialConfig;
use vatom_cli::verify::{self, Suite};
use vatom_cli::{output, resolve, CliError};

#[derive(Parser)]
#[command(
    name = "vatom",
    version,
    about = "V-type atom in free space and in a photonic band gap"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EnvArg {
    Pbg,
    Free,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario and write CSV tables (and optionally SVG charts).
    Simulate {
        /// Configuration file (`key = value` lines); with --scenario its keys
        /// override the built-in values.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Built-in figure scenario.
        #[arg(long, value_parser = vatom_cli::scenarios::SCENARIOS)]
        scenario: Option<String>,
        /// Also write one SVG chart per observable.
        #[arg(long)]
        svg: bool,
    },
    /// Run the oracle suite and print residuals.
    Verify {
        #[arg(long, value_enum)]
        env: Option<EnvArg>,
    },
}

fn simulate(
    config: Option<PathBuf>,
    out: PathBuf,
    scenario: Option<String>,
    svg: bool,
) -> Result<(), CliError> {
    let file = match &config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            Some(
                PartialConfig::parse(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let panels = resolve(scenario.as_deref(), file.as_ref())?;
    let outputs = output::run_scenario(scenario.as_deref(), &panels, &out, svg)?;
    for p in &outputs {
        println!("{}: {} table(s)", p.label, p.results.len());
    }
    println!("manifest: {}", output::manifest_path(&out).display());
    Ok(())
}

fn run_verify(env: Option<EnvArg>) -> Result<bool, CliError> {
    let suite = match env {
        Some(EnvArg::Pbg) => Suite::Pbg,
        Some(EnvArg::Free) => Suite::Free,
        None => Suite::All,
    };
    let lines = verify::run(suite)?;
    for l in &lines {
        println!("{}", l.render());
    }
    Ok(lines.iter().all(|l| l.passed()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate {
            config,
            out,
            scenario,
            svg,
        } => simulate(config, out, scenario, svg),
        Command::Verify { env } => match run_verify(env) {
            Ok(true) => Ok(()),
            Ok(false) => {
                eprintln!("verification failed");
                return ExitCode::from(3);
            }
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
