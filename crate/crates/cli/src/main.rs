mod commands;
mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::Status;
use config::{ConfigError, Overrides, RunConfig};
use verify::Sabotage;

/// Effective boundary fluxes, test functions and monotone schemes for
/// Hamilton-Jacobi equations on the half-line.
#[derive(Debug, Parser)]
#[command(name = "hjhalf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomized suites.
    #[arg(long)]
    seed: Option<u64>,
    /// Hamiltonian preset or CSV file.
    #[arg(long)]
    hamiltonian: Option<String>,
    /// Boundary flux preset or CSV file.
    #[arg(long)]
    flux: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Set limiter and effective flux of a (hamiltonian, flux) pair.
    Limiter(Common),
    /// Build and check the test function of an admissible flux.
    Testfn(Common),
    /// Run the monotone scheme.
    Solve(Common),
    /// Refinement study of the flux against its effective flux.
    Converge(Common),
    /// Run every property suite and write verify.json.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Inject a fault to exercise the failure path.
        #[arg(long = "break", value_enum)]
        sabotage: Option<Sabotage>,
    },
}

fn load(common: &Common) -> Result<RunConfig, ConfigError> {
    let overrides = Overrides {
        hamiltonian: common.hamiltonian.clone(),
        flux: common.flux.clone(),
        out_dir: common.out.clone(),
        seed: common.seed,
    };
    match &common.config {
        Some(path) => config::parse_config(path, &overrides),
        None => config::default_config(&overrides),
    }
}

fn run(cli: Cli) -> Result<Status> {
    let (common, sabotage) = match &cli.command {
        Command::Limiter(c) | Command::Testfn(c) | Command::Solve(c) | Command::Converge(c) => (c, None),
        Command::Verify { common, sabotage } => (common, *sabotage),
    };
    let cfg = load(common)?;
    commands::ensure_dir(&cfg.out_dir)?;
    let out = cfg.out_dir.as_path();
    match cli.command {
        Command::Limiter(_) => commands::limiter(&cfg, out),
        Command::Testfn(_) => commands::testfn(&cfg, out),
        Command::Solve(_) => commands::solve_cmd(&cfg, out),
        Command::Converge(_) => commands::converge(&cfg, out),
        Command::Verify { .. } => {
            let report = verify::run_verify(&cfg, sabotage);
            output::write(out, "verify.json", &(serde_json::to_string_pretty(&report)? + "\n"))?;
            for p in &report.properties {
                println!("{} {}: {}", if p.passed { "PASS" } else { "FAIL" }, p.id, p.detail);
            }
            Ok(if report.passed { Status::Passed } else { Status::Failed })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Status::Passed) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) if e.is::<ConfigError>() => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
