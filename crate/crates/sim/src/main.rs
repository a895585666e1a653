use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cvqkd_sim::commands::{self, RouteArgs, RouteOutcome};
use cvqkd_sim::{csvio, exit, scenario, CliError};

/// Finite-size CVQKD key rates, pass capacities and key routing.
#[derive(Debug, Parser)]
#[command(name = "cvqkd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for randomly generated fixtures.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep the key rate over the scenario's grid.
    Skr {
        #[command(flatten)]
        common: Common,
    },
    /// Integrate the key rate over a satellite pass.
    Capacity {
        #[command(flatten)]
        common: Common,
        /// Pass CSV (`time_s,elevation_deg`), overriding `capacity.pass`.
        #[arg(long)]
        pass: Option<PathBuf>,
    },
    /// Size an inter-satellite relay chain.
    Chain {
        #[command(flatten)]
        common: Common,
    },
    /// Route a key from a source through a list of targets.
    Route {
        #[command(flatten)]
        common: Common,
        /// Source node id, overriding `route.source`.
        #[arg(long)]
        source: Option<String>,
        /// Comma-separated node ids, visited in order.
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<String>>,
        /// Key size in bits.
        #[arg(long)]
        key_size: Option<f64>,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Skr { common } => {
            let sc = scenario::load(&common.scenario)?;
            emit(&common.out, &csvio::write_skr(&commands::run_skr(&sc)?)?)?;
        }
        Command::Capacity { common, pass } => {
            let sc = scenario::load(&common.scenario)?;
            let report = commands::run_capacity(&sc, pass.as_deref())?;
            emit(&common.out, &csvio::write_capacity(&report)?)?;
        }
        Command::Chain { common } => {
            let sc = scenario::load(&common.scenario)?;
            emit(&common.out, &csvio::write_chain(&commands::run_chain(&sc)?)?)?;
        }
        Command::Route {
            common,
            source,
            targets,
            key_size,
        } => {
            let sc = scenario::load(&common.scenario)?;
            let args = RouteArgs {
                source,
                targets,
                key_size_bits: key_size,
                seed: common.seed,
            };
            let report = commands::run_route(&sc, &args)?;
            emit(&common.out, &csvio::write_route(&report)?)?;
            match &report.outcome {
                RouteOutcome::Routed(p) if p.verdict.feasible => {}
                RouteOutcome::Routed(_) => {
                    eprintln!("route is infeasible");
                    return Ok(exit::INFEASIBLE);
                }
                RouteOutcome::Unreachable { from, to } => {
                    eprintln!("no route from {from} to {to}");
                    return Ok(exit::INFEASIBLE);
                }
                RouteOutcome::UntrustedRelay { from, to, node } => {
                    let e = cvqkd_core::Error::UntrustedRelay {
                        from: from.clone(),
                        to: to.clone(),
                        node: node.clone(),
                    };
                    eprintln!("{e}");
                    return Ok(exit::INFEASIBLE);
                }
            }
        }
    }
    Ok(exit::SUCCESS)
}

fn main() -> ExitCode {
    let code = match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
