//! `grassflow`: run scenarios, list the catalog, run check suites.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 unusable input,
//! 3 numerical failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use grassflow::runner;

#[derive(Parser)]
#[command(name = "grassflow", version, about = "Discrete curves, binormal flow, cocycles and holonomy checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write report.json plus artifacts.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Print the catalog of generators, fields, diffeomorphisms and tasks.
    List,
    /// Run a named check suite.
    Check {
        #[arg(long)]
        suite: String,
    },
}

/// Caps the rayon pool at `GRASSFLOW_THREADS` when set.
fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("GRASSFLOW_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| format!("GRASSFLOW_THREADS must be a positive integer, got `{v}`"))?;
    if n == 0 {
        return Err("GRASSFLOW_THREADS must be at least 1".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match cli.command {
        Command::List => {
            print!("{}", runner::list_generators());
            ExitCode::SUCCESS
        }
        Command::Run { scenario, out_dir } => match runner::run_scenario(&scenario, &out_dir) {
            Ok(report) => {
                for c in &report.checks {
                    println!("{c}");
                }
                println!("report: {}", out_dir.join(runner::REPORT_FILE).display());
                if report.pass {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Check { suite } => match runner::run_suite(&suite) {
            Ok(outcomes) => {
                for o in &outcomes {
                    println!("{o}");
                }
                if outcomes.iter().all(|o| o.pass) {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}
