use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use graphon_sis::scenario::{self, Tolerances};
use graphon_sis::Error;

/// SIS epidemics on kernels and graphons, driven by JSON scenario files.
#[derive(Parser)]
#[command(name = "sis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// R0, spectral bound, regime, degrees and the maximal equilibrium.
    Analyze { scenario: PathBuf },
    /// Integrate the SIS equation and write the trajectory as CSV.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Add one column per atom.
        #[arg(long)]
        per_atom: bool,
    },
    /// Maximal equilibrium with its residual.
    Equilibrium { scenario: PathBuf },
    /// Compare the vaccinated model with the base model.
    Vaccinate { scenario: PathBuf },
    /// Evaluate a lockdown graphon against the scenario graphon.
    Lockdown {
        scenario: PathBuf,
        #[arg(long)]
        after: Option<PathBuf>,
    },
    /// Candidate equilibria of the critical chain kernel.
    Counterexample {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        n: usize,
    },
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e,
        }),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let tol = Tolerances::from_env()?;
    let converged = match cli.command {
        Command::Analyze { scenario } => {
            let report = scenario::run_analyze(scenario, &tol)?;
            print_json(&report)?;
            report.converged()
        }
        Command::Simulate {
            scenario,
            out,
            per_atom,
        } => {
            let summary = scenario::run_simulate(scenario, out, per_atom, &tol)?;
            print_json(&summary)?;
            summary.converged()
        }
        Command::Equilibrium { scenario } => {
            let report = scenario::run_equilibrium(scenario, &tol)?;
            print_json(&report)?;
            report.converged
        }
        Command::Vaccinate { scenario } => {
            let report = scenario::run_vaccinate(scenario, &tol)?;
            print_json(&report)?;
            report.equilibrium_converged
        }
        Command::Lockdown { scenario, after } => {
            print_json(&scenario::run_lockdown(scenario, after.as_deref())?)?;
            true
        }
        Command::Counterexample { alpha, n } => {
            print_json(&scenario::run_counterexample(alpha, n)?)?;
            true
        }
    };
    Ok(if converged { 0 } else { 3 })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(scenario::exit_code(&e) as u8)
        }
    }
}
