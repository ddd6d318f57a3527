//! qidlab: seeded, replayable experiment runner for the identification
//! protocol toolkit. Every command emits a versioned report (JSON or
//! CSV) whose rows each carry an estimate, the bound it is held to, and
//! a pass/fail verdict; the process exits 0 only if every row passes.

mod codefile;
mod jprime;
mod output;
mod overlap;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use output::{Format, Report};

#[derive(Parser)]
#[command(
    name = "qidlab",
    version,
    about = "Experiment suites for a quantum identification protocol"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Base RNG seed; identical seed and parameters give byte-identical
    /// reports.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Overlap and rate of a code-derived basis family, with an
    /// exhaustive cross-check at small sizes.
    Overlap(overlap::OverlapArgs),
    /// Construct the virtual-guess distribution and verify its
    /// guarantees, singly or as a seeded sweep.
    Jprime(jprime::JprimeArgs),
    /// Monte Carlo and exact security checks for the full protocol.
    ProtocolSuite(suite::SuiteArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match &cli.command {
        Command::Overlap(args) => overlap::run(args, cli.seed),
        Command::Jprime(args) => jprime::run(args, cli.seed),
        Command::ProtocolSuite(args) => suite::run(args, cli.seed),
    };
    let report: Report = match report {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = report.write(cli.format, cli.out.as_deref()) {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if report.all_pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("failing checks: {}", report.failing().join(", "));
        ExitCode::from(1)
    }
}
