//! cml: simulate and analyze coordination mechanisms for unrelated machine
//! scheduling.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 verification or bound
//! failure, 3 resource limit (candidate cap exceeded, move budget
//! exhausted).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod cmd_analyze;
mod cmd_gen;
mod cmd_run;
mod cmd_verify;
mod common;

pub mod exit_codes {
    pub const USAGE: u8 = 1;
    pub const VERIFICATION: u8 = 2;
    pub const RESOURCE: u8 = 3;
}

#[derive(Parser, Debug)]
#[command(
    name = "cml",
    version,
    about = "Coordination mechanisms for unrelated machine scheduling: exact best-response dynamics, equilibrium enumeration, and price-of-anarchy reports"
)]
struct Cli {
    /// Seed for generators, random orders, and verification suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for output files.
    #[arg(long, global = true, default_value = "out", value_name = "DIR")]
    out_dir: PathBuf,
    /// Significant digits for rendered decimals.
    #[arg(long, global = true, default_value_t = 12)]
    precision: usize,
    /// Candidate-assignment cap for exhaustive scans.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    cap: u128,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone)]
pub struct GlobalOpts {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub precision: usize,
    pub cap: u128,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a scheduling instance file.
    Gen(cmd_gen::GenArgs),
    /// Run best-response dynamics, writing a move trace.
    Run(cmd_run::RunArgs),
    /// Enumerate equilibria and report PoA/PoS with bound checks.
    Analyze(cmd_analyze::AnalyzeArgs),
    /// Run the randomized invariant suites.
    Verify(cmd_verify::VerifyArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap's own exit code conventions differ; route help/version to
            // success and everything else to the usage code.
            let _ = err.print();
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(exit_codes::USAGE),
            };
        }
    };
    let global = GlobalOpts {
        seed: cli.seed,
        out_dir: cli.out_dir.clone(),
        precision: cli.precision.max(1),
        cap: cli.cap,
    };
    let result = match &cli.command {
        Command::Gen(args) => cmd_gen::run(args, &global).map(|()| ExitCode::SUCCESS),
        Command::Run(args) => cmd_run::run(args, &global),
        Command::Analyze(args) => cmd_analyze::run(args, &global),
        Command::Verify(args) => cmd_verify::run(args, &global),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

fn classify(err: &anyhow::Error) -> u8 {
    if let Some(core) = err.downcast_ref::<cml_core::Error>() {
        if matches!(core, cml_core::Error::CapExceeded { .. }) {
            return exit_codes::RESOURCE;
        }
    }
    exit_codes::USAGE
}
