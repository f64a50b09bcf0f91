use std::process::ExitCode;

use anyhow::Result;
use clap::Args;
use cml_core::verify::{run_all, run_suite, SuiteConfig, SuiteOutcome, SUITE_NAMES};

use crate::{exit_codes, GlobalOpts};

/// Run the randomized invariant suites and report pass/fail per suite.
#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run only these suites (repeatable). Available suites are listed in
    /// the error message for an unknown name.
    #[arg(long)]
    pub suite: Vec<String>,
    /// Restrict the degree sweep to a single d.
    #[arg(long)]
    pub d: Option<u32>,
    /// Override per-suite case counts.
    #[arg(long)]
    pub cases: Option<usize>,
    /// Negative control: corrupt the coefficient function's zero-invariance
    /// and expect the potential suites to fail.
    #[arg(long)]
    pub corrupt_gamma: bool,
}

pub fn run(args: &VerifyArgs, global: &GlobalOpts) -> Result<ExitCode> {
    let cfg = SuiteConfig {
        seed: global.seed,
        cases: args.cases,
        degrees: args.d.map(|d| vec![d]),
        corrupt_gamma: args.corrupt_gamma,
        ..Default::default()
    };
    let outcomes: Vec<SuiteOutcome> = if args.suite.is_empty() {
        run_all(&cfg)
    } else {
        let mut outcomes = Vec::new();
        for name in &args.suite {
            outcomes.push(run_suite(name, &cfg)?);
        }
        outcomes
    };

    let width = SUITE_NAMES.iter().map(|n| n.len()).max().unwrap_or(0);
    let mut all_pass = true;
    for outcome in &outcomes {
        let status = if outcome.passed() { "PASS" } else { "FAIL" };
        println!(
            "{status}  {:<width$}  {} cases",
            outcome.name,
            outcome.cases,
            width = width
        );
        if !outcome.passed() {
            all_pass = false;
            for failure in &outcome.failures {
                println!("      {failure}");
            }
            if outcome.suppressed_failures > 0 {
                println!("      ... and {} more failures", outcome.suppressed_failures);
            }
        }
    }
    if all_pass {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(exit_codes::VERIFICATION))
    }
}
