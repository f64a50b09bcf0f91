use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Args;
use cml_core::dynamics::{default_max_iter, run_dynamics, MoveOrder, StartKind};
use cml_core::instance::LoadVector;
use cml_core::numeric::{decimal_root, format_rational, rat_pow};
use cml_core::{io, Mechanism};

use crate::common::{build_meta, parse_mechanism, write_file, InstanceSource};
use crate::{exit_codes, GlobalOpts};

/// Run best-response dynamics and write the move trace.
#[derive(Args, Debug)]
pub struct RunArgs {
    /// Instance file (cml-1 JSON). Mutually exclusive with --kind.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Generate the instance instead: generator family name.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub lo: u64,
    #[arg(long, default_value_t = 100)]
    pub hi: u64,
    /// Mechanism: dcoord, ccoord, or a descriptor file. (The makespan
    /// baseline is analyze-only: it induces no potential.)
    #[arg(long, default_value = "dcoord")]
    pub mech: String,
    /// Mechanism degree, or "auto" for max(2, ceil(log2 m)).
    #[arg(long, default_value = "auto")]
    pub d: String,
    /// Player activation order: round-robin, random, or max-improvement.
    #[arg(long, default_value = "round-robin")]
    pub order: String,
    /// Starting assignment: min-weight, first-available, or random.
    #[arg(long, default_value = "min-weight")]
    pub start: String,
    /// Move budget (default 10*n*m^2).
    #[arg(long)]
    pub max_iter: Option<usize>,
}

pub fn run(args: &RunArgs, global: &GlobalOpts) -> Result<ExitCode> {
    let source = InstanceSource::resolve(
        args.instance.as_deref(),
        args.kind.as_deref(),
        args.n,
        args.m,
        args.lo,
        args.hi,
        global.seed,
    )?;
    let (inst, digest, generator) = source.load()?;
    let mech = parse_mechanism(&args.mech, &args.d, inst.machines())?;
    let Mechanism::Coordination(cf) = &mech else {
        bail!("the makespan baseline induces no potential; use it with `analyze` only");
    };

    let order = match args.order.as_str() {
        "round-robin" => MoveOrder::RoundRobin,
        "random" => MoveOrder::Random(global.seed),
        "max-improvement" => MoveOrder::MaxImprovement,
        other => bail!("unknown --order {other:?} (round-robin, random, max-improvement)"),
    };
    let start_kind = match args.start.as_str() {
        "min-weight" => StartKind::MinWeight,
        "first-available" => StartKind::FirstAvailable,
        "random" => StartKind::Random(global.seed),
        other => bail!("unknown --start {other:?} (min-weight, first-available, random)"),
    };
    let max_iter = args.max_iter.unwrap_or_else(|| default_max_iter(&inst));

    let start = cml_core::dynamics::starting_assignment(&inst, start_kind);
    let (trace, final_asg) = run_dynamics(cf, &inst, start, order, max_iter);

    let meta = build_meta(global.seed, Some(&mech), Some(&digest), generator);
    let trace_path = global.out_dir.join("trace.jsonl");
    write_file(&trace_path, &io::trace_to_jsonl(&trace, &final_asg, &meta))?;
    let asg_path = global.out_dir.join("final_assignment.json");
    write_file(&asg_path, &io::assignment_to_json(&final_asg, Some(&meta)))?;

    let phi = cml_core::dynamics::potential(cf, &inst, &final_asg).0;
    let lv = LoadVector::from_assignment(&inst, &final_asg);
    let max_ct_power = (0..inst.jobs())
        .map(|u| {
            mech.completion_time(&inst, &final_asg, u)
                .expect("final assignment is valid")
                .power()
                .clone()
        })
        .max()
        .expect("n >= 1");
    let sig = global.precision;

    println!("instance: {digest}");
    println!("mechanism: {} (d = {})", mech.name(), cf.degree());
    println!(
        "moves: {}{}",
        trace.iterations,
        if trace.converged {
            " (converged)"
        } else {
            " (budget exhausted, not converged)"
        }
    );
    println!("phi: {}", format_rational(&phi));
    println!(
        "makespan: {} ({})",
        format_rational(&lv.makespan()),
        decimal_root(&rat_pow(&lv.makespan(), 1), 1, sig)?
    );
    println!(
        "max completion time: {}",
        decimal_root(&max_ct_power, cf.degree(), sig)?
    );
    println!("trace: {}", trace_path.display());
    println!("final assignment: {}", asg_path.display());

    if trace.converged {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(exit_codes::RESOURCE))
    }
}
