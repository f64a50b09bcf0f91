use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use cml_core::analysis::{poa_pos_report, AnalysisOptions, EquilibriumReport};
use cml_core::instance::{GeneratorKind, GeneratorParams};
use cml_core::mechanism::default_degree;
use cml_core::numeric::{decimal_root, rat_pow, root_to_f64, Rat};
use cml_core::{generate_instance, io};

use crate::common::{build_meta, csv_meta_lines, instance_id, parse_mechanism, write_file, InstanceSource};
use crate::{exit_codes, GlobalOpts};

/// Enumerate equilibria, solve the optimal makespan, and report price of
/// anarchy/stability with bound checks.
#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Instance file (cml-1 JSON).
    #[arg(long)]
    pub instance: Option<PathBuf>,
    /// Analyze every *.json instance in this directory.
    #[arg(long)]
    pub instances_dir: Option<PathBuf>,
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
    /// Mechanism: dcoord, ccoord, makespan (baseline), or a descriptor file.
    #[arg(long, default_value = "dcoord")]
    pub mech: String,
    /// Mechanism degree, or "auto" for max(2, ceil(log2 m)).
    #[arg(long, default_value = "auto")]
    pub d: String,
    /// Second mechanism for side-by-side ratio columns.
    #[arg(long)]
    pub compare: Option<String>,
    /// Solve oversized instances with branch-and-bound instead of refusing.
    #[arg(long)]
    pub enable_bnb: bool,
    /// Sweep mode: generate instances over a list of machine counts and
    /// tabulate observed worst ratios per m.
    #[arg(long)]
    pub sweep: bool,
    /// Machine counts for --sweep, e.g. "2,3,4".
    #[arg(long)]
    pub m_list: Option<String>,
    /// Instances per machine count in --sweep.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
}

struct Analyzed {
    id: String,
    n: usize,
    m: usize,
    report: EquilibriumReport,
    compare: Option<EquilibriumReport>,
}

pub fn run(args: &AnalyzeArgs, global: &GlobalOpts) -> Result<ExitCode> {
    let opts = AnalysisOptions {
        cap: global.cap,
        enable_bnb: args.enable_bnb,
        sig_digits: global.precision,
        ..Default::default()
    };
    if args.sweep {
        return sweep(args, global, &opts);
    }

    let mut analyzed = Vec::new();
    if let Some(dir) = &args.instances_dir {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .with_context(|| format!("reading {}", dir.display()))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        if paths.is_empty() {
            bail!("no *.json instances in {}", dir.display());
        }
        for path in paths {
            analyzed.push(analyze_one(args, global, &opts, InstanceSource::File(path))?);
        }
    } else {
        let source = InstanceSource::resolve(
            args.instance.as_deref(),
            args.kind.as_deref(),
            args.n,
            args.m,
            args.lo,
            args.hi,
            global.seed,
        )?;
        analyzed.push(analyze_one(args, global, &opts, source)?);
    }

    // Combined CSV over all analyzed instances (one row per equilibrium),
    // plus per-instance JSON reports.
    let meta = build_meta(global.seed, None, None, None);
    let mut csv = csv_meta_lines(&meta);
    csv.push_str(io::CSV_HEADER);
    csv.push('\n');
    for item in &analyzed {
        for row in io::report_csv_rows(&item.report, &item.id, item.n, item.m, global.precision) {
            csv.push_str(&row);
            csv.push('\n');
        }
        if let Some(compare) = &item.compare {
            for row in io::report_csv_rows(compare, &item.id, item.n, item.m, global.precision) {
                csv.push_str(&row);
                csv.push('\n');
            }
        }
    }
    let csv_path = global.out_dir.join("report.csv");
    write_file(&csv_path, &csv)?;
    println!("wrote {}", csv_path.display());

    if args.compare.is_some() {
        let mut table = csv_meta_lines(&meta);
        let first = &analyzed[0];
        let name_a = first.report.mechanism.name();
        let name_b = first.compare.as_ref().expect("compare requested").mechanism.name();
        table.push_str(&format!(
            "instance_id,n,m,poa_{name_a},pos_{name_a},poa_{name_b},pos_{name_b}\n"
        ));
        for item in &analyzed {
            let b = item.compare.as_ref().expect("compare requested");
            table.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                item.id,
                item.n,
                item.m,
                item.report.poa_decimal.as_deref().unwrap_or(""),
                item.report.pos_decimal.as_deref().unwrap_or(""),
                b.poa_decimal.as_deref().unwrap_or(""),
                b.pos_decimal.as_deref().unwrap_or(""),
            ));
        }
        let path = global.out_dir.join("compare.csv");
        write_file(&path, &table)?;
        println!("wrote {}", path.display());
    }

    let mut any_bound_failure = false;
    for item in &analyzed {
        let failed: Vec<&str> = item
            .report
            .bound_checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        if !failed.is_empty() {
            any_bound_failure = true;
            eprintln!("{}: FAILED bound checks: {}", item.id, failed.join(", "));
        }
    }
    if any_bound_failure {
        return Ok(ExitCode::from(exit_codes::VERIFICATION));
    }
    Ok(ExitCode::SUCCESS)
}

fn analyze_one(
    args: &AnalyzeArgs,
    global: &GlobalOpts,
    opts: &AnalysisOptions,
    source: InstanceSource,
) -> Result<Analyzed> {
    let (inst, digest, generator) = source.load()?;
    let mech = parse_mechanism(&args.mech, &args.d, inst.machines())?;
    let report = poa_pos_report(&mech, &inst, opts)?;
    let compare = args
        .compare
        .as_deref()
        .map(|spec| -> Result<EquilibriumReport> {
            let mech2 = parse_mechanism(spec, &args.d, inst.machines())?;
            Ok(poa_pos_report(&mech2, &inst, opts)?)
        })
        .transpose()?;

    let path_hint = match &source {
        InstanceSource::File(path) => Some(path.as_path()),
        InstanceSource::Generated { .. } => None,
    };
    let id = instance_id(path_hint, &digest);
    let meta = build_meta(global.seed, Some(&mech), Some(&digest), generator);
    let report_path = global.out_dir.join(format!("report-{id}.json"));
    write_file(&report_path, &io::report_to_json(&report, Some(&meta)))?;

    println!(
        "{id}: {} equilibria, opt makespan {}, PoA {}, PoS {}",
        report.equilibria.len(),
        cml_core::numeric::format_rational(&report.opt_makespan),
        report.poa_decimal.as_deref().unwrap_or("-"),
        report.pos_decimal.as_deref().unwrap_or("-"),
    );
    Ok(Analyzed {
        id,
        n: inst.jobs(),
        m: inst.machines(),
        report,
        compare,
    })
}

/// Observed worst PoA ratio per machine count, for qualitative growth
/// inspection (the asymptotic claims themselves are out of reach at desk
/// scale).
fn sweep(args: &AnalyzeArgs, global: &GlobalOpts, opts: &AnalysisOptions) -> Result<ExitCode> {
    let m_list: Vec<usize> = args
        .m_list
        .as_deref()
        .ok_or_else(|| anyhow!("--sweep needs --m-list, e.g. --m-list 2,3,4"))?
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| anyhow!("bad m value {s:?}")))
        .collect::<Result<_>>()?;
    let n = args.n.ok_or_else(|| anyhow!("--sweep needs --n"))?;
    if args.instance.is_some() || args.instances_dir.is_some() {
        bail!("--sweep generates its own instances; drop --instance/--instances-dir");
    }
    let kind = GeneratorKind::parse(args.kind.as_deref().unwrap_or("uniform-integer"))?;
    let params = GeneratorParams {
        lo: args.lo,
        hi: args.hi,
    };

    let meta = build_meta(global.seed, None, None, Some(format!("sweep {}", kind.name())));
    let mut csv = csv_meta_lines(&meta);
    csv.push_str("m,d,n,instances,worst_poa,mean_poa\n");
    println!("m\td\tworst PoA\tmean PoA");
    for &m in &m_list {
        let d = match args.d.as_str() {
            "auto" => default_degree(m),
            other => other
                .parse::<u32>()
                .map_err(|_| anyhow!("--d must be an integer or \"auto\""))?,
        };
        let mech = match args.mech.as_str() {
            "dcoord" | "ccoord" | "makespan" | "makespan-baseline" => {
                parse_mechanism(&args.mech, &d.to_string(), m)?
            }
            other => bail!("--sweep supports built-in mechanisms only, got {other:?}"),
        };
        // Worst ratio tracked exactly as (max completion power / opt^deg).
        let mut worst: Option<Rat> = None;
        let mut roots = Vec::new();
        let mut used = 0usize;
        for i in 0..args.count {
            let seed = global
                .seed
                .wrapping_add(1_000_003u64.wrapping_mul(m as u64))
                .wrapping_add(i as u64);
            let inst = generate_instance(kind, n, m, seed, params)?;
            let report = poa_pos_report(&mech, &inst, opts)?;
            let Some(idx) = report.poa_index else {
                continue;
            };
            used += 1;
            let ratio_power = &report.equilibria[idx].max_ct_power
                / rat_pow(&report.opt_makespan, report.degree);
            roots.push(root_to_f64(&ratio_power, report.degree)?);
            if worst.as_ref().is_none_or(|w| ratio_power > *w) {
                worst = Some(ratio_power);
            }
        }
        let (worst_str, mean_str) = match worst {
            Some(w) => {
                let worst_dec = decimal_root(&w, mech.degree(), global.precision)?;
                let mean = roots.iter().sum::<f64>() / roots.len() as f64;
                (worst_dec, format!("{mean:.6}"))
            }
            None => ("".to_string(), "".to_string()),
        };
        csv.push_str(&format!("{m},{d},{n},{used},{worst_str},{mean_str}\n"));
        println!("{m}\t{d}\t{worst_str}\t{mean_str}");
    }
    let path = global.out_dir.join("sweep.csv");
    write_file(&path, &csv)?;
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}
