use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use cml_core::instance::{GeneratorKind, GeneratorParams};
use cml_core::{generate_instance, io};

use crate::common::{build_meta, write_file};
use crate::GlobalOpts;

/// Generate a scheduling instance and write it as cml-1 JSON.
#[derive(Args, Debug)]
pub struct GenArgs {
    /// Generator family: uniform-integer, restricted-related, or two-values.
    #[arg(long)]
    pub kind: String,
    /// Number of jobs.
    #[arg(long)]
    pub n: usize,
    /// Number of machines.
    #[arg(long)]
    pub m: usize,
    /// Smallest generated value.
    #[arg(long, default_value_t = 1)]
    pub lo: u64,
    /// Largest generated value.
    #[arg(long, default_value_t = 100)]
    pub hi: u64,
    /// Output file (default: <out-dir>/instance-<kind>-n<n>-m<m>-seed<seed>.json).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &GenArgs, global: &GlobalOpts) -> Result<()> {
    let kind = GeneratorKind::parse(&args.kind)?;
    let params = GeneratorParams {
        lo: args.lo,
        hi: args.hi,
    };
    let inst = generate_instance(kind, args.n, args.m, global.seed, params)?;
    let digest = io::instance_digest(&inst);
    let generator = format!(
        "{} n={} m={} seed={} lo={} hi={}",
        kind.name(),
        args.n,
        args.m,
        global.seed,
        args.lo,
        args.hi
    );
    let meta = build_meta(global.seed, None, Some(&digest), Some(generator));
    let path = args.out.clone().unwrap_or_else(|| {
        global.out_dir.join(format!(
            "instance-{}-n{}-m{}-seed{}.json",
            kind.name(),
            args.n,
            args.m,
            global.seed
        ))
    });
    write_file(&path, &io::instance_to_json(&inst, Some(&meta)))?;
    println!("wrote {}", path.display());
    println!("digest {digest}");
    Ok(())
}
