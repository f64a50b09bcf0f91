//! Shared plumbing for the subcommands: instance sources, mechanism specs,
//! provenance metadata, and file writing.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use cml_core::instance::{GeneratorKind, GeneratorParams};
use cml_core::io::{self, OutputMeta};
use cml_core::mechanism::default_degree;
use cml_core::{generate_instance, CoefficientFunction, Instance, Mechanism};

pub fn tool_version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Where an instance comes from: exactly one of a file or a generator spec.
#[derive(Debug, Clone)]
pub enum InstanceSource {
    File(PathBuf),
    Generated {
        kind: GeneratorKind,
        n: usize,
        m: usize,
        seed: u64,
        params: GeneratorParams,
    },
}

impl InstanceSource {
    pub fn resolve(
        instance: Option<&Path>,
        kind: Option<&str>,
        n: Option<usize>,
        m: Option<usize>,
        lo: u64,
        hi: u64,
        seed: u64,
    ) -> Result<Self> {
        match (instance, kind) {
            (Some(path), None) => Ok(InstanceSource::File(path.to_path_buf())),
            (None, Some(kind)) => {
                let kind = GeneratorKind::parse(kind)?;
                let n = n.ok_or_else(|| anyhow!("generator source needs --n"))?;
                let m = m.ok_or_else(|| anyhow!("generator source needs --m"))?;
                Ok(InstanceSource::Generated {
                    kind,
                    n,
                    m,
                    seed,
                    params: GeneratorParams { lo, hi },
                })
            }
            (Some(_), Some(_)) => bail!("--instance and --kind are mutually exclusive"),
            (None, None) => bail!("need an instance source: --instance FILE or --kind GENERATOR"),
        }
    }

    /// Loads or generates the instance; returns it with its digest and the
    /// generator spec string (when generated).
    pub fn load(&self) -> Result<(Instance, String, Option<String>)> {
        match self {
            InstanceSource::File(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                let inst = io::instance_from_json(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
                let digest = io::instance_digest(&inst);
                Ok((inst, digest, None))
            }
            InstanceSource::Generated {
                kind,
                n,
                m,
                seed,
                params,
            } => {
                let inst = generate_instance(*kind, *n, *m, *seed, *params)?;
                let digest = io::instance_digest(&inst);
                Ok((inst, digest, Some(self.spec_string())))
            }
        }
    }

    pub fn spec_string(&self) -> String {
        match self {
            InstanceSource::File(path) => format!("file:{}", path.display()),
            InstanceSource::Generated {
                kind,
                n,
                m,
                seed,
                params,
            } => format!(
                "{} n={} m={} seed={} lo={} hi={}",
                kind.name(),
                n,
                m,
                seed,
                params.lo,
                params.hi
            ),
        }
    }
}

/// Resolves `--d`: an explicit degree or `auto` = max(2, ceil(log2 m)).
pub fn resolve_degree(d: &str, machines: usize) -> Result<u32> {
    if d == "auto" {
        Ok(default_degree(machines))
    } else {
        d.parse::<u32>()
            .map_err(|_| anyhow!("--d must be an integer >= 2 or \"auto\", got {d:?}"))
    }
}

/// Parses `--mech`: `dcoord` or `ccoord` (degree from `--d`), `makespan`
/// for the comparison baseline, or a path to a mechanism descriptor file.
pub fn parse_mechanism(spec: &str, d: &str, machines: usize) -> Result<Mechanism> {
    match spec {
        "dcoord" => Ok(Mechanism::Coordination(CoefficientFunction::dcoord(
            resolve_degree(d, machines)?,
        )?)),
        "ccoord" => Ok(Mechanism::Coordination(CoefficientFunction::ccoord(
            resolve_degree(d, machines)?,
        )?)),
        "makespan" | "makespan-baseline" => Ok(Mechanism::MakespanBaseline),
        path => {
            let text = fs::read_to_string(path).with_context(|| {
                format!("--mech {path:?} is not a known name (dcoord, ccoord, makespan) and could not be read as a descriptor file")
            })?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .with_context(|| format!("parsing mechanism descriptor {path}"))?;
            Ok(io::mechanism_from_descriptor(&value)?)
        }
    }
}

pub fn build_meta(
    seed: u64,
    mech: Option<&Mechanism>,
    instance_digest: Option<&str>,
    generator: Option<String>,
) -> OutputMeta {
    OutputMeta {
        version: Some(tool_version()),
        seed: Some(seed),
        mechanism: mech.map(io::mechanism_to_descriptor),
        instance_digest: instance_digest.map(str::to_string),
        generator,
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Comment header for CSV outputs (plotting tools skip `#` lines).
pub fn csv_meta_lines(meta: &OutputMeta) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# tool: cml {}\n",
        meta.version.as_deref().unwrap_or("unknown")
    ));
    if let Some(seed) = meta.seed {
        out.push_str(&format!("# seed: {seed}\n"));
    }
    if let Some(mech) = &meta.mechanism {
        out.push_str(&format!("# mechanism: {mech}\n"));
    }
    if let Some(digest) = &meta.instance_digest {
        out.push_str(&format!("# instance: {digest}\n"));
    }
    if let Some(generator) = &meta.generator {
        out.push_str(&format!("# generator: {generator}\n"));
    }
    out
}

/// Short instance identifier for CSV rows: the file stem for file sources,
/// the digest prefix otherwise.
pub fn instance_id(source: Option<&Path>, digest: &str) -> String {
    match source {
        Some(path) => path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| digest[..12].to_string()),
        None => digest[..12].to_string(),
    }
}
