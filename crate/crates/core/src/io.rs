//! Versioned JSON file formats and digests.
//!
//! Every file carries `"format": "cml-1"`. Instances canonicalize weights on
//! write: integers as JSON numbers, other rationals as `"p/q"` strings,
//! unavailable entries as null. Parsing accepts integers, decimal strings,
//! fraction strings, and null; if an instance file carries a `min_weight`
//! array it is checked against the recomputed values and any mismatch is a
//! hard error. Serialization is deterministic (struct field order, sorted
//! map keys), so identical inputs always produce identical bytes.

use num::{BigInt, One, ToPrimitive};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::analysis::EquilibriumReport;
use crate::dynamics::{DynamicsTrace, MoveRecord};
use crate::error::Error;
use crate::instance::{Assignment, Instance, Weight};
use crate::mechanism::{CoefficientFunction, Mechanism};
use crate::numeric::{format_rational, parse_rational, Rat};

pub const FORMAT: &str = "cml-1";

/// Provenance block embedded in output files: tool version, seed, mechanism
/// descriptor, instance digest, generator spec. Contains nothing volatile,
/// so reruns with identical inputs are byte-identical.
#[derive(Debug, Clone, Default)]
pub struct OutputMeta {
    pub version: Option<String>,
    pub seed: Option<u64>,
    pub mechanism: Option<Value>,
    pub instance_digest: Option<String>,
    pub generator: Option<String>,
}

impl OutputMeta {
    pub fn to_value(&self) -> Value {
        let mut map = Map::new();
        map.insert("tool".into(), Value::String("cml".into()));
        if let Some(v) = &self.version {
            map.insert("version".into(), Value::String(v.clone()));
        }
        if let Some(s) = self.seed {
            map.insert("seed".into(), Value::Number(s.into()));
        }
        if let Some(m) = &self.mechanism {
            map.insert("mechanism".into(), m.clone());
        }
        if let Some(d) = &self.instance_digest {
            map.insert("instance_digest".into(), Value::String(d.clone()));
        }
        if let Some(g) = &self.generator {
            map.insert("generator".into(), Value::String(g.clone()));
        }
        Value::Object(map)
    }
}

fn weight_to_value(w: &Weight) -> Value {
    match w {
        Weight::Unavailable => Value::Null,
        Weight::Finite(r) => {
            if r.denom().is_one() {
                if let Some(v) = r.numer().to_u64() {
                    return Value::Number(v.into());
                }
            }
            Value::String(format_rational(r))
        }
    }
}

fn weight_from_value(v: &Value, context: &str) -> Result<Weight, Error> {
    match v {
        Value::Null => Ok(Weight::Unavailable),
        Value::Number(n) => {
            let i = n
                .as_u64()
                .ok_or_else(|| {
                    Error::Parse(format!(
                        "{context}: numeric weights must be positive integers (write decimals as strings), got {n}"
                    ))
                })?;
            Ok(Weight::Finite(Rat::from_integer(BigInt::from(i))))
        }
        Value::String(s) => Ok(Weight::Finite(parse_rational(s)?)),
        other => Err(Error::Parse(format!(
            "{context}: expected integer, string, or null, got {other}"
        ))),
    }
}

fn check_format(root: &Map<String, Value>) -> Result<(), Error> {
    match root.get("format") {
        Some(Value::String(s)) if s == FORMAT => Ok(()),
        Some(other) => Err(Error::Parse(format!(
            "unsupported format {other}, expected \"{FORMAT}\""
        ))),
        None => Err(Error::Parse(format!(
            "missing \"format\" field (expected \"{FORMAT}\")"
        ))),
    }
}

fn as_object<'v>(value: &'v Value, what: &str) -> Result<&'v Map<String, Value>, Error> {
    value
        .as_object()
        .ok_or_else(|| Error::Parse(format!("{what} must be a JSON object")))
}

fn get_usize(root: &Map<String, Value>, field: &str) -> Result<usize, Error> {
    root.get(field)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| Error::Parse(format!("missing or invalid \"{field}\"")))
}

/// Canonical instance JSON. The digest covers exactly these bytes minus the
/// optional meta block.
fn instance_body(inst: &Instance) -> Value {
    json!({
        "format": FORMAT,
        "n": inst.jobs(),
        "m": inst.machines(),
        "weights": inst
            .rows()
            .iter()
            .map(|row| Value::Array(row.iter().map(weight_to_value).collect()))
            .collect::<Vec<_>>(),
    })
}

pub fn instance_to_json(inst: &Instance, meta: Option<&OutputMeta>) -> String {
    let mut value = instance_body(inst);
    if let Some(meta) = meta {
        value
            .as_object_mut()
            .expect("body is an object")
            .insert("meta".into(), meta.to_value());
    }
    let mut out = serde_json::to_string_pretty(&value).expect("serializable");
    out.push('\n');
    out
}

/// SHA-256 of the canonical instance body (format, n, m, weights), hex.
/// Stable under meta blocks and cosmetic reformatting of the source file.
pub fn instance_digest(inst: &Instance) -> String {
    let canonical = serde_json::to_string(&instance_body(inst)).expect("serializable");
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn instance_from_json(text: &str) -> Result<Instance, Error> {
    let value: Value = serde_json::from_str(text)?;
    let root = as_object(&value, "instance file")?;
    check_format(root)?;
    let n = get_usize(root, "n")?;
    let m = get_usize(root, "m")?;
    let rows = root
        .get("weights")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"weights\" matrix".into()))?;
    if rows.len() != n {
        return Err(Error::Parse(format!(
            "\"n\" is {n} but weights has {} rows",
            rows.len()
        )));
    }
    let mut weights = Vec::with_capacity(n);
    for (u, row) in rows.iter().enumerate() {
        let entries = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("weights row {u} is not an array")))?;
        if entries.len() != m {
            return Err(Error::Parse(format!(
                "weights row {u} has {} entries, expected {m}",
                entries.len()
            )));
        }
        let row = entries
            .iter()
            .map(|v| weight_from_value(v, &format!("weights[{u}]")))
            .collect::<Result<Vec<_>, _>>()?;
        weights.push(row);
    }
    let inst = Instance::new(weights)?;
    // A provided min_weight array is advisory input: recompute and reject on
    // any mismatch rather than trusting it.
    if let Some(given) = root.get("min_weight") {
        let given = given
            .as_array()
            .ok_or_else(|| Error::Parse("\"min_weight\" must be an array".into()))?;
        if given.len() != n {
            return Err(Error::Parse(format!(
                "\"min_weight\" has {} entries, expected {n}",
                given.len()
            )));
        }
        for (u, v) in given.iter().enumerate() {
            let claimed = match weight_from_value(v, &format!("min_weight[{u}]"))? {
                Weight::Finite(r) => r,
                Weight::Unavailable => {
                    return Err(Error::Parse(format!("min_weight[{u}] must be finite")))
                }
            };
            if &claimed != inst.min_weight(u) {
                return Err(Error::Parse(format!(
                    "min_weight[{u}] = {} does not match the recomputed minimum {}",
                    format_rational(&claimed),
                    format_rational(inst.min_weight(u)),
                )));
            }
        }
    }
    Ok(inst)
}

pub fn assignment_to_json(asg: &Assignment, meta: Option<&OutputMeta>) -> String {
    let mut value = json!({
        "format": FORMAT,
        "machine_of": asg.machine_of(),
    });
    if let Some(meta) = meta {
        value
            .as_object_mut()
            .expect("object")
            .insert("meta".into(), meta.to_value());
    }
    let mut out = serde_json::to_string_pretty(&value).expect("serializable");
    out.push('\n');
    out
}

pub fn assignment_from_json(text: &str, inst: &Instance) -> Result<Assignment, Error> {
    let value: Value = serde_json::from_str(text)?;
    let root = as_object(&value, "assignment file")?;
    check_format(root)?;
    let machine_of = root
        .get("machine_of")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"machine_of\" array".into()))?
        .iter()
        .map(|v| {
            v.as_u64()
                .map(|x| x as usize)
                .ok_or_else(|| Error::Parse("machine_of entries must be non-negative integers".into()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Assignment::new(machine_of, inst)
}

/// Mechanism descriptor:
/// `{"kind": "dcoord"|"ccoord", "d": int}`,
/// `{"kind": "custom", "d": int, "table": [{"partition": [ints], "gamma": "p/q"}, ...]}`,
/// or `{"kind": "makespan-baseline"}` for the comparison baseline.
pub fn mechanism_to_descriptor(mech: &Mechanism) -> Value {
    match mech {
        Mechanism::MakespanBaseline => json!({ "kind": "makespan-baseline" }),
        Mechanism::Coordination(cf) => {
            if cf.is_dcoord() || cf.is_ccoord() {
                json!({ "kind": cf.kind_name(), "d": cf.degree() })
            } else {
                json!({
                    "kind": "custom",
                    "d": cf.degree(),
                    "table": cf
                        .table()
                        .iter()
                        .map(|(p, gamma)| json!({
                            "partition": p,
                            "gamma": format_rational(gamma),
                        }))
                        .collect::<Vec<_>>(),
                })
            }
        }
    }
}

pub fn mechanism_from_descriptor(value: &Value) -> Result<Mechanism, Error> {
    let root = as_object(value, "mechanism descriptor")?;
    let kind = root
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::InvalidMechanism("missing \"kind\"".into()))?;
    if kind == "makespan-baseline" {
        return Ok(Mechanism::MakespanBaseline);
    }
    let d = root
        .get("d")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::InvalidMechanism("missing or invalid \"d\"".into()))?
        as u32;
    let cf = match kind {
        "dcoord" => CoefficientFunction::dcoord(d)?,
        "ccoord" => CoefficientFunction::ccoord(d)?,
        "custom" => {
            let entries = root
                .get("table")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidMechanism("custom kind needs a \"table\"".into()))?;
            let mut table = Vec::with_capacity(entries.len());
            for entry in entries {
                let entry = as_object(entry, "table entry")?;
                let partition = entry
                    .get("partition")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::InvalidMechanism("table entry needs \"partition\"".into()))?
                    .iter()
                    .map(|v| {
                        v.as_u64().map(|x| x as u32).ok_or_else(|| {
                            Error::InvalidMechanism("partition parts must be integers".into())
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let gamma = match entry.get("gamma") {
                    Some(Value::String(s)) => parse_rational(s)?,
                    Some(Value::Number(n)) => {
                        let i = n.as_u64().ok_or_else(|| {
                            Error::InvalidMechanism(format!(
                                "gamma {n} must be a non-negative integer or a rational string"
                            ))
                        })?;
                        Rat::from_integer(BigInt::from(i))
                    }
                    _ => {
                        return Err(Error::InvalidMechanism(
                            "table entry needs a \"gamma\" value".into(),
                        ))
                    }
                };
                table.push((partition, gamma));
            }
            CoefficientFunction::custom(d, table)?
        }
        other => {
            return Err(Error::InvalidMechanism(format!(
                "unknown mechanism kind {other:?}"
            )))
        }
    };
    Ok(Mechanism::Coordination(cf))
}

/// Trace file layout (JSON lines): a meta header, one record per move with
/// exact rationals as strings, and a closing summary.
pub fn trace_header_line(meta: &OutputMeta) -> String {
    serde_json::to_string(&json!({ "format": FORMAT, "meta": meta.to_value() }))
        .expect("serializable")
}

pub fn trace_move_line(record: &MoveRecord) -> String {
    serde_json::to_string(&json!({
        "player": record.player,
        "from": record.from,
        "to": record.to,
        "phi_before": format_rational(&record.phi_before),
        "phi_after": format_rational(&record.phi_after),
    }))
    .expect("serializable")
}

pub fn trace_summary_line(trace: &DynamicsTrace, final_asg: &Assignment) -> String {
    serde_json::to_string(&json!({
        "converged": trace.converged,
        "moves": trace.iterations,
        "final_assignment": final_asg.machine_of(),
    }))
    .expect("serializable")
}

pub fn trace_to_jsonl(
    trace: &DynamicsTrace,
    final_asg: &Assignment,
    meta: &OutputMeta,
) -> String {
    let mut out = String::new();
    out.push_str(&trace_header_line(meta));
    out.push('\n');
    for record in &trace.moves {
        out.push_str(&trace_move_line(record));
        out.push('\n');
    }
    out.push_str(&trace_summary_line(trace, final_asg));
    out.push('\n');
    out
}

/// Full equilibrium report as JSON: exact rationals as `"p/q"` strings,
/// reals as decimal strings.
pub fn report_to_json(report: &EquilibriumReport, meta: Option<&OutputMeta>) -> String {
    let equilibria: Vec<Value> = report
        .equilibria
        .iter()
        .map(|eq| {
            json!({
                "machine_of": eq.assignment.machine_of(),
                "phi": eq.phi.as_ref().map(format_rational),
                "loads": eq.loads.iter().map(format_rational).collect::<Vec<_>>(),
                "makespan": format_rational(&eq.makespan),
                "max_completion_power": format_rational(&eq.max_ct_power),
                "max_completion_time": eq.max_ct_decimal,
                "ratio": eq.ratio_decimal,
            })
        })
        .collect();
    let bound_checks: Vec<Value> = report
        .bound_checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "theoretical": c.theoretical,
                "observed": c.observed,
                "pass": c.pass,
            })
        })
        .collect();
    let mut value = json!({
        "format": FORMAT,
        "mechanism": mechanism_to_descriptor(&report.mechanism),
        "degree": report.degree,
        "opt_makespan": format_rational(&report.opt_makespan),
        "opt_assignment": report.opt_assignment.machine_of(),
        "equilibria": equilibria,
        "poa_ratio": report.poa_decimal,
        "pos_ratio": report.pos_decimal,
        "poa_index": report.poa_index,
        "pos_index": report.pos_index,
        "potential_min_index": report.potential_min_index,
        "bound_checks": bound_checks,
    });
    if let Some(meta) = meta {
        value
            .as_object_mut()
            .expect("object")
            .insert("meta".into(), meta.to_value());
    }
    let mut out = serde_json::to_string_pretty(&value).expect("serializable");
    out.push('\n');
    out
}

/// Plot-ready CSV: one row per equilibrium, decimals at the report's
/// precision, exactly these columns.
pub const CSV_HEADER: &str = "instance_id,mech,d,n,m,phi,max_ct,makespan,opt,ratio";

pub fn report_csv_rows(
    report: &EquilibriumReport,
    instance_id: &str,
    n: usize,
    m: usize,
    sig: usize,
) -> Vec<String> {
    let dec = |x: &Rat| crate::numeric::decimal(x, sig).expect("non-negative");
    report
        .equilibria
        .iter()
        .map(|eq| {
            format!(
                "{},{},{},{},{},{},{},{},{},{}",
                instance_id,
                report.mechanism.name(),
                report.degree,
                n,
                m,
                eq.phi.as_ref().map(&dec).unwrap_or_default(),
                eq.max_ct_decimal,
                dec(&eq.makespan),
                dec(&report.opt_makespan),
                eq.ratio_decimal,
            )
        })
        .collect()
}
