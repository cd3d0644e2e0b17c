//! JSON and CSV formats for measures, inner functions, reports and constructions.
//!
//! Reals are written as decimal strings with 17 significant digits and read back from
//! strings or JSON numbers. Object keys are emitted in sorted order.

use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::classifier::{
    ClassificationReport, DensityRecord, DensityVerdict, LevelCell, LevelSetAnalysis, LimitRecord,
};
use crate::companion::Companion;
use crate::error::{Error, Result};
use crate::inner::{InnerFunction, ZeroSequence};
use crate::measures::{
    AtomicMeasure, CantorMeasure, CdfMeasure, DeltaSchedule, SingularMeasure, DEFAULT_DEPTH_CAP,
};

pub fn real_string(x: f64) -> String {
    format!("{x:.16e}")
}

fn num(x: f64) -> Value {
    Value::String(real_string(x))
}

fn cnum(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn invalid(what: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{what}: {msg}"))
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn object<'a>(v: &'a Value, what: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let m = v.as_object().ok_or_else(|| invalid(what, "expected an object"))?;
    if let Some(k) = m.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(invalid(what, format!("unknown field '{k}'")));
    }
    Ok(m)
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value> {
    m.get(key).ok_or_else(|| invalid(what, format!("missing field '{key}'")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| invalid(what, "expected an array"))
}

fn real(v: &Value, what: &str) -> Result<f64> {
    let x = match v {
        Value::String(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| invalid(what, format!("'{s}' is not a decimal number")))?,
        Value::Number(n) => n.as_f64().ok_or_else(|| invalid(what, "number out of range"))?,
        _ => return Err(invalid(what, "expected a decimal string or number")),
    };
    if !x.is_finite() {
        return Err(invalid(what, "value must be finite"));
    }
    Ok(x)
}

fn complex(v: &Value, what: &str) -> Result<Complex64> {
    let m = object(v, what, &["re", "im"])?;
    Ok(Complex64::new(
        real(field(m, "re", what)?, what)?,
        real(field(m, "im", what)?, what)?,
    ))
}

fn reals(v: &Value, what: &str) -> Result<Vec<f64>> {
    array(v, what)?.iter().map(|x| real(x, what)).collect()
}

fn pair(v: &Value, what: &str) -> Result<(f64, f64)> {
    match reals(v, what)?[..] {
        [a, b] => Ok((a, b)),
        _ => Err(invalid(what, "expected a pair")),
    }
}

// ---------------------------------------------------------------- measures

pub fn measure_from_json(v: &Value) -> Result<SingularMeasure> {
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| invalid("measure", "missing string field 'kind'"))?;
    match kind {
        "atoms" => {
            let m = object(v, "atoms measure", &["kind", "atoms", "tail_mass", "accumulation"])?;
            let atoms = array(field(m, "atoms", "atoms measure")?, "atoms")?
                .iter()
                .map(|a| {
                    let o = object(a, "atom", &["theta", "mass"])?;
                    Ok((real(field(o, "theta", "atom")?, "theta")?, real(field(o, "mass", "atom")?, "mass")?))
                })
                .collect::<Result<Vec<_>>>()?;
            let tail = m.get("tail_mass").map(|t| real(t, "tail_mass")).transpose()?.unwrap_or(0.0);
            let mut a = AtomicMeasure::new(atoms, tail)?;
            if let Some(acc) = m.get("accumulation") {
                a = a.with_accumulation(reals(acc, "accumulation")?);
            }
            Ok(a.into())
        }
        "cantor" => {
            let m = object(v, "cantor measure", &["kind", "delta", "depth_cap"])?;
            let schedule = match field(m, "delta", "cantor measure")? {
                Value::String(s) if s == "middle-thirds" => DeltaSchedule::MiddleThirds,
                d @ Value::Object(_) => {
                    let o = object(d, "delta", &["ratio"])?;
                    DeltaSchedule::Ratio(real(field(o, "ratio", "delta")?, "ratio")?)
                }
                d @ Value::Array(_) => DeltaSchedule::Explicit(reals(d, "delta")?),
                _ => return Err(invalid("delta", "expected \"middle-thirds\", {\"ratio\": r} or a list")),
            };
            let cap = match m.get("depth_cap") {
                None => DEFAULT_DEPTH_CAP,
                Some(c) => c
                    .as_u64()
                    .ok_or_else(|| invalid("depth_cap", "expected a non-negative integer"))?
                    as usize,
            };
            Ok(CantorMeasure::with_depth_cap(schedule, cap)?.into())
        }
        "cdf" => {
            let m = object(v, "cdf measure", &["kind", "samples"])?;
            let samples = array(field(m, "samples", "cdf measure")?, "samples")?
                .iter()
                .map(|s| pair(s, "cdf sample"))
                .collect::<Result<Vec<_>>>()?;
            Ok(CdfMeasure::new(samples)?.into())
        }
        other => Err(invalid("measure", format!("unknown kind '{other}'"))),
    }
}

pub fn measure_to_json(sigma: &SingularMeasure) -> Value {
    match sigma {
        SingularMeasure::Atomic(a) => {
            let mut v = json!({
                "kind": "atoms",
                "atoms": a.atoms().iter().map(|&(t, m)| json!({"theta": num(t), "mass": num(m)})).collect::<Vec<_>>(),
                "tail_mass": num(a.tail_mass()),
            });
            if !a.accumulation().is_empty() {
                v["accumulation"] = a.accumulation().iter().map(|&t| num(t)).collect();
            }
            v
        }
        SingularMeasure::Cantor(c) => {
            let delta = match c.schedule() {
                DeltaSchedule::MiddleThirds => json!("middle-thirds"),
                DeltaSchedule::Ratio(r) => json!({ "ratio": num(*r) }),
                DeltaSchedule::Explicit(d) => d.iter().map(|&x| num(x)).collect(),
            };
            let mut v = json!({ "kind": "cantor", "delta": delta });
            if c.depth_cap() != DEFAULT_DEPTH_CAP {
                v["depth_cap"] = json!(c.depth_cap());
            }
            v
        }
        SingularMeasure::Cdf(c) => json!({
            "kind": "cdf",
            "samples": c.samples().iter().map(|&(t, f)| json!([num(t), num(f)])).collect::<Vec<_>>(),
        }),
    }
}

// ------------------------------------------------------------------- zeros

pub fn zeros_to_csv(zeros: &[Complex64]) -> String {
    let mut out = String::from("re,im\n");
    for z in zeros {
        out.push_str(&real_string(z.re));
        out.push(',');
        out.push_str(&real_string(z.im));
        out.push('\n');
    }
    out
}

/// Parses `re,im` rows; the header line is required.
pub fn zeros_from_csv(text: &str) -> Result<Vec<Complex64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let parse_err = |line: u64, column: usize, message: String| Error::Parse {
        line: line as usize,
        column,
        message,
    };
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(1, 1, e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "re" || &headers[1] != "im" {
        return Err(parse_err(1, 1, "expected header 're,im'".into()));
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, 1, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        let mut column = 1;
        let mut parts = [0.0; 2];
        for (i, f) in rec.iter().enumerate() {
            parts[i] = f
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_err(line, column, format!("'{f}' is not a decimal number")))?;
            column += f.len() + 1;
        }
        out.push(Complex64::new(parts[0], parts[1]));
    }
    Ok(out)
}

// ---------------------------------------------------------- inner functions

const GEOMETRIC_LABEL: &str = "radial 1-2^-n";
const SPARSE_LABEL: &str = "radial 1-2^-n^2";

/// Reads an inner-function document; a `zeros_csv` value without a newline is a path relative
/// to `base`.
pub fn inner_from_json(v: &Value, base: &Path) -> Result<InnerFunction> {
    let m = object(
        v,
        "inner function",
        &["lambda", "zeros_csv", "zeros_tail", "zeros_family", "measure"],
    )?;
    let lambda = m
        .get("lambda")
        .map(|l| complex(l, "lambda"))
        .transpose()?
        .unwrap_or(Complex64::new(1.0, 0.0));
    let zeros = match (m.get("zeros_csv"), m.get("zeros_family")) {
        (Some(_), Some(_)) => {
            return Err(invalid("inner function", "give either 'zeros_csv' or 'zeros_family'"))
        }
        (Some(csv), None) => {
            let s = csv.as_str().ok_or_else(|| invalid("zeros_csv", "expected a string"))?;
            let text = if s.contains('\n') {
                s.to_string()
            } else {
                std::fs::read_to_string(base.join(s)).map_err(|e| Error::Io(format!("{s}: {e}")))?
            };
            let tail = m.get("zeros_tail").map(|t| real(t, "zeros_tail")).transpose()?.unwrap_or(0.0);
            Some(ZeroSequence::with_tail(zeros_from_csv(&text)?, tail)?)
        }
        (None, Some(f)) => {
            let o = object(f, "zeros_family", &["kind", "theta"])?;
            let theta = o.get("theta").map(|t| real(t, "theta")).transpose()?.unwrap_or(0.0);
            match field(o, "kind", "zeros_family")?.as_str() {
                Some("radial_geometric") => Some(ZeroSequence::radial_geometric(theta)),
                Some("radial_sparse") => Some(ZeroSequence::radial_sparse(theta)),
                _ => return Err(invalid("zeros_family", "kind must be radial_geometric or radial_sparse")),
            }
        }
        (None, None) => {
            if m.contains_key("zeros_tail") {
                return Err(invalid("inner function", "'zeros_tail' needs 'zeros_csv'"));
            }
            None
        }
    };
    let sigma = m.get("measure").map(measure_from_json).transpose()?;
    InnerFunction::new(lambda, zeros, sigma)
}

pub fn inner_from_str(text: &str, base: &Path) -> Result<InnerFunction> {
    inner_from_json(&parse_json(text)?, base)
}

/// Inline-CSV document for `theta`; generated families are written by name.
pub fn inner_to_json(theta: &InnerFunction) -> Result<Value> {
    let mut v = json!({ "lambda": cnum(theta.lambda) });
    match theta.zeros() {
        None => {}
        Some(ZeroSequence::Listed { zeros, tail }) => {
            v["zeros_csv"] = Value::String(zeros_to_csv(zeros));
            if *tail != 0.0 {
                v["zeros_tail"] = num(*tail);
            }
        }
        Some(ZeroSequence::Generated(g)) => {
            let kind = match g.label() {
                GEOMETRIC_LABEL => "radial_geometric",
                SPARSE_LABEL => "radial_sparse",
                other => return Err(invalid("inner function", format!("family '{other}' has no file form"))),
            };
            v["zeros_family"] = json!({ "kind": kind, "theta": num(g.accumulation()[0]) });
        }
    }
    if let Some(s) = theta.sigma() {
        v["measure"] = measure_to_json(s);
    }
    Ok(v)
}

// ------------------------------------------------------------------ reports

fn limit_json(r: &LimitRecord) -> Value {
    json!({
        "samples": r.samples.iter().map(|&(l, s)| json!([num(l), num(s)])).collect::<Vec<_>>(),
        "sup_estimate": num(r.sup_estimate),
        "sup_all": num(r.sup_all),
        "stabilized": r.stabilized,
        "verdict": r.verdict.as_str(),
    })
}

fn density_json(r: &DensityRecord) -> Value {
    json!({
        "densities": r.densities.iter().map(|&(x, d)| json!([num(x), num(d)])).collect::<Vec<_>>(),
        "threshold": num(r.threshold),
        "verdict": match r.verdict {
            DensityVerdict::SufficientConditionMet => "SufficientConditionMet",
            DensityVerdict::Inconclusive => "Inconclusive",
        },
    })
}

pub fn report_to_json(r: &ClassificationReport) -> Value {
    let c = &r.config;
    json!({
        "verdict": r.verdict.as_str(),
        "scan_verdict": r.scan_verdict.as_str(),
        "c_star": num(r.c_star),
        "depth_trace": r.depth_trace.iter().map(|d| json!({
            "depth": d.depth,
            "boxes_with_mass": d.boxes_with_mass,
            "depth_max": opt_num(d.depth_max),
            "c_star": num(d.c_star),
        })).collect::<Vec<_>>(),
        "witnesses": r.witnesses.iter().map(|w| json!({
            "depth": w.depth,
            "z": cnum(w.z),
            "mod_theta": num(w.mod_theta),
            "mu_q": num(w.mu_q),
        })).collect::<Vec<_>>(),
        "tests": {
            "radial": r.tests.radial.as_ref().map_or(Value::Null, limit_json),
            "sawtooth": r.tests.sawtooth.as_ref().map_or(Value::Null, limit_json),
            "density": r.tests.density.as_ref().map_or(Value::Null, density_json),
        },
        "config": {
            "depth": c.depth,
            "tol": num(c.tol),
            "margin": num(c.margin),
            "eval_tol": num(c.eval_tol),
            "angle_offset": num(c.angle_offset),
        },
        "notes": r.notes,
    })
}

// ---------------------------------------------------------------- level sets

/// `(depth, index)` of a cell in the level-set CSV. Central cells use depth 0 and are numbered
/// ring by ring; Whitney sub-cells use `index·s² + row·s + col`.
pub fn level_cell_key(cell: &LevelCell, subdivisions: u32) -> (u32, u64) {
    let s = subdivisions as u64;
    match *cell {
        LevelCell::Central { ring: 0, .. } => (0, 0),
        LevelCell::Central { ring, sector } => (0, 1 + (ring as u64 - 1) * 4 * s + sector as u64),
        LevelCell::Whitney { depth, index, row, col } => {
            (depth, index * s * s + row as u64 * s + col as u64)
        }
    }
}

pub fn levelset_to_csv(a: &LevelSetAnalysis) -> String {
    let mut out = String::from("depth,index,label\n");
    for (cell, label) in &a.labels {
        let (d, i) = level_cell_key(cell, a.subdivisions);
        out.push_str(&format!("{d},{i},{label}\n"));
    }
    out
}

pub fn levelset_to_json(a: &LevelSetAnalysis) -> Value {
    json!({
        "epsilon": num(a.epsilon),
        "depth": a.depth,
        "subdivisions": a.subdivisions,
        "central_rings": a.central_rings,
        "component_count": a.component_count,
        "previous_count": a.previous_count,
        "stabilized": a.stabilized,
        "marked_cells": a.labels.len(),
    })
}

// --------------------------------------------------------------- companion

pub const CONNECTOR_RULE: &str = "chains joined in boundary order of arc left endpoints";

pub fn companion_to_json(c: &Companion) -> Value {
    let v = &c.verification;
    json!({
        "zero_count": c.zeros.len(),
        "zeros_csv": zeros_to_csv(&c.zeros),
        "cutoff_level": c.cutoff_level,
        "exhausted": c.exhausted,
        "tail_estimate": num(c.tail_estimate),
        "connector_rule": CONNECTOR_RULE,
        "connector_order": c.connector_order.iter().map(|&t| num(t)).collect::<Vec<_>>(),
        "arcs": c.chain.arcs.iter().map(|a| json!({
            "level": a.arc.level,
            "index": a.arc.index,
            "start": num(a.arc.start()),
            "length": num(a.arc.length()),
            "epsilon": num(a.epsilon),
            "k": a.k,
            "radius": num(a.radius),
        })).collect::<Vec<_>>(),
        "verification": {
            "passed": v.passed(),
            "spacing_pairs": v.spacing_pairs,
            "spacing_error": num(v.spacing_error),
            "spacing_ok": v.spacing_ok,
            "separation": {
                "delta": num(v.separation.delta),
                "box_constant": num(v.separation.box_constant),
                "zeros_used": v.separation.zeros_used,
            },
            "separation_ok": v.separation_ok,
            "scan_b": report_to_json(&v.scan_b),
            "scan_b_theta": report_to_json(&v.scan_b_theta),
            "mechanism_points": v.mechanism_points,
            "mechanism_violations": v.mechanism_violations.iter().map(|&z| cnum(z)).collect::<Vec<_>>(),
            "theta_zeros_below": v.theta_zeros_below,
            "c_b": num(v.c_b),
        },
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}
