//! JSON encodings of matrices, symmetry maps, phase specs and reports.
//!
//! Matrices are `{"rows", "cols", "data": [[re, im], ...]}` in row-major
//! order. Maps are `{"kind", "W"}`; specs add `"phase": [re, im]`.

use std::collections::BTreeMap;

use acbs_core::bootstrap::BootstrapReport;
use acbs_core::linalg::ComplexMatrix;
use acbs_core::symmetry::{MapKind, PhaseSpec, SymmetryMap};
use acbs_core::C64;
use anyhow::{anyhow, bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    let data = (0..m.nrows()).flat_map(|i| (0..m.ncols()).map(move |j| [m[(i, j)].re, m[(i, j)].im])).collect();
    serde_json::to_value(MatrixJson { rows: m.nrows(), cols: m.ncols(), data }).expect("finite matrix")
}

pub fn matrix_from_json(v: &Value) -> Result<ComplexMatrix> {
    let mj: MatrixJson = serde_json::from_value(v.clone()).context("malformed matrix JSON")?;
    ensure!(mj.data.len() == mj.rows * mj.cols, "matrix data has {} entries, expected {}", mj.data.len(), mj.rows * mj.cols);
    Ok(ComplexMatrix::from_fn(mj.rows, mj.cols, |i, j| {
        let [re, im] = mj.data[i * mj.cols + j];
        C64::new(re, im)
    }))
}

pub fn complex_to_json(z: C64) -> Value {
    json!([z.re, z.im])
}

pub fn complex_from_json(v: &Value) -> Result<C64> {
    let [re, im]: [f64; 2] = serde_json::from_value(v.clone()).context("complex numbers are [re, im]")?;
    Ok(C64::new(re, im))
}

pub fn map_to_json(m: &SymmetryMap) -> Value {
    json!({ "kind": m.kind.name(), "W": matrix_to_json(&m.w) })
}

pub fn map_from_json(v: &Value) -> Result<SymmetryMap> {
    let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| anyhow!("map needs a \"kind\""))?;
    let kind = MapKind::parse(kind).ok_or_else(|| anyhow!("unknown map kind {kind:?}"))?;
    let w = matrix_from_json(v.get("W").ok_or_else(|| anyhow!("map needs \"W\""))?)?;
    Ok(SymmetryMap::new(kind, w)?)
}

pub fn spec_to_json(s: &PhaseSpec) -> Value {
    let mut v = map_to_json(&s.map);
    v["phase"] = complex_to_json(s.phase);
    v
}

pub fn spec_from_json(v: &Value) -> Result<PhaseSpec> {
    let map = map_from_json(v)?;
    let phase = match v.get("phase") {
        Some(p) => complex_from_json(p)?,
        None => C64::new(1.0, 0.0),
    };
    Ok(PhaseSpec::new(map, phase))
}

pub fn specs_from_json(v: Option<&Value>) -> Result<Vec<PhaseSpec>> {
    match v {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(Value::Array(items)) => items.iter().map(spec_from_json).collect(),
        Some(_) => bail!("spec lists are JSON arrays"),
    }
}

fn finite_map(m: &BTreeMap<String, f64>) -> Value {
    // JSON has no NaN or infinity
    Value::Object(m.iter().map(|(k, &v)| (k.clone(), if v.is_finite() { json!(v) } else { Value::Null })).collect())
}

pub fn report_to_json(r: &BootstrapReport) -> Value {
    json!({
        "mode": r.mode,
        "epsilon": r.epsilon,
        "L": r.l,
        "delta": r.delta_loc,
        "input_commutator": r.input_commutator,
        "distances": finite_map(&r.distances),
        "defects": finite_map(&r.defects),
        "bounds": finite_map(&r.bounds),
        "pass": r.pass,
        "notes": r.notes,
        "realized_constant": r.realized_constant,
    })
}
