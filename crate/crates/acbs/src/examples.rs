//! Named example pairs and their file format.

use acbs_core::generate::{az_pair, davidson, phase_instance, tensor_avg_pair, voiculescu};
use acbs_core::linalg::{polar_decompose, re_part, ComplexMatrix};
use acbs_core::symmetry::{AzClass, PhaseSpec, SymmetryMap};
use acbs_core::C64;
use anyhow::{anyhow, bail, ensure, Result};
use serde_json::{json, Value};

use crate::json::{matrix_from_json, matrix_to_json, spec_to_json, specs_from_json};

/// A pair with the phase specs each member is declared to satisfy.
#[derive(Clone, Debug)]
pub struct ExamplePair {
    pub name: String,
    pub first: ComplexMatrix,
    pub second: ComplexMatrix,
    pub first_specs: Vec<PhaseSpec>,
    pub second_specs: Vec<PhaseSpec>,
    pub class: Option<AzClass>,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct GenParams {
    pub n: usize,
    pub class: Option<AzClass>,
    pub delta: Option<f64>,
    pub seed: u64,
    /// Site dimension for `tensor_avg`, block size for `rot`/`dihedral`.
    pub d: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams { n: 4, class: None, delta: None, seed: 0, d: 2 }
    }
}

pub const EXAMPLES: [&str; 6] = ["voiculescu", "davidson", "tensor_avg", "az", "rot", "dihedral"];

pub fn gen_example(name: &str, p: &GenParams) -> Result<ExamplePair> {
    let one = C64::new(1.0, 0.0);
    let pair = |first, second, first_specs, second_specs| ExamplePair { name: name.to_string(), first, second, first_specs, second_specs, class: None, seed: p.seed };
    let out = match name {
        "voiculescu" => {
            ensure!(p.n >= 2, "n ≥ 2 required");
            let (u, v) = voiculescu(p.n);
            // V* U V = e^{-2πi/n} U
            let zeta = C64::from_polar(1.0, -2.0 * std::f64::consts::PI / p.n as f64);
            let spec = PhaseSpec::new(SymmetryMap::conj_by(v.clone())?, zeta);
            pair(u, v, vec![spec], vec![])
        }
        "davidson" => {
            ensure!(p.n >= 2, "n ≥ 2 required");
            let (a, b) = davidson(p.n);
            pair(a, b, vec![], vec![])
        }
        "tensor_avg" => {
            ensure!(p.d >= 1, "site dimension d ≥ 1 required");
            let (a, b, specs) = tensor_avg_pair(p.d, p.n, p.seed)?;
            pair(a, b, specs.clone(), specs)
        }
        "az" => {
            let class = p.class.ok_or_else(|| anyhow!("az needs --class"))?;
            let az = az_pair(class, p.n, p.delta, p.seed)?;
            let mut out = pair(az.h.clone(), az.x.clone(), az.h_specs(), az.x_specs());
            out.class = Some(class);
            out
        }
        "rot" | "dihedral" => {
            let delta = p.delta.unwrap_or(1e-3);
            let inst = phase_instance(p.n, p.d, delta, name == "dihedral", p.seed)?;
            let polar = polar_decompose(&inst.a)?;
            let mut first_specs = vec![PhaseSpec::new(inst.rot.clone(), inst.zeta)];
            let mut second_specs = vec![PhaseSpec::new(inst.rot.clone(), one)];
            if let Some(c) = &inst.reflection {
                first_specs.push(PhaseSpec::new(c.clone(), one));
                second_specs.push(PhaseSpec::new(c.clone(), one));
            }
            pair(polar.u, re_part(&polar.p), first_specs, second_specs)
        }
        other => bail!("unknown example {other:?} (expected one of {})", EXAMPLES.join(", ")),
    };
    Ok(out)
}

pub fn pair_to_json(p: &ExamplePair) -> Value {
    json!({
        "example": p.name,
        "seed": p.seed,
        "class": p.class.map(|c| c.name()),
        "first": matrix_to_json(&p.first),
        "second": matrix_to_json(&p.second),
        "first_specs": p.first_specs.iter().map(spec_to_json).collect::<Vec<_>>(),
        "second_specs": p.second_specs.iter().map(spec_to_json).collect::<Vec<_>>(),
    })
}

pub fn pair_from_json(v: &Value) -> Result<ExamplePair> {
    let get = |k: &str| v.get(k).ok_or_else(|| anyhow!("pair file needs {k:?}"));
    let class = match v.get("class").and_then(Value::as_str) {
        Some(c) => Some(AzClass::parse(c).ok_or_else(|| anyhow!("unknown class {c:?}"))?),
        None => None,
    };
    Ok(ExamplePair {
        name: v.get("example").and_then(Value::as_str).unwrap_or("custom").to_string(),
        first: matrix_from_json(get("first")?)?,
        second: matrix_from_json(get("second")?)?,
        first_specs: specs_from_json(v.get("first_specs"))?,
        second_specs: specs_from_json(v.get("second_specs"))?,
        class,
        seed: v.get("seed").and_then(Value::as_u64).unwrap_or(0),
    })
}
