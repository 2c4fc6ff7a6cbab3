//! Turning declared phase specs into bootstrap conditions, and running the
//! oracle followed by the bootstrap on an example pair.

use acbs_core::bootstrap::{bootstrap_sa, bootstrap_unitary, root_order, BootstrapConfig, BootstrapOutput, PhaseCond, UnitaryCase};
use acbs_core::linalg::dist;
use acbs_core::oracle::{commuting_approx_sa, commuting_approx_unitary};
use acbs_core::symmetry::{maps_equal, star_twist, PhaseSpec, SymmetryMap, MAP_TOL};
use acbs_core::C64;
use anyhow::{anyhow, bail, Result};

use crate::examples::ExamplePair;

const PHASE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Sa,
    Unitary,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        match s {
            "sa" => Some(Mode::Sa),
            "unitary" | "u" => Some(Mode::Unitary),
            _ => None,
        }
    }
}

fn near(a: C64, b: C64) -> bool {
    (a - b).norm() <= PHASE_TOL
}

/// Phase of `B` under `m` (or under its star twist): the declared phase if
/// a matching second spec exists, else the measured one when it is ±1.
fn b_phase(m: &SymmetryMap, second: &[PhaseSpec], b: &acbs_core::ComplexMatrix) -> Result<(C64, bool)> {
    let twist = star_twist(m);
    for s in second {
        if maps_equal(&s.map, m, 1e2 * MAP_TOL) {
            return Ok((s.phase, false));
        }
        if maps_equal(&s.map, &twist, 1e2 * MAP_TOL) {
            return Ok((s.phase, true));
        }
    }
    let img = m.act(b);
    for eta in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)] {
        if dist(&img, &(b * eta)) <= 1e-10 {
            return Ok((eta, false));
        }
    }
    Err(anyhow!("no declared phase for the second operator under a {} map", m.kind.name()))
}

#[derive(Clone, Debug)]
pub struct SaConditions {
    pub s: Vec<SymmetryMap>,
    pub anti: Option<PhaseCond>,
}

/// Linear symmetries of `X` go into `S`; conjugate-linear ones enter `S`
/// through their star twist; the single phase `-1` map is the antisymmetry.
pub fn sa_conditions(pair: &ExamplePair) -> Result<SaConditions> {
    let one = C64::new(1.0, 0.0);
    let mut s = Vec::new();
    let mut anti = None;
    for spec in &pair.first_specs {
        if near(spec.phase, one) {
            if spec.map.is_linear() {
                s.push(spec.map.clone());
            } else {
                s.push(star_twist(&spec.map));
            }
        } else if near(spec.phase, -one) {
            if anti.is_some() {
                bail!("at most one antisymmetry is supported");
            }
            let (eta, twisted) = b_phase(&spec.map, &pair.second_specs, &pair.second)?;
            anti = Some(PhaseCond::new(spec.map.clone(), -one, eta, twisted));
        } else {
            bail!("self-adjoint mode needs phases ±1 on the first operator");
        }
    }
    Ok(SaConditions { s, anti })
}

/// Linear phase-1 maps form `S`; a linear map with a nontrivial phase is
/// the rotation, a conjugate-linear map the conjugation.
pub fn unitary_conditions(pair: &ExamplePair) -> Result<(Vec<SymmetryMap>, UnitaryCase)> {
    let one = C64::new(1.0, 0.0);
    let mut s = Vec::new();
    let mut rot: Option<(PhaseCond, usize)> = None;
    let mut conj: Option<PhaseCond> = None;
    for spec in &pair.first_specs {
        let (eta, twisted) = b_phase(&spec.map, &pair.second_specs, &pair.second)?;
        let cond = PhaseCond::new(spec.map.clone(), spec.phase, eta, twisted);
        if spec.map.is_linear() {
            if near(spec.phase, one) {
                s.push(spec.map.clone());
                continue;
            }
            if rot.is_some() {
                bail!("at most one rotation is supported");
            }
            let n = root_order(spec.phase, 64).ok_or_else(|| anyhow!("rotation phase is not a root of unity"))?;
            rot = Some((cond, n));
        } else {
            if conj.is_some() {
                bail!("at most one conjugate-linear map is supported");
            }
            conj = Some(cond);
        }
    }
    let case = match (rot, conj) {
        (None, None) => UnitaryCase::None,
        (None, Some(c)) => UnitaryCase::Conj(c),
        (Some((cond, n)), None) => UnitaryCase::Rot { cond, n },
        (Some((rot, n)), Some(conj)) => UnitaryCase::Dihedral { rot, conj, n },
    };
    Ok((s, case))
}

/// Oracle approximant followed by the bootstrap in the given mode.
pub fn run_bootstrap(pair: &ExamplePair, mode: Mode, cfg: &BootstrapConfig) -> Result<BootstrapOutput> {
    let out = match mode {
        Mode::Sa => {
            let c = sa_conditions(pair)?;
            let ap = commuting_approx_sa(&pair.first, &pair.second, None, &pair.first_specs, &pair.second_specs)?;
            bootstrap_sa(&pair.first, &pair.second, &ap.first_prime, &ap.b_prime, &c.s, c.anti.as_ref(), cfg)?
        }
        Mode::Unitary => {
            let (s, case) = unitary_conditions(pair)?;
            let ap = commuting_approx_unitary(&pair.first, &pair.second, None, &pair.first_specs, &pair.second_specs)?;
            bootstrap_unitary(&pair.first, &pair.second, &ap.first_prime, &ap.b_prime, &s, &case, cfg)?
        }
    };
    Ok(out)
}

/// Largest declared-spec defect of a pair.
pub fn declared_defect(pair: &ExamplePair, first: &acbs_core::ComplexMatrix, second: &acbs_core::ComplexMatrix) -> f64 {
    let a = pair.first_specs.iter().map(|s| s.defect(first));
    let b = pair.second_specs.iter().map(|s| s.defect(second));
    a.chain(b).fold(0.0, f64::max)
}
