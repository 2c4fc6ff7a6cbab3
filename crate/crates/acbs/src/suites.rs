//! Randomized invariant suites. Each trial is seeded independently and
//! returns `(check, measured, bound)` records; a record passes when
//! `measured ≤ bound + tol`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use acbs_core::bootstrap::{bootstrap_sa, bootstrap_unitary, BootstrapConfig, BootstrapOutput, PhaseCond, UnitaryCase};
use acbs_core::generate::{az_pair, phase_instance, random_complex, random_hermitian, random_unitary, rng, voiculescu, Rng};
use acbs_core::linalg::{
    apply_function, comm_norm, diag, dist, eigh, hermitian_defect, identity, kron, op_norm, order_defect, polar_decompose, projection_defect, re_part, real, real_diag, spectral_decompose,
    unitary_defect, zeros, ComplexMatrix, SpectralKind,
};
use acbs_core::localization::{distance_bound, localize_normal, localize_phase, localize_sa};
use acbs_core::oracle::{commuting_approx_sa, commuting_approx_unitary};
use acbs_core::projection::{build_f_sa, dk_check, round_to_projection, sandwich_projection};
use acbs_core::region::Region;
use acbs_core::symmetry::{order_of, symmetrize, AzClass, ClassRole, MapKind, PhaseSpec, SymmetryMap};
use acbs_core::C64;
use anyhow::{anyhow, bail, Result};
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

pub const SUITE_VERSION: &str = "1";
pub const SUITES: [&str; 7] = ["localization", "projections", "bootstrap-sa", "bootstrap-u", "polar", "symmetry", "all"];

/// Tolerance for identities that hold up to rounding.
pub const EXACT_TOL: f64 = 1e-10;

pub type Record = (&'static str, f64, f64);

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// `min(bound - measured)` over trials.
    pub worst_margin: f64,
    pub worst_measured: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub version: &'static str,
    pub seed: u64,
    pub trials: usize,
    pub tol: f64,
    pub exact_tol: f64,
    pub checks: Vec<Check>,
    pub errors: Vec<String>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn aggregate(suite: &str, seed: u64, trials: usize, tol: f64, results: Vec<(u64, Result<Vec<Record>>)>) -> SuiteReport {
    let mut checks: BTreeMap<&'static str, Check> = BTreeMap::new();
    let mut errors = Vec::new();
    for (s, r) in results {
        match r {
            Ok(records) => {
                for (name, measured, bound) in records {
                    let c = checks.entry(name).or_insert_with(|| Check { name: name.to_string(), trials: 0, failures: 0, worst_margin: f64::INFINITY, worst_measured: 0.0 });
                    c.trials += 1;
                    let ok = measured <= bound + tol;
                    if !ok {
                        c.failures += 1;
                    }
                    c.worst_margin = c.worst_margin.min(bound - measured);
                    c.worst_measured = c.worst_measured.max(measured);
                }
            }
            Err(e) => errors.push(format!("seed {s}: {e:#}")),
        }
    }
    let checks: Vec<Check> = checks.into_values().collect();
    let pass = errors.is_empty() && checks.iter().all(|c| c.failures == 0);
    SuiteReport { suite: suite.to_string(), version: SUITE_VERSION, seed, trials, tol, exact_tol: EXACT_TOL, checks, errors, pass }
}

fn run_trials(suite: &str, trials: usize, seed: u64, tol: f64, f: impl Fn(u64, usize) -> Result<Vec<Record>> + Sync) -> SuiteReport {
    let results: Vec<(u64, Result<Vec<Record>>)> = (0..trials).into_par_iter().map(|t| (seed + t as u64, f(seed + t as u64, t))).collect();
    aggregate(suite, seed, trials, tol, results)
}

/// Runs a named suite; `all` concatenates every suite's checks with the
/// suite name as prefix.
pub fn run_suite(suite: &str, trials: usize, seed: u64, tol: f64) -> Result<SuiteReport> {
    let cfg = BootstrapConfig::default();
    let rep = match suite {
        "localization" => run_trials(suite, trials, seed, tol, |s, _| localization_trial(s, 32, &[0.1, 0.5], cfg.crho)),
        "projections" => run_trials(suite, trials, seed, tol, |s, _| projections_trial(s)),
        "bootstrap-sa" => run_trials(suite, trials, seed, tol, |s, t| bootstrap_sa_trial(s, t, &cfg)),
        "bootstrap-u" => run_trials(suite, trials, seed, tol, |s, t| bootstrap_u_trial(s, t, &cfg)),
        "polar" => run_trials(suite, trials, seed, tol, |s, _| polar_trial(s)),
        "symmetry" => run_trials(suite, trials, seed, tol, |s, _| symmetry_trial(s)),
        "all" => {
            let mut checks = Vec::new();
            let mut errors = Vec::new();
            for name in SUITES.iter().filter(|&&n| n != "all") {
                let r = run_suite(name, trials, seed, tol)?;
                checks.extend(r.checks.into_iter().map(|mut c| {
                    c.name = format!("{name}/{}", c.name);
                    c
                }));
                errors.extend(r.errors.into_iter().map(|e| format!("{name}: {e}")));
            }
            let pass = errors.is_empty() && checks.iter().all(|c| c.failures == 0);
            SuiteReport { suite: suite.to_string(), version: SUITE_VERSION, seed, trials, tol, exact_tol: EXACT_TOL, checks, errors, pass }
        }
        other => bail!("unknown suite {other:?} (expected one of {})", SUITES.join(", ")),
    };
    Ok(rep)
}

// ---------------------------------------------------------------- generators

fn uniform(r: &mut Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * r.random::<f64>()
}

fn log_uniform(r: &mut Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(uniform(r, lo.log10(), hi.log10()))
}

fn hermitian_from(vals: &[f64], v: &ComplexMatrix) -> ComplexMatrix {
    re_part(&(v * real_diag(vals) * v.adjoint()))
}

fn normal_from(vals: &[C64], v: &ComplexMatrix) -> ComplexMatrix {
    v * diag(vals) * v.adjoint()
}

/// Hermitian contraction with spectrum spread over `[-1, 1]`.
fn spread_hermitian(n: usize, r: &mut Rng) -> ComplexMatrix {
    let vals: Vec<f64> = (0..n).map(|_| uniform(r, -1.0, 1.0)).collect();
    hermitian_from(&vals, &random_unitary(n, r))
}

/// Random normal contraction.
fn random_normal(n: usize, r: &mut Rng) -> ComplexMatrix {
    let vals: Vec<C64> = (0..n).map(|_| C64::from_polar(uniform(r, 0.0, 1.0).sqrt(), uniform(r, 0.0, 2.0 * PI))).collect();
    normal_from(&vals, &random_unitary(n, r))
}

fn contraction(a: ComplexMatrix) -> ComplexMatrix {
    let s = op_norm(&a);
    if s > 1.0 {
        a / real(s)
    } else {
        a
    }
}

fn min_eig(a: &ComplexMatrix) -> Result<f64> {
    Ok(eigh(a)?.0.first().copied().unwrap_or(0.0))
}

// ---------------------------------------------------------------- localization

/// Unital, contractive, positive, the distance bound, locality and the
/// commutant property for all three localizers.
pub fn localization_trial(seed: u64, n: usize, deltas: &[f64], crho: f64) -> Result<Vec<Record>> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    let x = spread_hermitian(n, &mut r);
    let eta = log_uniform(&mut r, 1e-4, 1e-1);
    let b = contraction(&x * &x + random_complex(n, &mut r) * real(eta));
    let g = random_complex(n, &mut r);
    let pos = &g * g.adjoint();
    let c = &x * &x * &x - &x;
    let id = identity(n);
    let (vals, vecs) = eigh(&x)?;
    for &delta in deltas {
        let lb = localize_sa(&x, &b, delta)?;
        out.push(("sa/unital", dist(&localize_sa(&x, &id, delta)?, &id), EXACT_TOL));
        out.push(("sa/contraction", op_norm(&lb), op_norm(&b)));
        out.push(("sa/positivity", -min_eig(&re_part(&localize_sa(&x, &pos, delta)?))?, EXACT_TOL));
        out.push(("sa/distance", dist(&lb, &b), distance_bound(crho, delta, 0, comm_norm(&x, &b), 0.0)));
        out.push(("sa/commutant", comm_norm(&c, &lb), comm_norm(&c, &b) + EXACT_TOL));
        // spectral sandwiches across a gap of width ≥ Δ
        let t = uniform(&mut r, -1.0, 1.0 - delta);
        let lo: Vec<usize> = (0..n).filter(|&i| vals[i] <= t).collect();
        let hi: Vec<usize> = (0..n).filter(|&i| vals[i] >= t + delta).collect();
        let e1 = vecs.select_columns(lo.iter()) * vecs.select_columns(lo.iter()).adjoint();
        let e2 = vecs.select_columns(hi.iter()) * vecs.select_columns(hi.iter()).adjoint();
        out.push(("sa/locality", op_norm(&(&e2 * &lb * &e1)), EXACT_TOL));
    }

    let a = random_normal(n, &mut r);
    let bn = contraction(&a * &a + random_complex(n, &mut r) * real(eta));
    let ca = &a * &a.adjoint() * &a;
    let astar = a.adjoint();
    for &delta in deltas {
        let lb = localize_normal(&a, &bn, delta)?;
        out.push(("normal/unital", dist(&localize_normal(&a, &id, delta)?, &id), EXACT_TOL));
        out.push(("normal/contraction", op_norm(&lb), op_norm(&bn)));
        out.push(("normal/distance", dist(&lb, &bn), distance_bound(crho, delta, 1, comm_norm(&a, &bn), comm_norm(&astar, &bn))));
        out.push(("normal/commutant", comm_norm(&ca, &lb), comm_norm(&ca, &bn) + EXACT_TOL));
    }

    // A = V_m ⊗ D with φ = conj by U_m ⊗ I, so φ(A) = ζA with ζ of order m
    let m = 4;
    if n % m == 0 {
        let k = n / m;
        let (um, vm) = voiculescu(m);
        let dvals: Vec<C64> = (0..k).map(|_| real(uniform(&mut r, 0.3, 1.0))).collect();
        let a = kron(&vm, &normal_from(&dvals, &random_unitary(k, &mut r)));
        let phi = SymmetryMap::conj_by(kron(&um, &identity(k)))?;
        let bp = contraction(random_complex(n, &mut r));
        let bp = contraction(&a * &a.adjoint() + &bp * real(eta));
        for &delta in deltas {
            let lb = localize_phase(&a, &bp, delta, m)?;
            out.push(("phase/distance", dist(&lb, &bp), distance_bound(crho, delta, m, comm_norm(&a, &bp), comm_norm(&a.adjoint(), &bp))));
            out.push(("phase/contraction", op_norm(&lb), op_norm(&bp)));
            out.push(("phase/equivariance", dist(&phi.act(&lb), &localize_phase(&a, &phi.act(&bp), delta, m)?), 1e-9));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- projections

fn random_projection(n: usize, rank: usize, r: &mut Rng) -> (ComplexMatrix, ComplexMatrix) {
    let q = random_unitary(n, r);
    let p = q.columns(0, rank) * q.columns(0, rank).adjoint();
    (p, q)
}

/// Strung rounding, Davidson's sandwich, the interval Davis–Kahan check
/// and the `F` invariants on one random instance each.
pub fn projections_trial(seed: u64) -> Result<Vec<Record>> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    let n = 4 + (r.random::<u32>() % 13) as usize;

    // rounding an almost projection
    let (p, _) = random_projection(n, 1 + (r.random::<u32>() as usize) % (n - 1), &mut r);
    let x = &p + random_hermitian(n, &mut r) * real(uniform(&mut r, 0.0, 0.2));
    let xsq = op_norm(&(&x * &x - &x));
    if xsq < 0.25 {
        let f = round_to_projection(&x)?;
        out.push(("strung/bound", dist(&f, &x), 2.0 * xsq));
        out.push(("strung/projection", projection_defect(&f), EXACT_TOL));
    }

    // sandwich E ≤ F ≤ G around a rotated middle projection
    let q = random_unitary(n, &mut r);
    let a = 1 + (r.random::<u32>() as usize) % (n / 2);
    let c = a + (r.random::<u32>() as usize) % (n - a);
    let g_rank = (c + 1 + (r.random::<u32>() as usize) % (n - c)).min(n);
    let cols = |k: usize| q.columns(0, k) * q.columns(0, k).adjoint();
    let (e, f0, g) = (cols(a), cols(c), cols(g_rank));
    let k = random_hermitian(n, &mut r);
    let t = uniform(&mut r, 0.0, 0.05);
    let w = apply_function(&spectral_decompose(&k, SpectralKind::Hermitian, 1e-12)?, |z| C64::from_polar(1.0, t * z.re))?;
    let fp = re_part(&(&w * &f0 * w.adjoint()));
    let sw = sandwich_projection(&e, &fp, &g, &[])?;
    out.push(("sandwich/lower", order_defect(&e, &sw.f), 1e-8));
    out.push(("sandwich/upper", order_defect(&sw.f, &g), 1e-8));
    out.push(("sandwich/distance", dist(&fp, &sw.f), 5.0 * sw.epsilon));
    out.push(("sandwich/projection", projection_defect(&sw.f), EXACT_TOL));

    // Davis–Kahan across a strip of width 1/2
    let a = spread_hermitian(n, &mut r);
    let b = &a + random_hermitian(n, &mut r) * real(0.01);
    let cut = uniform(&mut r, -1.0, 0.5);
    let dk = dk_check(&a, &b, &Region::closed(-2.0, cut), &Region::closed(cut + 0.5, 2.0), None, 1.0, 0.0)?;
    out.push(("dk/interval", dk.lhs, dk.rhs));

    // F on a window with a spectral gap around the boundary of Ω'
    let x = spread_hermitian(n, &mut r);
    let xp = &x + random_hermitian(n, &mut r) * real(log_uniform(&mut r, 1e-6, 1e-2));
    let lo = uniform(&mut r, -1.0, 0.2);
    let l = uniform(&mut r, 0.05, 0.2);
    let t = build_f_sa(&x, &xp, &Region::open(lo + l, lo + 3.0 * l), &Region::closed(lo, lo + 4.0 * l), &[])?;
    out.push(("build_f/invariants", t.invariant_defect(), 1e-8));
    let bm = contraction(&x * &x + random_complex(n, &mut r) * real(1e-3));
    let d = spectral_decompose(&xp, SpectralKind::Hermitian, 1e-12)?;
    let bp: ComplexMatrix = d.projections.iter().fold(zeros(n), |acc, pr| acc + pr * &bm * pr);
    if !t.fallback_used {
        out.push(("build_f/commutator", comm_norm(&t.f, &bm), 4.0 * t.c_omega * dist(&xp, &x) * op_norm(&bm) + dist(&bp, &bm)));
    }
    Ok(out)
}

// ---------------------------------------------------------------- bootstrap

pub const SA_CLASSES: [AzClass; 7] = [AzClass::D, AzClass::C, AzClass::BDI, AzClass::CII, AzClass::DIII, AzClass::CI, AzClass::AIII];
pub const SA_DIMS: [usize; 4] = [4, 8, 16, 32];

/// Class operators split into `S` (time reversal through its star twist)
/// and the antisymmetry of `H`.
pub fn az_conditions(ops: &[acbs_core::symmetry::ClassOperator]) -> (Vec<SymmetryMap>, Option<PhaseCond>) {
    let mut s = Vec::new();
    let mut anti = None;
    for op in ops {
        match op.role {
            ClassRole::T => s.push(acbs_core::symmetry::star_twist(&op.map)),
            ClassRole::C | ClassRole::S => anti = Some(PhaseCond::new(op.map.clone(), op.h_phase, op.x_phase, false)),
        }
    }
    (s, anti)
}

/// One class instance: `X = H` with its antisymmetry, `B = x`.
pub fn az_bootstrap(class: AzClass, n: usize, seed: u64, cfg: &BootstrapConfig) -> Result<(acbs_core::generate::AzPair, BootstrapOutput)> {
    let p = az_pair(class, n, None, seed)?;
    let ap = commuting_approx_sa(&p.h, &p.x, None, &p.h_specs(), &p.x_specs())?;
    let (s, anti) = az_conditions(&p.ops);
    let out = bootstrap_sa(&p.h, &p.x, &ap.first_prime, &ap.b_prime, &s, anti.as_ref(), cfg)?;
    Ok((p, out))
}

pub fn bootstrap_sa_trial(seed: u64, t: usize, cfg: &BootstrapConfig) -> Result<Vec<Record>> {
    let class = SA_CLASSES[t % SA_CLASSES.len()];
    let n = SA_DIMS[(t / SA_CLASSES.len()) % SA_DIMS.len()];
    let (p, out) = az_bootstrap(class, n, seed, cfg)?;
    let rep = &out.report;
    let mut class_defect: f64 = 0.0;
    for op in &p.ops {
        class_defect = class_defect.max(op.h_spec().defect(&out.first)).max(op.x_spec().defect(&out.b));
    }
    let gate = 45.0 * rep.epsilon.sqrt();
    Ok(vec![
        ("commutator", comm_norm(&out.first, &out.b), 1e-10),
        ("hermitian", hermitian_defect(&out.first).max(hermitian_defect(&out.b)), 1e-10),
        ("class_defect", class_defect, 1e-8),
        ("x_distance", rep.distances["first"], gate),
        ("b_distance", rep.distances["b"], gate),
        ("report_pass", if rep.all_pass() { 0.0 } else { 1.0 }, 0.0),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UCase {
    Conj,
    Rot,
    Dihedral,
}

/// Unitary instances from the polar parts of a phase-symmetric contraction:
/// `U` carries the case's phases and `B = P` is symmetric.
pub fn unitary_instance(kind: UCase, n: usize, seed: u64) -> Result<(ComplexMatrix, ComplexMatrix, UnitaryCase)> {
    let mut r = rng(seed ^ 0x5bd1_e995);
    let order = if n % 4 == 0 && r.random::<bool>() { 4 } else { 2 };
    let delta = log_uniform(&mut r, 1e-5, 1e-2);
    let one = C64::new(1.0, 0.0);
    let inst = phase_instance(order, n / order, delta, kind != UCase::Rot, seed)?;
    let polar = polar_decompose(&inst.a)?;
    let p = re_part(&polar.p);
    let rot = PhaseCond::new(inst.rot.clone(), inst.zeta, one, false);
    Ok(match kind {
        UCase::Conj => {
            // U ↦ cU moves the conjugation phase to c̄²
            let c = C64::from_polar(1.0, uniform(&mut r, 0.0, 2.0 * PI));
            let conj = inst.reflection.clone().ok_or_else(|| anyhow!("real instance expected"))?;
            (polar.u * c, p, UnitaryCase::Conj(PhaseCond::new(conj, c.conj() * c.conj(), one, false)))
        }
        UCase::Rot => (polar.u, p, UnitaryCase::Rot { cond: rot, n: order }),
        UCase::Dihedral => {
            let conj = inst.reflection.clone().ok_or_else(|| anyhow!("real instance expected"))?;
            (polar.u, p, UnitaryCase::Dihedral { rot, conj: PhaseCond::new(conj, one, one, false), n: order })
        }
    })
}

pub fn unitary_bootstrap(kind: UCase, n: usize, seed: u64, cfg: &BootstrapConfig) -> Result<(ComplexMatrix, ComplexMatrix, UnitaryCase, BootstrapOutput)> {
    let (u, b, case) = unitary_instance(kind, n, seed)?;
    let u_specs: Vec<PhaseSpec> = case.conds().iter().map(|c| c.first_spec()).collect();
    let b_specs: Vec<PhaseSpec> = case.conds().iter().map(|c| c.b_spec()).collect();
    let ap = commuting_approx_unitary(&u, &b, None, &u_specs, &b_specs)?;
    let out = bootstrap_unitary(&u, &b, &ap.first_prime, &ap.b_prime, &[], &case, cfg)?;
    Ok((u, b, case, out))
}

pub fn bootstrap_u_trial(seed: u64, t: usize, cfg: &BootstrapConfig) -> Result<Vec<Record>> {
    let kind = [UCase::Conj, UCase::Rot, UCase::Dihedral][t % 3];
    let n = [8, 16][(t / 3) % 2];
    let (_, _, case, out) = unitary_bootstrap(kind, n, seed, cfg)?;
    let rep = &out.report;
    let mut phase: f64 = 0.0;
    for c in case.conds() {
        phase = phase.max(c.first_defect(&out.first)).max(c.b_defect(&out.b));
    }
    let mut v = vec![
        ("commutator", comm_norm(&out.first, &out.b), 1e-10),
        ("unitary", unitary_defect(&out.first), 1e-10),
        ("phase_defect", phase, 1e-8),
        ("report_pass", if rep.all_pass() { 0.0 } else { 1.0 }, 0.0),
    ];
    if let (Some(&bu), Some(&bb)) = (rep.bounds.get("first"), rep.bounds.get("b")) {
        v.push(("u_distance", rep.distances["first"], bu));
        v.push(("b_distance", rep.distances["b"], bb));
    }
    Ok(v)
}

// ---------------------------------------------------------------- polar

/// Both polar inequalities, plus the symmetry of `U` and `P` under the
/// transpose for a symmetric input.
pub fn polar_trial(seed: u64) -> Result<Vec<Record>> {
    let mut r = rng(seed);
    let n = 2 + (r.random::<u32>() % 15) as usize;
    let s: Vec<C64> = (0..n).map(|_| real(uniform(&mut r, 0.2, 1.0))).collect();
    let a = random_unitary(n, &mut r) * diag(&s) * random_unitary(n, &mut r);
    // blend toward a normal matrix so both regimes appear
    let t = uniform(&mut r, 0.0, 1.0);
    let nrm = random_normal(n, &mut r).map(|z| z * 0.5) + identity(n) * real(0.45);
    let a = contraction(a * real(t) + nrm * real(1.0 - t));
    let mut out = Vec::new();
    for (tag, a, sym) in [("general", a.clone(), false), ("transpose", contraction((&a + a.transpose()) * real(0.5)), true)] {
        let Ok(pd) = polar_decompose(&a) else { continue };
        let sc = comm_norm(&a.adjoint(), &a);
        let (u, p) = (&pd.u, re_part(&pd.p));
        let name = |k: &str| -> &'static str {
            match (tag, k) {
                ("general", "dist") => "distance",
                ("general", _) => "commutator",
                (_, "dist") => "transpose/distance",
                _ => "transpose/commutator",
            }
        };
        out.push((name("dist"), dist(&a, &(u * &p)), 0.5 * sc.sqrt()));
        out.push((name("comm"), comm_norm(u, &p), sc.sqrt()));
        if sym {
            let tr = SymmetryMap::transpose(n);
            out.push(("transpose/symmetry", dist(&tr.act(u), u).max(dist(&tr.act(&p), &p)), 1e-8));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------- symmetry

/// Linear map of order dividing `k`: conjugation by a unitary whose
/// eigenvalues are `k`-th roots of unity.
fn random_order_map(k: usize, n: usize, r: &mut Rng) -> Result<SymmetryMap> {
    let vals: Vec<C64> = (0..n).map(|_| C64::from_polar(1.0, 2.0 * PI * ((r.random::<u32>() as usize % k) as f64) / k as f64)).collect();
    let w = normal_from(&vals, &random_unitary(n, r));
    Ok(SymmetryMap::new(MapKind::LM, w)?)
}

/// The `(m - 1)/2` averaging bound, the vanishing average of `U_n` and
/// `‖[U_n, V_n]‖ = 2 sin(π/n)`.
pub fn symmetry_trial(seed: u64) -> Result<Vec<Record>> {
    let mut r = rng(seed);
    let n = 2 + (r.random::<u32>() % 10) as usize;
    let k = 2 + (r.random::<u32>() % 7) as usize;
    let mut out = Vec::new();
    let m = random_order_map(k, n, &mut r)?;
    let ord = order_of(&m, 8).ok_or_else(|| anyhow!("map order exceeds 8"))?;
    let zeta = C64::from_polar(1.0, 2.0 * PI * ((r.random::<u32>() as usize % ord) as f64) / ord as f64);
    let h = random_complex(n, &mut r);
    let sym = symmetrize(&m, &h, zeta, ord)?;
    let defect = dist(&m.act(&h), &(&h * zeta));
    out.push(("average/bound", dist(&sym, &h), (ord as f64 - 1.0) / 2.0 * defect));
    out.push(("average/symmetric", dist(&m.act(&sym), &(&sym * zeta)), EXACT_TOL));
    // conjugate-linear order 2: entrywise conjugation after an orthogonal change of basis
    let q = acbs_core::generate::random_orthogonal(n, &mut r);
    let signs: Vec<f64> = (0..n).map(|_| if r.random::<bool>() { 1.0 } else { -1.0 }).collect();
    let c = SymmetryMap::new(MapKind::ClM, &q * real_diag(&signs) * q.transpose())?;
    let sym = symmetrize(&c, &h, C64::new(1.0, 0.0), 2)?;
    out.push(("average/conjugate", dist(&sym, &h), 0.5 * dist(&c.act(&h), &h)));
    let nv = 2 + (seed % 15) as usize;
    let (u, v) = voiculescu(nv);
    let avg = symmetrize(&SymmetryMap::conj_by(v.clone())?, &u, C64::new(1.0, 0.0), nv)?;
    out.push(("voiculescu/average", op_norm(&avg), 1e-12));
    out.push(("voiculescu/commutator", (comm_norm(&u, &v) - 2.0 * (PI / nv as f64).sin()).abs(), 1e-12));
    Ok(out)
}

/// `‖m(pinch B) - pinch(m B)‖` for random `B` over a bootstrap resolution.
pub fn pinch_equivariance(out: &BootstrapOutput, maps: &[SymmetryMap], seed: u64, samples: usize) -> Result<f64> {
    let res = out.resolution.as_ref().ok_or_else(|| anyhow!("no resolution in this run"))?;
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let b = random_complex(res.dim, &mut r);
        for m in maps {
            worst = worst.max(dist(&m.act(&res.pinch(&b)?), &res.pinch(&m.act(&b))?));
        }
    }
    Ok(worst)
}
