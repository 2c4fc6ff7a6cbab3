//! Commuting approximants: snap the reference operator to cluster values and
//! pinch `B` onto the cluster eigenspaces. `ε` is whatever this achieves.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{precondition, Result};
use crate::linalg::{
    angle, check_kind, column_projection, comm_norm, default_cluster_tol, dist, eig_normal, eigh, ensure_same_dim, ensure_square, op_norm, re_part, real, zeros,
    ComplexMatrix, SpectralKind, C64, ONE,
};
use crate::symmetry::PhaseSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FirstKind {
    Hermitian,
    Unitary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Pinch,
    Scalar,
    Refined,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Pinch => "pinch",
            Method::Scalar => "scalar",
            Method::Refined => "refined",
        }
    }
}

pub const COMMUTATION_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-8;
pub const MAX_ROUNDS: usize = 5;

#[derive(Clone, Debug)]
pub struct Approximant {
    pub first_prime: ComplexMatrix,
    pub b_prime: ComplexMatrix,
    pub epsilon: f64,
    pub method: Method,
    /// Indices of the specs the outputs were averaged over.
    pub symmetrized_over: Vec<usize>,
    pub kind: FirstKind,
    /// `first' = Σ values[j] · blocks[j]`.
    pub blocks: Vec<ComplexMatrix>,
    pub values: Vec<C64>,
}

impl Approximant {
    pub fn commutator(&self) -> f64 {
        comm_norm(&self.first_prime, &self.b_prime)
    }

    pub fn recompute_epsilon(&self, first: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        dist(&self.first_prime, first).max(dist(&self.b_prime, b))
    }
}

fn pinch(blocks: &[ComplexMatrix], b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = zeros(b.nrows());
    for p in blocks {
        out += p * b * p;
    }
    out
}

fn assemble(blocks: &[ComplexMatrix], values: &[C64], n: usize) -> ComplexMatrix {
    let mut out = zeros(n);
    for (p, &v) in blocks.iter().zip(values) {
        out += p * v;
    }
    out
}

/// Splits sorted reals wherever consecutive values differ by at least `gap`.
fn split_line(vals: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..vals.len() {
        match out.last_mut() {
            Some(c) if vals[i] - vals[*c.last().unwrap()] < gap => c.push(i),
            _ => out.push(alloc::vec![i]),
        }
    }
    out
}

/// Clusters angles on the circle (arc distance `< gap` joins); `None` when
/// every gap is below `gap`, i.e. a single cluster wraps the whole circle.
fn split_circle(angles: &[f64], gap: f64) -> Option<Vec<Vec<usize>>> {
    let n = angles.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| angles[i].partial_cmp(&angles[j]).unwrap());
    let gap_after = |p: usize| {
        let a = angles[order[p]];
        let b = if p + 1 < n { angles[order[p + 1]] } else { angles[order[0]] + 2.0 * PI };
        b - a
    };
    let start = (0..n).find(|&p| gap_after(p) >= gap)?;
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut cur = Vec::new();
    for s in 1..=n {
        let p = (start + s) % n;
        cur.push(order[p]);
        if gap_after(p) >= gap {
            out.push(core::mem::take(&mut cur));
        }
    }
    Some(out)
}

/// Mean angle of a cluster, unwrapped from its first member.
fn mean_phase(angles: &[f64], idx: &[usize]) -> C64 {
    let a0 = angles[idx[0]];
    let mut s = 0.0;
    for &i in idx {
        let mut d = angles[i] - a0;
        if d < -PI {
            d += 2.0 * PI;
        } else if d > PI {
            d -= 2.0 * PI;
        }
        s += d;
    }
    C64::from_polar(1.0, a0 + s / idx.len() as f64)
}

fn spec_defect(a: &ComplexMatrix, specs: &[PhaseSpec]) -> f64 {
    specs.iter().map(|s| s.defect(a)).fold(0.0, f64::max)
}

fn symmetrized(a: &ComplexMatrix, specs: &[PhaseSpec]) -> Result<ComplexMatrix> {
    crate::generate::symmetrize_specs(a, specs)
}

fn snap(first: &ComplexMatrix, kind: FirstKind, gap: f64) -> Result<(Vec<ComplexMatrix>, Vec<C64>, bool)> {
    match kind {
        FirstKind::Hermitian => {
            let (vals, vecs) = eigh(&re_part(first))?;
            let clusters = split_line(&vals, gap);
            let values = clusters.iter().map(|c| real(c.iter().map(|&i| vals[i]).sum::<f64>() / c.len() as f64)).collect();
            let blocks = clusters.iter().map(|c| column_projection(&vecs, c)).collect();
            Ok((blocks, values, false))
        }
        FirstKind::Unitary => {
            let (vals, vecs) = eig_normal(first)?;
            let angles: Vec<f64> = vals.iter().map(|&z| angle(z)).collect();
            match split_circle(&angles, gap) {
                Some(clusters) => {
                    let values = clusters.iter().map(|c| mean_phase(&angles, c)).collect();
                    let blocks = clusters.iter().map(|c| column_projection(&vecs, c)).collect();
                    Ok((blocks, values, false))
                }
                None => {
                    let n = first.nrows();
                    let s: C64 = vals.iter().sum();
                    let v = if s.norm() > 1e-12 { s / s.norm() } else { ONE };
                    Ok((alloc::vec![crate::linalg::identity(n)], alloc::vec![v], true))
                }
            }
        }
    }
}

fn approx(first: &ComplexMatrix, b: &ComplexMatrix, kind: FirstKind, gap: Option<f64>, first_specs: &[PhaseSpec], b_specs: &[PhaseSpec]) -> Result<Approximant> {
    ensure_square(first)?;
    ensure_same_dim(first, b)?;
    check_kind(
        first,
        match kind {
            FirstKind::Hermitian => SpectralKind::Hermitian,
            FirstKind::Unitary => SpectralKind::Unitary,
        },
    )?;
    let n = first.nrows();
    let floor = default_cluster_tol(first);
    let gap = gap.unwrap_or_else(|| comm_norm(first, b).sqrt()).max(floor);
    let mut fs = symmetrized(first, first_specs)?;
    let mut bs = symmetrized(b, b_specs)?;
    if kind == FirstKind::Unitary && !first_specs.is_empty() {
        // averaging leaves the unitary group; project back through the polar factor
        fs = crate::linalg::polar_decompose(&fs)?.u;
    }
    let symmetrized_over: Vec<usize> = (0..first_specs.len().max(b_specs.len())).collect();
    for _ in 0..MAX_ROUNDS {
        let (blocks, values, scalar) = snap(&fs, kind, gap)?;
        let mut first_prime = assemble(&blocks, &values, n);
        if kind == FirstKind::Hermitian {
            first_prime = re_part(&first_prime);
        }
        let b_prime = pinch(&blocks, &bs);
        let comm = comm_norm(&first_prime, &b_prime);
        let ok = comm <= COMMUTATION_TOL * (1.0 + op_norm(&b_prime)) && spec_defect(&first_prime, first_specs) <= SYMMETRY_TOL && spec_defect(&b_prime, b_specs) <= SYMMETRY_TOL;
        if ok {
            let epsilon = dist(&first_prime, first).max(dist(&b_prime, b));
            return Ok(Approximant {
                first_prime,
                b_prime,
                epsilon,
                method: if scalar { Method::Scalar } else { Method::Pinch },
                symmetrized_over,
                kind,
                blocks,
                values,
            });
        }
        fs = symmetrized(&first_prime, first_specs)?;
        if kind == FirstKind::Unitary {
            fs = crate::linalg::polar_decompose(&fs)?.u;
        }
        bs = symmetrized(&b_prime, b_specs)?;
    }
    Err(precondition("symmetric commuting approximant not reached within the round budget"))
}

/// Hermitian `X` snapped to cluster means (clusters split at gaps `≥ gap`,
/// default `√‖[X,B]‖`), `B` pinched onto the cluster eigenspaces. Inputs are
/// first averaged over the given specs.
pub fn commuting_approx_sa(x: &ComplexMatrix, b: &ComplexMatrix, gap: Option<f64>, x_specs: &[PhaseSpec], b_specs: &[PhaseSpec]) -> Result<Approximant> {
    approx(x, b, FirstKind::Hermitian, gap, x_specs, b_specs)
}

/// Unitary analogue with arc clustering; cluster values are the mean phases.
pub fn commuting_approx_unitary(u: &ComplexMatrix, b: &ComplexMatrix, gap: Option<f64>, u_specs: &[PhaseSpec], b_specs: &[PhaseSpec]) -> Result<Approximant> {
    approx(u, b, FirstKind::Unitary, gap, u_specs, b_specs)
}

/// Spectrum and eigenvectors of the compression of `a` to `range(p)`.
fn compression(a: &ComplexMatrix, p: &ComplexMatrix, kind: FirstKind) -> Result<(Vec<f64>, ComplexMatrix)> {
    let (pv, pvec) = eigh(p)?;
    let cols: Vec<usize> = (0..pv.len()).filter(|&i| pv[i] > 0.5).collect();
    let v = pvec.select_columns(cols.iter());
    let c = v.adjoint() * a * &v;
    match kind {
        FirstKind::Hermitian => {
            let (vals, w) = eigh(&re_part(&c))?;
            Ok((vals, &v * w))
        }
        FirstKind::Unitary => {
            // angles of the unitary part of the compression, measured from its mean
            let cu = match crate::linalg::polar_decompose(&c) {
                Ok(pd) => pd.u,
                Err(_) => return Ok((Vec::new(), v)),
            };
            let (vals, w) = eig_normal(&cu)?;
            let tr: C64 = vals.iter().sum();
            let base = if tr.norm() > 1e-12 { angle(tr) } else { 0.0 };
            let mut rel: Vec<f64> = vals
                .iter()
                .map(|&z| {
                    let d = angle(z) - base;
                    if d > PI {
                        d - 2.0 * PI
                    } else if d < -PI {
                        d + 2.0 * PI
                    } else {
                        d
                    }
                })
                .collect();
            let mut order: Vec<usize> = (0..rel.len()).collect();
            order.sort_by(|&i, &j| rel[i].partial_cmp(&rel[j]).unwrap());
            let w = w.select_columns(order.iter());
            rel = order.iter().map(|&i| rel[i] + base).collect();
            Ok((rel, &v * w))
        }
    }
}

fn value_of(kind: FirstKind, t: f64) -> C64 {
    match kind {
        FirstKind::Hermitian => real(t),
        FirstKind::Unitary => C64::from_polar(1.0, t),
    }
}

fn midrange(vals: &[f64]) -> Option<f64> {
    let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (lo <= hi).then_some(0.5 * (lo + hi))
}

fn value_order(values: &[C64], kind: FirstKind) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    match kind {
        FirstKind::Hermitian => idx.sort_by(|&i, &j| values[i].re.partial_cmp(&values[j].re).unwrap()),
        FirstKind::Unitary => idx.sort_by(|&i, &j| angle(values[i]).partial_cmp(&angle(values[j])).unwrap()),
    }
    idx
}

/// Candidate partitions one move away: re-snap every cluster to its
/// compression midrange, merge two neighbours, or split one cluster at its
/// widest internal gap.
fn candidates(a: &Approximant, first: &ComplexMatrix) -> Result<Vec<(Vec<ComplexMatrix>, Vec<C64>)>> {
    let kind = a.kind;
    let mut out = Vec::new();
    let spectra: Vec<(Vec<f64>, ComplexMatrix)> = a.blocks.iter().map(|p| compression(first, p, kind)).collect::<Result<_>>()?;

    let resnapped: Vec<C64> = spectra.iter().zip(&a.values).map(|((s, _), &v)| midrange(s).map_or(v, |t| value_of(kind, t))).collect();
    out.push((a.blocks.clone(), resnapped));

    let order = value_order(&a.values, kind);
    let m = order.len();
    let pairs = if kind == FirstKind::Unitary && m > 2 { m } else { m.saturating_sub(1) };
    for t in 0..pairs {
        let (i, j) = (order[t], order[(t + 1) % m]);
        let merged = &a.blocks[i] + &a.blocks[j];
        let (s, _) = compression(first, &merged, kind)?;
        let v = midrange(&s).map_or(a.values[i], |t| value_of(kind, t));
        let mut blocks: Vec<ComplexMatrix> = Vec::new();
        let mut values = Vec::new();
        for k in 0..m {
            if k != i && k != j {
                blocks.push(a.blocks[k].clone());
                values.push(a.values[k]);
            }
        }
        blocks.push(merged);
        values.push(v);
        out.push((blocks, values));
    }

    for (c, (s, w)) in spectra.iter().enumerate() {
        if s.len() < 2 {
            continue;
        }
        let cut = (1..s.len()).max_by(|&p, &q| (s[p] - s[p - 1]).partial_cmp(&(s[q] - s[q - 1])).unwrap()).unwrap();
        let lo: Vec<usize> = (0..cut).collect();
        let hi: Vec<usize> = (cut..s.len()).collect();
        let mut blocks: Vec<ComplexMatrix> = Vec::new();
        let mut values = Vec::new();
        for k in 0..m {
            if k != c {
                blocks.push(a.blocks[k].clone());
                values.push(a.values[k]);
            }
        }
        blocks.push(column_projection(w, &lo));
        values.push(value_of(kind, midrange(&s[..cut]).unwrap()));
        blocks.push(column_projection(w, &hi));
        values.push(value_of(kind, midrange(&s[cut..]).unwrap()));
        out.push((blocks, values));
    }
    Ok(out)
}

/// Greedy descent over [`candidates`]; a move is taken only if it lowers
/// `ε`, so the returned `ε` never exceeds the input's.
pub fn brute_force_refine(approx: &Approximant, first: &ComplexMatrix, b: &ComplexMatrix, iters: usize) -> Result<Approximant> {
    ensure_same_dim(first, b)?;
    ensure_same_dim(first, &approx.first_prime)?;
    let n = first.nrows();
    let mut best = approx.clone();
    best.epsilon = best.recompute_epsilon(first, b);
    for _ in 0..iters {
        let mut improved: Option<Approximant> = None;
        for (blocks, values) in candidates(&best, first)? {
            let mut fp = assemble(&blocks, &values, n);
            if best.kind == FirstKind::Hermitian {
                fp = re_part(&fp);
            }
            let bp = pinch(&blocks, b);
            let eps = dist(&fp, first).max(dist(&bp, b));
            let target = improved.as_ref().map_or(best.epsilon, |a| a.epsilon);
            if eps < target - 1e-15 && comm_norm(&fp, &bp) <= COMMUTATION_TOL * (1.0 + op_norm(&bp)) {
                improved = Some(Approximant {
                    first_prime: fp,
                    b_prime: bp,
                    epsilon: eps,
                    method: Method::Refined,
                    symmetrized_over: Vec::new(),
                    kind: best.kind,
                    blocks,
                    values,
                });
            }
        }
        match improved {
            Some(a) => best = a,
            None => break,
        }
    }
    Ok(best)
}
