//! Seeded random matrices and the named example pairs.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::linalg::{c64, eigh, identity, kron, op_norm, re_part, real, zeros, ComplexMatrix, C64, ONE};
use crate::symmetry::{az_class_specs, permutation_symmetry, symmetrize, tensor_average, AzClass, ClassOperator, MapKind, PhaseSpec, SymmetryMap};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Ginibre matrix, entries `(g + ih)/√2`.
pub fn random_complex(n: usize, rng: &mut Rng) -> ComplexMatrix {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(n, n, |_, _| c64(s * gaussian(rng), s * gaussian(rng)))
}

pub fn random_real(n: usize, rng: &mut Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| real(gaussian(rng)))
}

fn normalized(a: ComplexMatrix) -> ComplexMatrix {
    let s = op_norm(&a);
    if s > 0.0 {
        a / real(s)
    } else {
        a
    }
}

/// Hermitian with operator norm 1.
pub fn random_hermitian(n: usize, rng: &mut Rng) -> ComplexMatrix {
    normalized(re_part(&random_complex(n, rng)))
}

/// Operator norm 1.
pub fn random_contraction(n: usize, rng: &mut Rng) -> ComplexMatrix {
    normalized(random_complex(n, rng))
}

/// Haar unitary: QR of a Ginibre matrix with the phases of `R`'s diagonal
/// moved into `Q`.
pub fn random_unitary(n: usize, rng: &mut Rng) -> ComplexMatrix {
    haar(random_complex(n, rng))
}

/// Haar orthogonal matrix (real entries).
pub fn random_orthogonal(n: usize, rng: &mut Rng) -> ComplexMatrix {
    haar(random_real(n, rng))
}

fn haar(g: ComplexMatrix) -> ComplexMatrix {
    let n = g.nrows();
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        let mut col = q.column_mut(j);
        col *= ph;
    }
    q
}

/// Divides by `max(1, ‖A‖)`.
pub fn scale_to_contraction(a: ComplexMatrix) -> ComplexMatrix {
    let s = op_norm(&a);
    if s > 1.0 {
        a / real(s)
    } else {
        a
    }
}

/// Voiculescu's pair: `U_n` the cyclic shift `e_j ↦ e_{j+1}`, and
/// `V_n = diag(ω, ω², …, ωⁿ)` with `ω = e^{2πi/n}`.
pub fn voiculescu(n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let mut u = zeros(n);
    for j in 0..n {
        u[((j + 1) % n, j)] = ONE;
    }
    let v = ComplexMatrix::from_fn(n, n, |i, j| if i == j { C64::from_polar(1.0, 2.0 * PI * (i + 1) as f64 / n as f64) } else { c64(0.0, 0.0) });
    (u, v)
}

/// Davidson's `(n²+1)`-dimensional pair: `A_n = diag(0, 1/n², …, 1)` and
/// the weighted shift `B_n` with subdiagonal `1/n, …, (n-1)/n, 1, …, 1,
/// (n-1)/n, …, 1/n`.
pub fn davidson(n: usize) -> (ComplexMatrix, ComplexMatrix) {
    let m = n * n + 1;
    let n2 = (n * n) as f64;
    let a = ComplexMatrix::from_fn(m, m, |i, j| if i == j { real(i as f64 / n2) } else { c64(0.0, 0.0) });
    let mut b = zeros(m);
    for k in 0..n * n {
        let w = if k + 1 < n {
            (k + 1) as f64 / n as f64
        } else if n * n - k < n {
            (n * n - k) as f64 / n as f64
        } else {
            1.0
        };
        b[(k + 1, k)] = real(w);
    }
    (a, b)
}

/// Sequential orbit averages over order-2 (or given-order) phase specs.
pub fn symmetrize_specs(a: &ComplexMatrix, specs: &[PhaseSpec]) -> Result<ComplexMatrix> {
    let mut out = a.clone();
    for s in specs {
        let order = crate::symmetry::order_of(&s.map, 64).ok_or_else(|| invalid("map order not found"))?;
        out = symmetrize(&s.map, &out, s.phase, order)?;
    }
    Ok(out)
}

fn symmetrize_hermitian(a: &ComplexMatrix, specs: &[PhaseSpec]) -> Result<ComplexMatrix> {
    // two passes wash out rounding between non-orthogonal averaging steps
    let once = re_part(&symmetrize_specs(a, specs)?);
    Ok(re_part(&symmetrize_specs(&once, specs)?))
}

/// A randomized pair for one Altland–Zirnbauer class. `h` carries the class
/// (anti)symmetries, `x` and `y` are positions; `[x, h]` and `[y, h]` are
/// of order `delta`.
#[derive(Clone, Debug)]
pub struct AzPair {
    pub class: AzClass,
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub h: ComplexMatrix,
    pub ops: Vec<ClassOperator>,
    pub delta: f64,
}

impl AzPair {
    pub fn x_specs(&self) -> Vec<PhaseSpec> {
        self.ops.iter().map(ClassOperator::x_spec).collect()
    }

    pub fn h_specs(&self) -> Vec<PhaseSpec> {
        self.ops.iter().map(ClassOperator::h_spec).collect()
    }
}

/// Odd snapping of eigenvalues to `{0, ±1/4, ±3/4}`.
fn snap_levels(vals: &[f64]) -> Vec<f64> {
    let mut abs: Vec<f64> = vals.iter().map(|v| v.abs()).filter(|&v| v > 1e-9).collect();
    abs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut tau = f64::INFINITY;
    if abs.len() > 1 {
        let mid = abs.len() / 2;
        // cut at the widest gap near the median so ± partners land together
        let lo = mid.saturating_sub(2).max(1);
        let hi = (mid + 2).min(abs.len() - 1);
        let k = (lo..=hi).max_by(|&i, &j| (abs[i] - abs[i - 1]).partial_cmp(&(abs[j] - abs[j - 1])).unwrap()).unwrap();
        tau = 0.5 * (abs[k] + abs[k - 1]);
    }
    vals.iter()
        .map(|&v| {
            if v.abs() <= 1e-9 {
                0.0
            } else {
                v.signum() * if v.abs() < tau { 0.25 } else { 0.75 }
            }
        })
        .collect()
}

/// Class pair of size `n`; `delta = None` draws it log-uniformly from
/// `[1e-6, 1e-3]`.
pub fn az_pair(class: AzClass, n: usize, delta: Option<f64>, seed: u64) -> Result<AzPair> {
    let ops = az_class_specs(class, n, Some(seed ^ 0x9e37_79b9_7f4a_7c15))?;
    let mut rng = rng(seed);
    let h_specs: Vec<PhaseSpec> = ops.iter().map(ClassOperator::h_spec).collect();
    let x_specs: Vec<PhaseSpec> = ops.iter().map(ClassOperator::x_spec).collect();

    let hr = symmetrize_hermitian(&random_hermitian(n, &mut rng), &h_specs)?;
    let (vals, vecs) = eigh(&hr)?;
    let snapped = snap_levels(&vals);
    let levels: Vec<C64> = snapped.iter().map(|&v| real(v)).collect();
    let h0 = symmetrize_hermitian(&crate::linalg::conjugate_diag(&vecs, &levels), &h_specs)?;

    let xr = symmetrize_hermitian(&random_hermitian(n, &mut rng), &x_specs)?;
    let d0 = crate::linalg::spectral_decompose(&h0, crate::linalg::SpectralKind::Hermitian, 1e-6)?;
    let mut x0 = zeros(n);
    for p in &d0.projections {
        x0 += p * &xr * p;
    }
    let x0 = symmetrize_hermitian(&x0, &x_specs)?;
    let x0sq = &x0 * &x0;
    let y0 = &x0sq - identity(n) * real(0.5 * op_norm(&x0sq));

    let delta = match delta {
        Some(d) => d,
        None => {
            let t: f64 = rng.random();
            10f64.powf(-6.0 + 3.0 * t)
        }
    };
    if !(delta >= 0.0) {
        return Err(invalid("delta must be nonnegative"));
    }
    let mut perturb = |base: &ComplexMatrix, specs: &[PhaseSpec]| -> Result<ComplexMatrix> {
        let p = symmetrize_hermitian(&random_hermitian(n, &mut rng), specs)?;
        Ok(scale_to_contraction(base + p * real(delta)))
    };
    let h = perturb(&h0, &h_specs)?;
    let x = perturb(&x0, &x_specs)?;
    let y = perturb(&y0, &x_specs)?;
    Ok(AzPair { class, x, y, h, ops, delta })
}

/// `(T_N(A₁), T_N(A₂))` for random hermitian contractions `A_i` on `C^d`,
/// with the transposition `(1 2)` and the cycle `(1 … N)` as declared
/// symmetries.
pub fn tensor_avg_pair(d: usize, n: usize, seed: u64) -> Result<(ComplexMatrix, ComplexMatrix, Vec<PhaseSpec>)> {
    if n < 2 {
        return Err(invalid("N must be at least 2"));
    }
    let mut rng = rng(seed);
    let a1 = random_hermitian(d, &mut rng);
    let a2 = random_hermitian(d, &mut rng);
    let mut swap: Vec<usize> = (0..n).collect();
    swap.swap(0, 1);
    let cycle: Vec<usize> = (0..n).map(|k| (k + 1) % n).collect();
    let specs = alloc::vec![PhaseSpec::new(permutation_symmetry(&swap, d)?, ONE), PhaseSpec::new(permutation_symmetry(&cycle, d)?, ONE)];
    Ok((tensor_average(&a1, n)?, tensor_average(&a2, n)?, specs))
}

/// An invertible almost-normal contraction `A` with `φ(A) = ζA` for
/// `φ = conj by W`, `W = V_n ⊗ I_k`, `ζ = e^{-2πi/n}`; with `real` it is
/// also entrywise real, giving the dihedral pair `(φ, conjugation)`.
#[derive(Clone, Debug)]
pub struct PhaseInstance {
    pub a: ComplexMatrix,
    pub rot: SymmetryMap,
    pub zeta: C64,
    pub order: usize,
    pub reflection: Option<SymmetryMap>,
}

pub fn phase_instance(order: usize, k: usize, delta: f64, real_entries: bool, seed: u64) -> Result<PhaseInstance> {
    if order < 2 || k == 0 {
        return Err(invalid("order ≥ 2 and block size ≥ 1 required"));
    }
    let mut rng = rng(seed);
    let (un, vn) = voiculescu(order);
    let w = kron(&vn, &identity(k));
    let rot = SymmetryMap::new(MapKind::LM, w)?;
    let zeta = C64::from_polar(1.0, -2.0 * PI / order as f64);
    let m = {
        let r = if real_entries { random_orthogonal(k, &mut rng) } else { random_unitary(k, &mut rng) };
        let d: Vec<C64> = (0..k)
            .map(|_| {
                let t: f64 = rng.random();
                let modulus = 0.4 + 0.6 * t;
                if real_entries {
                    let s: bool = rng.random();
                    real(if s { modulus } else { -modulus })
                } else {
                    let ph: f64 = rng.random();
                    C64::from_polar(modulus, 2.0 * PI * ph)
                }
            })
            .collect();
        crate::linalg::conjugate_diag(&r, &d)
    };
    // block-diagonal in the eigenspaces of W, hence commuting with W
    let mut q = zeros(order * k);
    for j in 0..order {
        let b = if real_entries { random_orthogonal(k, &mut rng) } else { random_unitary(k, &mut rng) };
        q.view_mut((j * k, j * k), (k, k)).copy_from(&b);
    }
    let a0 = &q * kron(&un, &m) * q.adjoint();
    let mut pert = if real_entries { random_real(order * k, &mut rng) } else { random_complex(order * k, &mut rng) };
    pert = symmetrize(&rot, &pert, zeta, order)?;
    let reflection = if real_entries {
        pert = pert.map(|z| real(z.re));
        Some(SymmetryMap::conjugation(order * k))
    } else {
        None
    };
    let pert = normalized(pert) * real(delta);
    let a = scale_to_contraction(a0 + pert);
    Ok(PhaseInstance { a, rot, zeta, order, reflection })
}
