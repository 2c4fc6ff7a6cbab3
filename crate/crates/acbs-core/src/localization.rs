//! Localization operators `L_X^Δ(B) = Σ_n ρ_n(2X/Δ) B ρ_n(2X/Δ)` with
//! `ρ_n(x) = ρ(x - n)`, plus the normal and phase-equivariant variants.
//!
//! All three are Hadamard multipliers in an eigenbasis of the reference
//! operator: with `X = V diag(x) V*`,
//! `L(B) = V (K ∘ V*BV) V*` where `K_ij = Σ_n ρ_n(2x_i/Δ) ρ_n(2x_j/Δ)`.
//! Only the (at most two) `n` with `|2x/Δ - n| < 1` contribute.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::linalg::{check_kind, eig_normal, eigh, ensure_same_dim, ensure_square, ComplexMatrix, SpectralKind, C64};
use crate::rho::rho;

/// Nonzero `(n, ρ(t - n))` for a point `t`.
fn bumps(t: f64) -> [(i64, f64); 2] {
    let n0 = t.floor() as i64;
    [(n0, rho(t - n0 as f64)), (n0 + 1, rho(t - (n0 + 1) as f64))]
}

/// Kernel of `L_Y^Δ` for `Y` diagonal with entries `y`.
fn kernel(y: &[f64], delta: f64) -> Vec<f64> {
    let n = y.len();
    let b: Vec<[(i64, f64); 2]> = y.iter().map(|&v| bumps(2.0 * v / delta)).collect();
    let mut k = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for &(ni, vi) in &b[i] {
                for &(nj, vj) in &b[j] {
                    if ni == nj {
                        s += vi * vj;
                    }
                }
            }
            k[i * n + j] = s;
        }
    }
    k
}

/// A product of localization kernels sharing one eigenbasis.
#[derive(Clone, Debug)]
pub struct Localizer {
    vectors: ComplexMatrix,
    kernel: Vec<f64>,
}

impl Localizer {
    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn apply(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        ensure_square(b)?;
        ensure_same_dim(b, &self.vectors)?;
        let n = self.dim();
        let v = &self.vectors;
        let mut m = v.adjoint() * b * v;
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] *= self.kernel[i * n + j];
            }
        }
        Ok(v * m * v.adjoint())
    }

    /// Kernel entry `K_ij` (eigenbasis indices).
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.kernel[i * self.dim() + j]
    }

    fn multiply(&mut self, other: &[f64]) {
        for (a, b) in self.kernel.iter_mut().zip(other) {
            *a *= b;
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid("Δ must be positive and finite"));
    }
    Ok(())
}

pub fn localizer_sa(x: &ComplexMatrix, delta: f64) -> Result<Localizer> {
    check_delta(delta)?;
    check_kind(x, SpectralKind::Hermitian)?;
    let (vals, vectors) = eigh(x)?;
    Ok(Localizer { kernel: kernel(&vals, delta), vectors })
}

/// `Π_{k<n} L_{Re(ω^k A)}^{Δ/√2} ∘ L_{Im(ω^k A)}^{Δ/√2}` with `ω = e^{2πi/n}`.
pub fn localizer_phase(a: &ComplexMatrix, delta: f64, n: usize) -> Result<Localizer> {
    check_delta(delta)?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    check_kind(a, SpectralKind::Normal)?;
    let (vals, vectors) = eig_normal(a)?;
    let d = delta * FRAC_1_SQRT_2;
    let mut loc = Localizer { kernel: alloc::vec![1.0; vals.len() * vals.len()], vectors };
    for k in 0..n {
        let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        let rotated: Vec<C64> = vals.iter().map(|&z| w * z).collect();
        let re: Vec<f64> = rotated.iter().map(|z| z.re).collect();
        let im: Vec<f64> = rotated.iter().map(|z| z.im).collect();
        loc.multiply(&kernel(&re, d));
        loc.multiply(&kernel(&im, d));
    }
    Ok(loc)
}

pub fn localize_sa(x: &ComplexMatrix, b: &ComplexMatrix, delta: f64) -> Result<ComplexMatrix> {
    localizer_sa(x, delta)?.apply(b)
}

/// `L_{Re A}^{Δ/√2} ∘ L_{Im A}^{Δ/√2}`.
pub fn localize_normal(a: &ComplexMatrix, b: &ComplexMatrix, delta: f64) -> Result<ComplexMatrix> {
    localizer_phase(a, delta, 1)?.apply(b)
}

pub fn localize_phase(a: &ComplexMatrix, b: &ComplexMatrix, delta: f64, n: usize) -> Result<ComplexMatrix> {
    localizer_phase(a, delta, n)?.apply(b)
}

/// Upper bound on `‖L(B) - B‖` for the phase localizer with `n` factors
/// (`n = 0` means the self-adjoint operator).
pub fn distance_bound(crho: f64, delta: f64, n: usize, comm_ab: f64, comm_astar_b: f64) -> f64 {
    if n == 0 {
        2.0 * crho / delta * comm_ab
    } else {
        2.0 * n as f64 * core::f64::consts::SQRT_2 * crho / delta * (comm_ab + comm_astar_b)
    }
}

