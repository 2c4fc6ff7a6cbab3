//! The bump function `ρ` behind the localization operators and the
//! constant `C_ρ` in their distance bounds.
//!
//! `p(x) = 1 - 35x⁴ + 84x⁵ - 70x⁶ + 20x⁷ = (1-x)⁴ q(x)` with
//! `q(x) = 1 + 4x + 10x² + 20x³`, and `ρ = √p` on `[0,1]`. Since
//! `1 - p(1 - t) = p(t)`, the branch `√(1 - p(x+1))` on `[-1,0]` is
//! `√p(-x)`, so `ρ` is even and everything is evaluated through the
//! factored form `(1-x)²√q(x)`, which stays smooth up to `x = 1`.

use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{precondition, Result};

pub fn p(x: f64) -> f64 {
    let x2 = x * x;
    let x4 = x2 * x2;
    1.0 - 35.0 * x4 + 84.0 * x4 * x - 70.0 * x4 * x2 + 20.0 * x4 * x2 * x
}

fn q(x: f64) -> (f64, f64, f64) {
    (1.0 + 4.0 * x + 10.0 * x * x + 20.0 * x * x * x, 4.0 + 20.0 * x + 60.0 * x * x, 20.0 + 120.0 * x)
}

/// `(ρ, ρ', ρ'')` on `[0, 1]`.
fn branch(t: f64) -> (f64, f64, f64) {
    let (q0, q1, q2) = q(t);
    let s = q0.sqrt();
    let s1 = q1 / (2.0 * s);
    let s2 = (2.0 * q0 * q2 - q1 * q1) / (4.0 * q0 * s);
    let u = 1.0 - t;
    (u * u * s, -2.0 * u * s + u * u * s1, 2.0 * s - 4.0 * u * s1 + u * u * s2)
}

pub fn rho(x: f64) -> f64 {
    let t = x.abs();
    if t >= 1.0 {
        0.0
    } else {
        branch(t).0
    }
}

pub fn rho_d1(x: f64) -> f64 {
    let t = x.abs();
    if t >= 1.0 {
        0.0
    } else if x >= 0.0 {
        branch(t).1
    } else {
        -branch(t).1
    }
}

/// `ρ''`; at `x = ±1` the one-sided limit from inside `(-1, 1)` is used.
pub fn rho_d2(x: f64) -> f64 {
    let t = x.abs();
    if t > 1.0 {
        0.0
    } else {
        branch(t).2
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CRho {
    pub c1: f64,
    pub crho: f64,
    pub points: usize,
}

pub const MIN_POINTS: usize = 10_000;

/// Composite Simpson rule for `(π/2 ∫_{-1}^{1} |ρ'' - ρ'|²)^{1/2}` with
/// `points` subintervals (rounded up to a multiple of 4 so that `-1, 0, 1`
/// are nodes); no convergence check.
pub fn c1_simpson(points: usize) -> f64 {
    let m = points.div_ceil(4) * 2;
    let g = |x: f64| {
        let d = rho_d2(x) - rho_d1(x);
        d * d
    };
    // ρ'' jumps only at -1, 0, 1, which are nodes; rho_d2(±1) is the limit
    // from inside the support, matching the adjacent panel
    let half = |a: f64, b: f64| {
        let h = (b - a) / m as f64;
        let mut s = g(a) + g(b);
        for i in 1..m {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(x);
        }
        s * h / 3.0
    };
    let integral = half(-1.0, 0.0) + half(0.0, 1.0);
    (PI / 2.0 * integral).sqrt()
}

/// Estimates `C1` and `C_ρ = √2 C1`, checking that doubling the grid moves
/// the result by less than `1e-6` relative.
pub fn c_rho_estimate(points: usize) -> Result<CRho> {
    if points < MIN_POINTS {
        return Err(precondition("at least 10^4 quadrature points are required"));
    }
    let a = c1_simpson(points);
    let b = c1_simpson(2 * points);
    if ((a - b) / b).abs() > 1e-6 {
        return Err(precondition("quadrature did not converge under grid doubling"));
    }
    Ok(CRho { c1: b, crho: core::f64::consts::SQRT_2 * b, points: 2 * points })
}

/// `C_ρ` at a resolution where the quadrature error is far below `1e-12`.
pub fn c_rho() -> f64 {
    core::f64::consts::SQRT_2 * c1_simpson(20_000)
}
