//! Symmetry maps on `M_n(C)`.
//!
//! Every symmetry map is conjugation by a unitary `W` composed with one of
//! identity, transpose, entrywise conjugation or adjoint:
//!
//! | kind | `φ(A)`    | (linear, multiplicative) |
//! |------|-----------|--------------------------|
//! | LM   | `W*AW`    | (+1, +1)                 |
//! | LAm  | `W*AᵀW`   | (+1, -1)                 |
//! | ClM  | `W*ĀW`    | (-1, +1)                 |
//! | ClAm | `W*A*W`   | (-1, -1)                 |
//!
//! Kinds multiply coordinatewise under composition. Equality and
//! commutation of maps are decided on the `d²` matrix units.

use alloc::vec::Vec;
use core::fmt;


use crate::error::{invalid, precondition, Error, Result};
use crate::linalg::{c64, ensure_same_dim, ensure_square, identity, kron, op_norm, real, unitary_defect, zeros, ComplexMatrix, C64, KIND_TOL, ONE};

/// Entrywise tolerance for deciding map equality on matrix units.
pub const MAP_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MapKind {
    LM,
    LAm,
    ClM,
    ClAm,
}

impl MapKind {
    pub const ALL: [MapKind; 4] = [MapKind::LM, MapKind::LAm, MapKind::ClM, MapKind::ClAm];

    /// `(linear, multiplicative)` as `±1`.
    pub fn signs(self) -> (i8, i8) {
        match self {
            MapKind::LM => (1, 1),
            MapKind::LAm => (1, -1),
            MapKind::ClM => (-1, 1),
            MapKind::ClAm => (-1, -1),
        }
    }

    pub fn from_signs(linear: i8, mult: i8) -> Self {
        match (linear > 0, mult > 0) {
            (true, true) => MapKind::LM,
            (true, false) => MapKind::LAm,
            (false, true) => MapKind::ClM,
            (false, false) => MapKind::ClAm,
        }
    }

    pub fn is_linear(self) -> bool {
        self.signs().0 > 0
    }

    pub fn is_multiplicative(self) -> bool {
        self.signs().1 > 0
    }

    pub fn compose(self, other: MapKind) -> MapKind {
        let (a, b) = self.signs();
        let (c, d) = other.signs();
        MapKind::from_signs(a * c, b * d)
    }

    pub fn twisted(self) -> MapKind {
        self.compose(MapKind::ClAm)
    }

    pub fn name(self) -> &'static str {
        match self {
            MapKind::LM => "LM",
            MapKind::LAm => "LAm",
            MapKind::ClM => "ClM",
            MapKind::ClAm => "ClAm",
        }
    }

    pub fn parse(s: &str) -> Option<MapKind> {
        MapKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// The underlying involution: identity, transpose, conjugate, adjoint.
    fn tau(self, a: &ComplexMatrix) -> ComplexMatrix {
        match self {
            MapKind::LM => a.clone(),
            MapKind::LAm => a.transpose(),
            MapKind::ClM => a.conjugate(),
            MapKind::ClAm => a.adjoint(),
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryMap {
    pub kind: MapKind,
    pub w: ComplexMatrix,
}

impl SymmetryMap {
    pub fn new(kind: MapKind, w: ComplexMatrix) -> Result<Self> {
        ensure_square(&w)?;
        let d = unitary_defect(&w);
        if d > KIND_TOL {
            return Err(Error::KindViolated { kind: "unitary", defect: d });
        }
        Ok(SymmetryMap { kind, w })
    }

    pub fn identity(n: usize) -> Self {
        SymmetryMap { kind: MapKind::LM, w: identity(n) }
    }

    pub fn transpose(n: usize) -> Self {
        SymmetryMap { kind: MapKind::LAm, w: identity(n) }
    }

    pub fn conjugation(n: usize) -> Self {
        SymmetryMap { kind: MapKind::ClM, w: identity(n) }
    }

    pub fn adjoint(n: usize) -> Self {
        SymmetryMap { kind: MapKind::ClAm, w: identity(n) }
    }

    /// `A ↦ W*AW`.
    pub fn conj_by(w: ComplexMatrix) -> Result<Self> {
        SymmetryMap::new(MapKind::LM, w)
    }

    pub fn dim(&self) -> usize {
        self.w.nrows()
    }

    pub fn is_linear(&self) -> bool {
        self.kind.is_linear()
    }

    pub fn apply(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        ensure_square(a)?;
        ensure_same_dim(a, &self.w)?;
        Ok(self.act(a))
    }

    /// [`apply`](Self::apply) without dimension checks.
    pub fn act(&self, a: &ComplexMatrix) -> ComplexMatrix {
        self.w.adjoint() * self.kind.tau(a) * &self.w
    }

    /// `φ(c·I)` is `c·I` or `c̄·I`.
    pub fn act_scalar(&self, c: C64) -> C64 {
        if self.is_linear() {
            c
        } else {
            c.conj()
        }
    }

    /// Image of the matrix unit `E_ij`, in `O(d²)`.
    pub fn unit_image(&self, i: usize, j: usize) -> ComplexMatrix {
        let (p, q) = match self.kind {
            MapKind::LM | MapKind::ClM => (i, j),
            MapKind::LAm | MapKind::ClAm => (j, i),
        };
        let n = self.dim();
        let w = &self.w;
        ComplexMatrix::from_fn(n, n, |a, b| w[(p, a)].conj() * w[(q, b)])
    }
}

/// `m1 ∘ m2`. With `m_k(A) = W_k* τ_k(A) W_k`, the composite is
/// `V* (τ_1τ_2)(A) V` where `V = W_2 W_1` if `τ_1` is the identity or the
/// adjoint and `V = W̄_2 W_1` if `τ_1` is the transpose or the conjugate.
pub fn compose(m1: &SymmetryMap, m2: &SymmetryMap) -> Result<SymmetryMap> {
    ensure_same_dim(&m1.w, &m2.w)?;
    Ok(compose_unchecked(m1, m2))
}

fn compose_unchecked(m1: &SymmetryMap, m2: &SymmetryMap) -> SymmetryMap {
    let w = match m1.kind {
        MapKind::LM | MapKind::ClAm => &m2.w * &m1.w,
        MapKind::LAm | MapKind::ClM => m2.w.conjugate() * &m1.w,
    };
    SymmetryMap { kind: m1.kind.compose(m2.kind), w }
}

/// `φ_*(A) = φ(A*)`.
pub fn star_twist(m: &SymmetryMap) -> SymmetryMap {
    SymmetryMap { kind: m.kind.twisted(), w: m.w.clone() }
}

/// `φ^k` (`φ^0` is the identity).
pub fn power(m: &SymmetryMap, k: usize) -> SymmetryMap {
    let mut out = SymmetryMap::identity(m.dim());
    for _ in 0..k {
        out = compose_unchecked(m, &out);
    }
    out
}

/// Equality as superoperators, checked on every matrix unit.
pub fn maps_equal(m1: &SymmetryMap, m2: &SymmetryMap, tol: f64) -> bool {
    if m1.kind != m2.kind || m1.dim() != m2.dim() {
        return false;
    }
    let n = m1.dim();
    for i in 0..n {
        for j in 0..n {
            let a = m1.unit_image(i, j);
            let b = m2.unit_image(i, j);
            if a.iter().zip(b.iter()).any(|(x, y)| (x - y).norm() > tol) {
                return false;
            }
        }
    }
    true
}

pub fn is_identity_map(m: &SymmetryMap) -> bool {
    maps_equal(m, &SymmetryMap::identity(m.dim()), MAP_TOL)
}

/// Least `k ≤ max_k` with `φ^k = id`.
pub fn order_of(m: &SymmetryMap, max_k: usize) -> Option<usize> {
    let mut p = m.clone();
    for k in 1..=max_k {
        if is_identity_map(&p) {
            return Some(k);
        }
        p = compose_unchecked(m, &p);
    }
    None
}

/// `‖φ(A) - ζA‖`.
pub fn phase_defect(m: &SymmetryMap, a: &ComplexMatrix, zeta: C64) -> f64 {
    op_norm(&(m.act(a) - a * zeta))
}

/// Orbit average `(1/m) Σ_j ζ^{-j} φ^j(A)`, which is `φ`-symmetric with
/// phase `ζ`. For conjugate-linear `φ` the phase is first rotated away
/// (`θ² = ζ`), so any unit `ζ` is allowed; for linear `φ`, `ζ^m = 1` is
/// required.
pub fn symmetrize(m: &SymmetryMap, a: &ComplexMatrix, zeta: C64, order: usize) -> Result<ComplexMatrix> {
    ensure_same_dim(a, &m.w)?;
    if order == 0 {
        return Err(invalid("order must be positive"));
    }
    if (zeta.norm() - 1.0).abs() > 1e-12 {
        return Err(invalid("phase must have unit modulus"));
    }
    if !is_identity_map(&power(m, order)) {
        return Err(precondition("map order does not divide the given order"));
    }
    if m.is_linear() {
        if (zeta.powu(order as u32) - ONE).norm() > 1e-10 {
            return Err(precondition("phase^order != 1, no nonzero fixed point exists"));
        }
        let mut acc = zeros(a.nrows());
        let mut term = a.clone();
        let zinv = zeta.conj();
        let mut coef = ONE;
        for _ in 0..order {
            acc += &term * coef;
            term = m.act(&term);
            coef *= zinv;
        }
        Ok(acc / real(order as f64))
    } else {
        let theta = zeta.sqrt();
        let rotated = a * theta;
        let mut acc = zeros(a.nrows());
        let mut term = rotated;
        for _ in 0..order {
            acc += &term;
            term = m.act(&term);
        }
        Ok(acc / real(order as f64) / theta)
    }
}

pub fn commute_maps(m1: &SymmetryMap, m2: &SymmetryMap) -> bool {
    if m1.dim() != m2.dim() {
        return false;
    }
    maps_equal(&compose_unchecked(m1, m2), &compose_unchecked(m2, m1), MAP_TOL)
}

/// Each non-LM kind present has a representative commuting with all of `S`.
pub fn is_admissible(s: &[SymmetryMap]) -> bool {
    admissible_representatives(s).is_some()
}

fn admissible_representatives(s: &[SymmetryMap]) -> Option<Vec<(MapKind, usize)>> {
    let mut reps = Vec::new();
    for kind in [MapKind::LAm, MapKind::ClM, MapKind::ClAm] {
        let members: Vec<usize> = (0..s.len()).filter(|&i| s[i].kind == kind).collect();
        if members.is_empty() {
            continue;
        }
        let rep = members.into_iter().find(|&i| s.iter().all(|m| commute_maps(&s[i], m)))?;
        reps.push((kind, rep));
    }
    Some(reps)
}

/// Replaces an admissible collection by LM maps `S0` and at most two
/// commuting order-2 maps `S1` with the same joint fixed set. With two
/// non-LM kinds present, `S1` is the pair of representatives themselves.
pub fn reduce_collection(s: &[SymmetryMap]) -> Result<(Vec<SymmetryMap>, Vec<SymmetryMap>)> {
    if let Some(m) = s.first() {
        if s.iter().any(|x| x.dim() != m.dim()) {
            return Err(invalid("maps of different dimensions"));
        }
    }
    let reps = admissible_representatives(s).ok_or_else(|| precondition("collection is not admissible"))?;
    let mut s0: Vec<SymmetryMap> = s.iter().filter(|m| m.kind == MapKind::LM).cloned().collect();
    let s1: Vec<SymmetryMap> = reps.iter().take(2).map(|&(_, i)| s[i].clone()).collect();
    let rep_of = |k: MapKind| reps.iter().find(|r| r.0 == k).map(|r| r.1);
    for m in s.iter().filter(|m| m.kind != MapKind::LM) {
        let image = if reps.len() == 3 && rep_of(m.kind).is_none_or(|i| reps.iter().position(|r| r.1 == i) == Some(2)) {
            // the third kind is reached through both representatives
            let ab = compose_unchecked(&s[reps[0].1], &s[reps[1].1]);
            compose_unchecked(m, &ab)
        } else {
            let r = rep_of(m.kind).expect("representative exists for every present kind");
            compose_unchecked(m, &s[r])
        };
        debug_assert_eq!(image.kind, MapKind::LM);
        s0.push(image);
    }
    let mut dedup: Vec<SymmetryMap> = Vec::new();
    for m in s0 {
        if !dedup.iter().any(|x| maps_equal(x, &m, MAP_TOL)) {
            dedup.push(m);
        }
    }
    Ok((dedup, s1))
}

/// A map together with the phase an operator is declared to carry.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpec {
    pub map: SymmetryMap,
    pub phase: C64,
}

impl PhaseSpec {
    pub fn new(map: SymmetryMap, phase: C64) -> Self {
        PhaseSpec { map, phase }
    }

    pub fn defect(&self, a: &ComplexMatrix) -> f64 {
        phase_defect(&self.map, a, self.phase)
    }
}

/// `Γ = [[0, I], [-I, 0]]` for even `n`.
pub fn gamma(n: usize) -> Result<ComplexMatrix> {
    if n % 2 != 0 || n == 0 {
        return Err(invalid("Γ needs an even positive dimension"));
    }
    let k = n / 2;
    let mut g = zeros(n);
    for i in 0..k {
        g[(i, k + i)] = ONE;
        g[(k + i, i)] = -ONE;
    }
    Ok(g)
}

/// The LAm map with `W = Γ`: blocks `[[A, B], [C, D]] ↦ [[Dᵀ, -Bᵀ], [-Cᵀ, Aᵀ]]`.
pub fn sharp_map(n: usize) -> Result<SymmetryMap> {
    Ok(SymmetryMap { kind: MapKind::LAm, w: gamma(n)? })
}

pub const MAX_TENSOR_DIM: usize = 4096;

fn tensor_dim(d: usize, n: usize) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..n {
        total = total.checked_mul(d).filter(|&t| t <= MAX_TENSOR_DIM).ok_or_else(|| invalid("tensor dimension exceeds the size budget"))?;
    }
    Ok(total)
}

/// `S_σ(A) = U_σ A U_σ⁻¹` where `U_σ` sends tensor factor `k` to slot `σ(k)`
/// (`σ` given as zero-based images).
pub fn permutation_symmetry(sigma: &[usize], d: usize) -> Result<SymmetryMap> {
    let n = sigma.len();
    let mut seen = alloc::vec![false; n];
    for &s in sigma {
        if s >= n || seen[s] {
            return Err(invalid("not a permutation"));
        }
        seen[s] = true;
    }
    let total = tensor_dim(d, n)?;
    let mut u = zeros(total);
    let mut digits = alloc::vec![0usize; n];
    let mut out = alloc::vec![0usize; n];
    for idx in 0..total {
        let mut r = idx;
        for k in (0..n).rev() {
            digits[k] = r % d;
            r /= d;
        }
        for k in 0..n {
            out[sigma[k]] = digits[k];
        }
        let j = out.iter().fold(0usize, |acc, &x| acc * d + x);
        u[(j, idx)] = ONE;
    }
    Ok(SymmetryMap { kind: MapKind::LM, w: u.adjoint() })
}

/// `(1/N) Σ_k I^{⊗(k-1)} ⊗ A ⊗ I^{⊗(N-k)}`.
pub fn tensor_average(a: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    ensure_square(a)?;
    if n == 0 {
        return Err(invalid("N must be at least 1"));
    }
    let d = a.nrows();
    let total = tensor_dim(d, n)?;
    let id = identity(d);
    let mut acc = zeros(total);
    for k in 0..n {
        let mut t = if k == 0 { a.clone() } else { id.clone() };
        for j in 1..n {
            t = kron(&t, if j == k { a } else { &id });
        }
        acc += t;
    }
    Ok(acc / real(n as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AzClass {
    A,
    AIII,
    AI,
    BDI,
    D,
    DIII,
    AII,
    CII,
    C,
    CI,
}

impl AzClass {
    pub const ALL: [AzClass; 10] =
        [AzClass::A, AzClass::AIII, AzClass::AI, AzClass::BDI, AzClass::D, AzClass::DIII, AzClass::AII, AzClass::CII, AzClass::C, AzClass::CI];

    pub fn name(self) -> &'static str {
        match self {
            AzClass::A => "A",
            AzClass::AIII => "AIII",
            AzClass::AI => "AI",
            AzClass::BDI => "BDI",
            AzClass::D => "D",
            AzClass::DIII => "DIII",
            AzClass::AII => "AII",
            AzClass::CII => "CII",
            AzClass::C => "C",
            AzClass::CI => "CI",
        }
    }

    pub fn parse(s: &str) -> Option<AzClass> {
        AzClass::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassRole {
    /// Time reversal: commutes with both `X` and `H`.
    T,
    /// Particle-hole: `X` symmetric, `H` antisymmetric.
    C,
    /// Chiral: `X` symmetric, `H` antisymmetric.
    S,
}

/// One class operator, stored as its induced symmetry map, with the phases
/// it imposes on the position `X` and the Hamiltonian `H`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassOperator {
    pub role: ClassRole,
    pub map: SymmetryMap,
    pub x_phase: C64,
    pub h_phase: C64,
}

impl ClassOperator {
    pub fn x_spec(&self) -> PhaseSpec {
        PhaseSpec::new(self.map.clone(), self.x_phase)
    }

    pub fn h_spec(&self) -> PhaseSpec {
        PhaseSpec::new(self.map.clone(), self.h_phase)
    }
}

fn pm_diag(n: usize) -> ComplexMatrix {
    let plus = n.div_ceil(2);
    ComplexMatrix::from_fn(n, n, |i, j| if i != j { c64(0.0, 0.0) } else if i < plus { ONE } else { -ONE })
}

fn pauli_kron(p: [[f64; 2]; 2], block: &ComplexMatrix) -> ComplexMatrix {
    let m = ComplexMatrix::from_fn(2, 2, |i, j| real(p[i][j]));
    kron(&m, block)
}

/// Realizations of the ten Altland–Zirnbauer classes on `C^n`.
///
/// `T` and `C` are ClM maps `A ↦ W*ĀW` with `WW̄ = ±I` matching the square of
/// the antiunitary; `S` is a ClAm map with `W² = I`. Squares `-I` use `Γ`.
/// With a seed, every `W` is moved to a random basis (`W ↦ V̄WV*` for ClM,
/// `VWV*` for ClAm), which keeps squares and commutation.
pub fn az_class_specs(class: AzClass, n: usize, seed: Option<u64>) -> Result<Vec<ClassOperator>> {
    let even = |need: usize| -> Result<()> {
        if n % 2 != 0 || n < need {
            return Err(invalid("this class needs an even dimension (n ≥ 2, CII needs n ≥ 4)"));
        }
        Ok(())
    };
    if n < 2 && !matches!(class, AzClass::A | AzClass::AI | AzClass::D) {
        return Err(invalid("dimension too small for this class"));
    }
    let t_op = |w: ComplexMatrix| ClassOperator { role: ClassRole::T, map: SymmetryMap { kind: MapKind::ClM, w }, x_phase: ONE, h_phase: ONE };
    let c_op = |w: ComplexMatrix| ClassOperator { role: ClassRole::C, map: SymmetryMap { kind: MapKind::ClM, w }, x_phase: ONE, h_phase: -ONE };
    let s_op = |w: ComplexMatrix| ClassOperator { role: ClassRole::S, map: SymmetryMap { kind: MapKind::ClAm, w }, x_phase: ONE, h_phase: -ONE };
    let ops = match class {
        AzClass::A => Vec::new(),
        AzClass::AIII => alloc::vec![s_op(pm_diag(n))],
        AzClass::AI => alloc::vec![t_op(identity(n))],
        AzClass::D => alloc::vec![c_op(identity(n))],
        AzClass::AII => {
            even(2)?;
            alloc::vec![t_op(gamma(n)?)]
        }
        AzClass::C => {
            even(2)?;
            alloc::vec![c_op(gamma(n)?)]
        }
        AzClass::BDI => alloc::vec![t_op(identity(n)), c_op(pm_diag(n))],
        AzClass::CI => {
            even(2)?;
            alloc::vec![t_op(identity(n)), c_op(gamma(n)?)]
        }
        AzClass::DIII => {
            even(2)?;
            let k = n / 2;
            alloc::vec![t_op(gamma(n)?), c_op(pauli_kron([[0.0, 1.0], [1.0, 0.0]], &identity(k)))]
        }
        AzClass::CII => {
            even(4)?;
            let k = n / 2;
            alloc::vec![t_op(gamma(n)?), c_op(pauli_kron([[0.0, 1.0], [-1.0, 0.0]], &pm_diag(k)))]
        }
    };
    let Some(seed) = seed else { return Ok(ops) };
    let mut rng = crate::generate::rng(seed);
    let v = crate::generate::random_unitary(n, &mut rng);
    Ok(ops
        .into_iter()
        .map(|mut op| {
            op.map.w = match op.map.kind {
                MapKind::ClM | MapKind::LAm => v.conjugate() * &op.map.w * v.adjoint(),
                MapKind::LM | MapKind::ClAm => &v * &op.map.w * v.adjoint(),
            };
            op
        })
        .collect())
}

/// `WW̄` for ClM maps (the square of the antiunitary), `W²` otherwise.
pub fn square_of(op: &ClassOperator) -> ComplexMatrix {
    match op.map.kind {
        MapKind::ClM | MapKind::LAm => &op.map.w * op.map.w.conjugate(),
        MapKind::LM | MapKind::ClAm => &op.map.w * &op.map.w,
    }
}
