//! Partition planning, the `F`/`G` resolution of the identity, assembly of
//! `first″ = Σ a_j E_j` with the pinched `B″ = Σ E_j B̃ E_j`, and the
//! self-adjoint, unitary, normalization and polar pipelines built on them.
//!
//! Tiles `Ω^k` (length `4L`, split `L | 2L | L`) alternate with gaps `ω^k`.
//! On the circle `ω^k` is centred at `e^{2πik/n₀}` and `Ω^k` sits between
//! `ω^{k-1}` and `ω^k`; on the line `ω^k = ((6k-1)L, (6k+1)L)`. In both
//! cases `G_k = F^c_{k,+} + E_{ω^k} + F^c_{k+1,-}`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, precondition, Error, Result};
use crate::linalg::{
    angle, check_kind, comm_norm, default_cluster_tol, dist, eigh, ensure_same_dim, ensure_square, hermitian_defect, identity, im_part, normal_defect, normalize_angle,
    op_norm, polar_decompose, projection_defect, re_part, real, spectral_decompose, spectral_projection, unitary_defect, zeros, ComplexMatrix, SpectralDecomp,
    SpectralKind, C64, I, ONE,
};
use crate::localization::{localize_normal, localize_phase, localize_sa};
use crate::oracle::commuting_approx_unitary;
use crate::projection::{build_f, Window, DEFAULT_DK_CONSTANT};
use crate::region::Region;
use crate::symmetry::{compose, maps_equal, order_of, phase_defect, power, star_twist, PhaseSpec, SymmetryMap, MAP_TOL};

pub const COMMUTATION_TOL: f64 = 1e-10;
pub const TYPE_TOL: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-8;
pub const BOUND_SLACK: f64 = 1e-8;
/// Smallest partition scale; below it the tile boundaries approach the
/// resolution of the eigensolver.
pub const L_MIN: f64 = 1e-7;
pub const DELTA_RATIO: f64 = 0.999;
/// Largest `ε` for which `L = √(402ε/5) ≤ 1`.
pub const SA_EPS_MAX: f64 = 5.0 / 402.0;
/// Below this input commutator the pair is returned unchanged.
pub const COMMUTING_INPUT: f64 = 1e-12;

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Smallest `m ≥ 1` with `z^m = 1` (within `1e-9`).
pub fn root_order(z: C64, max: usize) -> Option<usize> {
    let mut p = z;
    for m in 1..=max {
        if (p - ONE).norm() <= 1e-9 {
            return Some(m);
        }
        p *= z;
    }
    None
}

fn sqrt_phase(z: C64) -> C64 {
    C64::from_polar(1.0, angle(z) / 2.0)
}

// ---------------------------------------------------------------- partitions

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Circle,
    Line,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Equivariance {
    None,
    Conjugation,
    Rotation(usize),
    Dihedral(usize),
    /// `x ↦ -x` on the line.
    Reflection,
}

impl Equivariance {
    /// Required divisor of the circle tile count.
    pub fn divisor(self) -> usize {
        match self {
            Equivariance::None | Equivariance::Conjugation | Equivariance::Reflection => 4,
            Equivariance::Rotation(n) => lcm(4, n),
            Equivariance::Dihedral(n) => 2 * n,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Tile {
    pub index: i64,
    pub window: Window,
    pub anchor: C64,
}

#[derive(Clone, Debug)]
pub struct Gap {
    pub index: i64,
    pub region: Region,
    pub anchor: C64,
}

/// A tiling of the circle or the line by tiles `Ω^k` and gaps `ω^k`.
/// Tiles are generated on demand from the index.
#[derive(Clone, Debug, PartialEq)]
pub struct ArcPartition {
    pub geometry: Geometry,
    pub l: f64,
    /// Circle: number of tiles. Line: tiles in `k_range`.
    pub n0: usize,
    pub gap_len: f64,
    /// Inclusive tile index range (`1..=n0` on the circle).
    pub k_range: (i64, i64),
    pub equivariance: Equivariance,
}

impl ArcPartition {
    /// Tile plus gap length.
    pub fn period(&self) -> f64 {
        match self.geometry {
            Geometry::Circle => 2.0 * PI / self.n0 as f64,
            Geometry::Line => 6.0 * self.l,
        }
    }

    pub fn norm_tile(&self, k: i64) -> i64 {
        match self.geometry {
            Geometry::Circle => (k - 1).rem_euclid(self.n0 as i64) + 1,
            Geometry::Line => k,
        }
    }

    pub fn norm_gap(&self, k: i64) -> i64 {
        match self.geometry {
            Geometry::Circle => k.rem_euclid(self.n0 as i64),
            Geometry::Line => k,
        }
    }

    pub fn tile(&self, k: i64) -> Tile {
        let l = self.l;
        let k = self.norm_tile(k);
        match self.geometry {
            Geometry::Circle => {
                let p = self.period();
                let start = (k - 1) as f64 * p + self.gap_len / 2.0;
                Tile {
                    index: k,
                    window: Window::Arc { start, start0: start + l, end0: start + 3.0 * l, end: start + 4.0 * l },
                    anchor: C64::from_polar(1.0, (k as f64 - 0.5) * p),
                }
            }
            Geometry::Line => {
                let lo = (6 * k - 5) as f64 * l;
                Tile { index: k, window: Window::Line { lo, lo0: lo + l, hi0: lo + 3.0 * l, hi: lo + 4.0 * l }, anchor: real((6 * k - 3) as f64 * l) }
            }
        }
    }

    /// The open gap between tile `k` and tile `k + 1`.
    pub fn gap(&self, k: i64) -> Gap {
        let k = self.norm_gap(k);
        let left = self.tile(k).window;
        let right = self.tile(k + 1).window;
        match (left, right) {
            (Window::Arc { end, .. }, Window::Arc { start, .. }) => {
                let s = normalize_angle(end);
                Gap { index: k, region: Region::open_arc(s, normalize_angle(start - s)), anchor: C64::from_polar(1.0, k as f64 * self.period()) }
            }
            (Window::Line { hi, .. }, Window::Line { lo, .. }) => Gap { index: k, region: Region::open(hi, lo), anchor: real(6.0 * k as f64 * self.l) },
            _ => unreachable!("tiles share the geometry"),
        }
    }

    pub fn tiles(&self) -> impl Iterator<Item = Tile> + '_ {
        (self.k_range.0..=self.k_range.1).map(move |k| self.tile(k))
    }

    pub fn gaps(&self) -> impl Iterator<Item = Gap> + '_ {
        let (lo, hi) = match self.geometry {
            Geometry::Circle => (0, self.n0 as i64 - 1),
            Geometry::Line => (self.k_range.0 - 1, self.k_range.1),
        };
        (lo..=hi).map(move |k| self.gap(k))
    }

    /// Tiles whose closure may contain `z` (the tile around it and both
    /// neighbours).
    pub fn tiles_near(&self, z: C64) -> [i64; 3] {
        let k = match self.geometry {
            Geometry::Circle => (normalize_angle(angle(z)) / self.period()).floor() as i64 + 1,
            Geometry::Line => (z.re / self.period()).floor() as i64 + 1,
        };
        [self.norm_tile(k - 1), self.norm_tile(k), self.norm_tile(k + 1)]
    }

    pub fn tile_for_anchor(&self, z: C64) -> i64 {
        match self.geometry {
            Geometry::Circle => self.norm_tile((normalize_angle(angle(z)) / self.period() + 0.5).round() as i64),
            Geometry::Line => ((z.re / self.l + 3.0) / 6.0).round() as i64,
        }
    }

    pub fn gap_for_anchor(&self, z: C64) -> i64 {
        match self.geometry {
            Geometry::Circle => self.norm_gap((normalize_angle(angle(z)) / self.period()).round() as i64),
            Geometry::Line => (z.re / self.period()).round() as i64,
        }
    }

    /// Order in which tiles are offered as fundamental representatives.
    fn priority(&self, k: i64) -> (bool, i64) {
        match self.geometry {
            Geometry::Circle => (false, k),
            Geometry::Line => (k < 1, k.abs()),
        }
    }
}

/// Tiling of the line with tiles of length `4L` and gaps of length `2L`,
/// `ω⁰` centred at `0`, covering `[lo - 6L, hi + 6L]`. With `antisymmetric`
/// the index range is symmetric under `k ↦ 1 - k`.
pub fn plan_line_partition(l: f64, lo: f64, hi: f64, antisymmetric: bool) -> Result<ArcPartition> {
    if !(l > 0.0) || !l.is_finite() {
        return Err(invalid("L must be positive and finite"));
    }
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid("need finite lo ≤ hi"));
    }
    let mut kmin = ((lo / l - 1.0) / 6.0).floor() as i64;
    let mut kmax = ((hi / l + 7.0) / 6.0).ceil() as i64;
    if antisymmetric {
        let k = kmax.max(1 - kmin);
        kmin = 1 - k;
        kmax = k;
    }
    Ok(ArcPartition {
        geometry: Geometry::Line,
        l,
        n0: (kmax - kmin + 1) as usize,
        gap_len: 2.0 * l,
        k_range: (kmin, kmax),
        equivariance: if antisymmetric { Equivariance::Reflection } else { Equivariance::None },
    })
}

fn circle_with(n0: usize, l: f64, eq: Equivariance) -> ArcPartition {
    ArcPartition { geometry: Geometry::Circle, l, n0, gap_len: 2.0 * PI / n0 as f64 - 4.0 * l, k_range: (1, n0 as i64), equivariance: eq }
}

/// Largest feasible `L ≤ l_target`: `2π = n₀(4L + g)` with `g ∈ [2L, 3L]`
/// and `n₀` a multiple of the mode's divisor.
pub fn plan_circle_partition(l_target: f64, eq: Equivariance) -> Result<ArcPartition> {
    if !(l_target > 0.0) || !l_target.is_finite() {
        return Err(invalid("L_target must be positive and finite"));
    }
    match eq {
        Equivariance::Rotation(n) | Equivariance::Dihedral(n) if n < 2 => return Err(invalid("rotation order must be at least 2")),
        Equivariance::Reflection => return Err(invalid("reflection equivariance lives on the line")),
        _ => {}
    }
    let d = eq.divisor();
    let l_max = 2.0 * PI / (6.0 * d as f64);
    let (n0, l) = if l_target >= l_max {
        (d, l_max)
    } else {
        let m = (2.0 * PI / (7.0 * l_target * d as f64) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let n0 = m * d;
        (n0, l_target.min(2.0 * PI / (6.0 * n0 as f64)))
    };
    if l < L_MIN {
        return Err(precondition(&format!("no feasible partition above the floor L_min = {L_MIN:e}")));
    }
    Ok(circle_with(n0, l, eq))
}

/// Smallest feasible `L ≥ l`, if any.
fn feasible_above(l: f64, eq: Equivariance) -> Option<f64> {
    let d = eq.divisor();
    let m = (2.0 * PI / (6.0 * l * d as f64) * (1.0 + 1e-12)).floor() as usize;
    if m == 0 {
        return None;
    }
    let n0 = m * d;
    Some(l.max(2.0 * PI / (7.0 * n0 as f64)))
}

/// `L` minimizing `max(11L/2, K/L + 2ε)` over the feasible scales; `None`
/// when the optimum is below [`L_MIN`].
pub fn choose_unitary_l(k: f64, eps: f64, eq: Equivariance) -> Result<Option<f64>> {
    let f = |l: f64| (5.5 * l).max(k / l + 2.0 * eps);
    let star = (2.0 * eps + (4.0 * eps * eps + 22.0 * k).sqrt()) / 11.0;
    if star < L_MIN {
        return Ok(None);
    }
    let below = plan_circle_partition(star, eq).map(|p| p.l).ok();
    let above = feasible_above(star, eq);
    let best = match (below, above) {
        (Some(a), Some(b)) => Some(if f(b) < f(a) { b } else { a }),
        (a, b) => a.or(b),
    };
    best.map(Some).ok_or_else(|| precondition("no feasible partition scale"))
}

// ---------------------------------------------------------------- resolution

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    F,
    G,
}

#[derive(Clone, Debug)]
pub struct ResolutionEntry {
    pub label: Label,
    pub index: i64,
    pub anchor: C64,
    pub projection: ComplexMatrix,
}

/// The projections attached to one tile.
#[derive(Clone, Debug)]
pub struct TileProjections {
    pub f: ComplexMatrix,
    pub f_minus: ComplexMatrix,
    pub f_plus: ComplexMatrix,
    pub e_minus: ComplexMatrix,
    pub e0: ComplexMatrix,
    pub e_plus: ComplexMatrix,
    /// Built directly rather than as the image of another tile.
    pub fundamental: bool,
    pub fallback: bool,
}

/// A symmetry acting on the tiling: `map` moves `E_R` to `E_{g(R)}` with
/// `g(z) = rotate · (conj ? z̄ : z)`.
#[derive(Clone, Debug)]
pub struct GroupElement {
    pub map: SymmetryMap,
    pub rotate: C64,
    pub conj: bool,
    /// The point map reverses orientation, swapping `F₋` and `F₊`.
    pub reverses: bool,
}

impl GroupElement {
    pub fn apply(&self, z: C64) -> C64 {
        self.rotate * if self.conj { z.conj() } else { z }
    }
}

/// Resolution of the identity `E_j` ordered along the tiling. Only tiles
/// and gaps near the spectrum are stored; all other `E_j` vanish.
#[derive(Clone, Debug)]
pub struct ProjectionResolution {
    pub dim: usize,
    pub entries: Vec<ResolutionEntry>,
    pub tiles: BTreeMap<i64, TileProjections>,
    pub geometry: Geometry,
}

impl ProjectionResolution {
    pub fn sum(&self) -> ComplexMatrix {
        let mut s = zeros(self.dim);
        for e in &self.entries {
            s += &e.projection;
        }
        s
    }

    pub fn sum_defect(&self) -> f64 {
        op_norm(&(self.sum() - identity(self.dim)))
    }

    pub fn projection_defect(&self) -> f64 {
        self.entries.iter().map(|e| projection_defect(&e.projection)).fold(0.0, f64::max)
    }

    /// `max_{i≠j} ‖E_i E_j‖`.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.entries.iter().enumerate() {
            for b in &self.entries[i + 1..] {
                worst = worst.max(op_norm(&(&a.projection * &b.projection)));
            }
        }
        worst
    }

    /// `Σ a_j E_j`.
    pub fn assemble(&self) -> ComplexMatrix {
        let mut s = zeros(self.dim);
        for e in &self.entries {
            s += &e.projection * e.anchor;
        }
        match self.geometry {
            Geometry::Line => re_part(&s),
            Geometry::Circle => s,
        }
    }

    /// `Σ E_j B E_j`.
    pub fn pinch(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        ensure_square(b)?;
        if b.nrows() != self.dim {
            return Err(Error::DimensionMismatch(self.dim, b.nrows()));
        }
        let mut s = zeros(self.dim);
        for e in &self.entries {
            s += &e.projection * b * &e.projection;
        }
        Ok(s)
    }

    fn find(&self, label: Label, anchor: C64) -> Option<&ResolutionEntry> {
        self.entries.iter().find(|e| e.label == label && (e.anchor - anchor).norm() <= 1e-9 * (1.0 + anchor.norm()))
    }

    /// `max_j ‖g(E_j) - E_{π(j)}‖` where `π` follows the anchors.
    pub fn equivariance_defect(&self, g: &GroupElement) -> f64 {
        let mut worst: f64 = 0.0;
        for e in &self.entries {
            let img = g.map.act(&e.projection);
            let d = match self.find(e.label, g.apply(e.anchor)) {
                Some(t) => dist(&img, &t.projection),
                None => op_norm(&img),
            };
            worst = worst.max(d);
        }
        worst
    }

    /// `max_k ‖[F_k, B]‖` over the stored tiles.
    pub fn max_f_commutator(&self, b: &ComplexMatrix) -> f64 {
        self.tiles.values().map(|t| comm_norm(&t.f, b)).fold(0.0, f64::max)
    }
}

fn is_zero(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.norm() == 0.0)
}

/// Tiles touching the spectrum of `d`.
fn active_tiles(part: &ArcPartition, d: &SpectralDecomp) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    for &z in &d.eigenvalues {
        for k in part.tiles_near(z) {
            out.insert(k);
        }
    }
    out
}

fn image_tile(part: &ArcPartition, g: &GroupElement, k: i64) -> i64 {
    part.tile_for_anchor(g.apply(part.tile(k).anchor))
}

/// Assembles the resolution from `F` data on fundamental tiles; other
/// tiles touching the spectrum take the image of a fundamental tile under
/// `group`, or are empty.
pub fn build_resolution(part: &ArcPartition, d: &SpectralDecomp, triples: &BTreeMap<i64, (ComplexMatrix, ComplexMatrix, ComplexMatrix, bool)>, group: &[GroupElement]) -> Result<ProjectionResolution> {
    let n = d.dim();
    let mut images: BTreeMap<i64, (usize, i64)> = BTreeMap::new();
    for &kf in triples.keys() {
        for (gi, g) in group.iter().enumerate() {
            let k = image_tile(part, g, kf);
            if k != kf && !triples.contains_key(&k) {
                images.entry(k).or_insert((gi, kf));
            }
        }
    }
    let mut active = active_tiles(part, d);
    active.extend(triples.keys().copied());
    active.extend(images.keys().copied());

    let mut tiles: BTreeMap<i64, TileProjections> = BTreeMap::new();
    for &k in &active {
        let w = part.tile(k).window;
        let e_minus = spectral_projection(d, &w.minus());
        let e0 = spectral_projection(d, &w.omega0());
        let e_plus = spectral_projection(d, &w.plus());
        let (f, f_minus, f_plus, fundamental, fallback) = if let Some((f, fm, fp, fb)) = triples.get(&k) {
            (f.clone(), fm.clone(), fp.clone(), true, *fb)
        } else if let Some(&(gi, kf)) = images.get(&k) {
            let g = &group[gi];
            let (f, fm, fp, fb) = &triples[&kf];
            let (fm, fp) = if g.reverses { (g.map.act(fp), g.map.act(fm)) } else { (g.map.act(fm), g.map.act(fp)) };
            (re_part(&g.map.act(f)), re_part(&fm), re_part(&fp), false, *fb)
        } else if is_zero(&e_minus) && is_zero(&e0) && is_zero(&e_plus) {
            (zeros(n), zeros(n), zeros(n), false, false)
        } else {
            return Err(precondition(&format!("missing F data for tile {k}")));
        };
        tiles.insert(k, TileProjections { f, f_minus, f_plus, e_minus, e0, e_plus, fundamental, fallback });
    }

    let mut gaps = BTreeSet::new();
    for &k in tiles.keys() {
        gaps.insert(part.norm_gap(k - 1));
        gaps.insert(part.norm_gap(k));
    }
    let zero = zeros(n);
    let mut entries = Vec::new();
    for (&k, t) in &tiles {
        entries.push((2 * k, ResolutionEntry { label: Label::F, index: k, anchor: part.tile(k).anchor, projection: t.f.clone() }));
    }
    for &k in &gaps {
        let gap = part.gap(k);
        let left = tiles.get(&part.norm_tile(k)).map_or_else(|| zero.clone(), |t| &t.e_plus - &t.f_plus);
        let right = tiles.get(&part.norm_tile(k + 1)).map_or_else(|| zero.clone(), |t| &t.e_minus - &t.f_minus);
        let g = re_part(&(left + spectral_projection(d, &gap.region) + right));
        let key = match part.geometry {
            Geometry::Circle if k == 0 => 2 * part.n0 as i64 + 1,
            _ => 2 * k + 1,
        };
        entries.push((key, ResolutionEntry { label: Label::G, index: k, anchor: gap.anchor, projection: g }));
    }
    entries.sort_by_key(|(key, _)| *key);
    let res = ProjectionResolution { dim: n, entries: entries.into_iter().map(|(_, e)| e).collect(), tiles, geometry: part.geometry };
    let defect = res.sum_defect();
    if defect > 1e-8 {
        return Err(precondition(&format!("resolution fails to sum to I (defect {defect:e})")));
    }
    Ok(res)
}

/// Builds `F` on fundamental tiles (first tile of each orbit, in priority
/// order) and assembles the resolution.
fn resolve(part: &ArcPartition, d: &SpectralDecomp, dp: &SpectralDecomp, first_dist: f64, c: f64, group: &[GroupElement]) -> Result<(ProjectionResolution, Vec<String>)> {
    let mut order: Vec<i64> = active_tiles(part, d).into_iter().collect();
    order.sort_by_key(|&k| part.priority(k));
    let mut covered = BTreeSet::new();
    let mut triples = BTreeMap::new();
    let mut notes = Vec::new();
    for k in order {
        if covered.contains(&k) {
            continue;
        }
        let tile = part.tile(k);
        if is_zero(&spectral_projection(d, &tile.window.omega())) {
            continue;
        }
        let t = build_f(d, dp, &tile.window, first_dist, c)?;
        if let Some(note) = &t.note {
            notes.push(format!("tile {k}: {note}"));
        }
        covered.insert(k);
        for g in group {
            covered.insert(image_tile(part, g, k));
        }
        triples.insert(k, (t.f, t.f_minus, t.f_plus, t.fallback_used));
    }
    if triples.values().any(|t| t.3) {
        notes.push(String::from("fallback F = E_Ω₀ used on some tiles"));
    }
    Ok((build_resolution(part, d, &triples, group)?, notes))
}

/// `(Σ a_j E_j, Σ E_j B̃ E_j)`.
pub fn assemble_and_pinch(res: &ProjectionResolution, b_localized: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    Ok((res.assemble(), res.pinch(b_localized)?))
}

// ---------------------------------------------------------------- reports

/// Phase condition `map(first) = zeta·first` together with the phase of
/// `B` under `map` (or under its star twist when `twisted`).
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCond {
    pub map: SymmetryMap,
    pub zeta: C64,
    pub eta: C64,
    pub twisted: bool,
}

impl PhaseCond {
    pub fn new(map: SymmetryMap, zeta: C64, eta: C64, twisted: bool) -> Self {
        PhaseCond { map, zeta, eta, twisted }
    }

    /// The map under which `B` carries the phase `eta`.
    pub fn b_map(&self) -> SymmetryMap {
        if self.twisted {
            star_twist(&self.map)
        } else {
            self.map.clone()
        }
    }

    pub fn first_defect(&self, a: &ComplexMatrix) -> f64 {
        phase_defect(&self.map, a, self.zeta)
    }

    pub fn b_defect(&self, b: &ComplexMatrix) -> f64 {
        phase_defect(&self.b_map(), b, self.eta)
    }

    pub fn first_spec(&self) -> PhaseSpec {
        PhaseSpec::new(self.map.clone(), self.zeta)
    }

    pub fn b_spec(&self) -> PhaseSpec {
        PhaseSpec::new(self.b_map(), self.eta)
    }
}

#[derive(Clone, Debug)]
pub struct BootstrapConfig {
    pub crho: f64,
    /// Davis–Kahan constant for arcs.
    pub dk_constant: f64,
    /// Tolerance for the input preconditions.
    pub tol: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { crho: crate::rho::c_rho(), dk_constant: DEFAULT_DK_CONSTANT, tol: 1e-8 }
    }
}

#[derive(Clone, Debug, Default)]
pub struct BootstrapReport {
    pub mode: String,
    pub epsilon: f64,
    pub l: Option<f64>,
    pub delta_loc: Option<f64>,
    /// `‖[first, B]‖` of the input.
    pub input_commutator: f64,
    pub distances: BTreeMap<String, f64>,
    pub defects: BTreeMap<String, f64>,
    pub bounds: BTreeMap<String, f64>,
    pub pass: BTreeMap<String, bool>,
    pub notes: Vec<String>,
    /// `max(distances) / √ε`.
    pub realized_constant: Option<f64>,
}

impl BootstrapReport {
    fn new(mode: &str, epsilon: f64, input_commutator: f64) -> Self {
        BootstrapReport { mode: mode.to_string(), epsilon, input_commutator, ..Default::default() }
    }

    pub fn all_pass(&self) -> bool {
        self.pass.values().all(|&p| p)
    }

    fn distance(&mut self, k: &str, v: f64) {
        self.distances.insert(k.to_string(), v);
    }

    fn defect(&mut self, k: &str, v: f64) {
        self.defects.insert(k.to_string(), v);
    }

    fn bound(&mut self, k: &str, v: f64) {
        self.bounds.insert(k.to_string(), v);
    }

    fn flag(&mut self, k: &str, v: bool) {
        self.pass.insert(k.to_string(), v);
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

#[derive(Clone, Debug)]
pub struct BootstrapOutput {
    pub first: ComplexMatrix,
    pub b: ComplexMatrix,
    pub report: BootstrapReport,
    pub resolution: Option<ProjectionResolution>,
    pub partition: Option<ArcPartition>,
    /// `L(B)` before pinching.
    pub b_localized: Option<ComplexMatrix>,
}

fn s_defect(maps: &[SymmetryMap], a: &ComplexMatrix) -> f64 {
    maps.iter().map(|m| dist(&m.act(a), a)).fold(0.0, f64::max)
}

fn check_inputs(first: &ComplexMatrix, b: &ComplexMatrix, fp: &ComplexMatrix, bp: &ComplexMatrix, tol: f64) -> Result<()> {
    for m in [first, b, fp, bp] {
        ensure_square(m)?;
        ensure_same_dim(m, first)?;
    }
    if op_norm(b) > 1.0 + tol {
        return Err(precondition("‖B‖ ≤ 1 required"));
    }
    if comm_norm(fp, bp) > tol * (1.0 + op_norm(bp)) {
        return Err(precondition("the approximant pair does not commute"));
    }
    Ok(())
}

fn check_s(s: &[SymmetryMap], first: &ComplexMatrix, fp: &ComplexMatrix, tol: f64) -> Result<()> {
    if s.iter().any(|m| !m.is_linear()) {
        return Err(invalid("S must consist of linear maps"));
    }
    if s.iter().any(|m| m.dim() != first.nrows()) {
        return Err(Error::DimensionMismatch(first.nrows(), s.iter().map(|m| m.dim()).next().unwrap_or(0)));
    }
    if s_defect(s, first) > tol || s_defect(s, fp) > tol {
        return Err(precondition("first operator or its approximant is not S-symmetric"));
    }
    Ok(())
}

fn check_commutes_with_s(m: &SymmetryMap, s: &[SymmetryMap]) -> Result<()> {
    if s.iter().any(|t| !crate::symmetry::commute_maps(m, t)) {
        return Err(precondition("phase map does not commute with S"));
    }
    Ok(())
}

/// Shared output checks: commutation, type, declared symmetries.
fn certify_common(rep: &mut BootstrapReport, first2: &ComplexMatrix, b2: &ComplexMatrix, kind: SpectralKind, s: &[SymmetryMap], conds: &[&PhaseCond], b_s_declared: bool) {
    let comm = comm_norm(first2, b2);
    rep.defect("commutator", comm);
    rep.flag("commutator", comm <= COMMUTATION_TOL);
    let ty = match kind {
        SpectralKind::Hermitian => hermitian_defect(first2),
        _ => unitary_defect(first2),
    };
    rep.defect("type", ty);
    rep.flag("type", ty <= TYPE_TOL);
    let mut sym: f64 = s_defect(s, first2);
    rep.defect("first_s", sym);
    if b_s_declared {
        let d = s_defect(s, b2);
        rep.defect("b_s", d);
        sym = sym.max(d);
    }
    for (i, c) in conds.iter().enumerate() {
        let a = c.first_defect(first2);
        let b = c.b_defect(b2);
        rep.defect(&format!("first_phase_{i}"), a);
        rep.defect(&format!("b_phase_{i}"), b);
        sym = sym.max(a).max(b);
    }
    rep.flag("symmetry", sym <= SYMMETRY_TOL);
}

// ---------------------------------------------------------------- self-adjoint

/// Self-adjoint bootstrap: commuting `(X″, B″)` within `45√ε` of `(X, B)`
/// keeping `S` and the optional antisymmetry `φ(X) = -X` with `B`'s phase.
pub fn bootstrap_sa(x: &ComplexMatrix, b: &ComplexMatrix, xp: &ComplexMatrix, bp: &ComplexMatrix, s: &[SymmetryMap], anti: Option<&PhaseCond>, cfg: &BootstrapConfig) -> Result<BootstrapOutput> {
    let tol = cfg.tol;
    check_inputs(x, b, xp, bp, tol)?;
    check_kind(x, SpectralKind::Hermitian)?;
    check_kind(xp, SpectralKind::Hermitian)?;
    if op_norm(x) > 1.0 + tol {
        return Err(precondition("‖X‖ ≤ 1 required"));
    }
    check_s(s, x, xp, tol)?;
    let b_s_declared = s_defect(s, b) <= tol;
    if let Some(a) = anti {
        if (a.zeta + ONE).norm() > 1e-12 {
            return Err(invalid("the antisymmetry phase on X must be -1"));
        }
        if order_of(&a.map, 2) != Some(2) {
            return Err(precondition("the antisymmetry map must have order 2"));
        }
        if a.first_defect(x) > tol || a.b_defect(b) > tol {
            return Err(precondition("declared phase symmetry fails on the input"));
        }
        check_commutes_with_s(&a.map, s)?;
    }
    let conds: Vec<&PhaseCond> = anti.into_iter().collect();
    let eps = dist(xp, x).max(dist(bp, b));
    let delta = comm_norm(x, b);
    let mut rep = BootstrapReport::new("sa", eps, delta);
    let headline = 45.0 * eps.sqrt();
    rep.bound("headline", headline);

    let finish = |mut rep: BootstrapReport, x2: ComplexMatrix, b2: ComplexMatrix, res: Option<ProjectionResolution>, part: Option<ArcPartition>, bl: Option<ComplexMatrix>| {
        let dx = dist(&x2, x);
        let db = dist(&b2, b);
        rep.distance("first", dx);
        rep.distance("b", db);
        certify_common(&mut rep, &x2, &b2, SpectralKind::Hermitian, s, &conds, b_s_declared);
        rep.flag("headline", dx <= headline + BOUND_SLACK && db <= headline + BOUND_SLACK);
        if eps > 0.0 {
            rep.realized_constant = Some(dx.max(db) / eps.sqrt());
        }
        BootstrapOutput { first: x2, b: b2, report: rep, resolution: res, partition: part, b_localized: bl }
    };

    if delta <= COMMUTING_INPUT {
        rep.note("commuting input returned unchanged");
        return Ok(finish(rep, x.clone(), b.clone(), None, None, None));
    }
    if eps > SA_EPS_MAX {
        rep.note("ε > 5/402: X″ = 0, B″ = B");
        return Ok(finish(rep, zeros(x.nrows()), b.clone(), None, None, None));
    }
    let l = (402.0 * eps / 5.0).sqrt();
    if l < L_MIN {
        let sym_ok = s_defect(s, xp) <= SYMMETRY_TOL && conds.iter().all(|c| c.first_defect(xp) <= SYMMETRY_TOL && c.b_defect(bp) <= SYMMETRY_TOL);
        if sym_ok {
            rep.note("L below the partition floor: symmetric approximant returned");
            return Ok(finish(rep, re_part(xp), bp.clone(), None, None, None));
        }
        return Err(precondition("ε below the partition floor and the approximant is not symmetric"));
    }
    let delta_loc = DELTA_RATIO * l;
    rep.l = Some(l);
    rep.delta_loc = Some(delta_loc);
    let b_loc = localize_sa(x, b, delta_loc)?;
    let d = spectral_decompose(x, SpectralKind::Hermitian, default_cluster_tol(x))?;
    let dp = spectral_decompose(xp, SpectralKind::Hermitian, default_cluster_tol(xp))?;
    let (lo, hi) = {
        let re: Vec<f64> = d.eigenvalues.iter().map(|z| z.re).collect();
        (re.iter().cloned().fold(f64::INFINITY, f64::min), re.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
    };
    let part = plan_line_partition(l, lo, hi, anti.is_some())?;
    let group: Vec<GroupElement> = anti.map(|a| GroupElement { map: a.map.clone(), rotate: -ONE, conj: false, reverses: true }).into_iter().collect();
    let (res, notes) = resolve(&part, &d, &dp, dist(xp, x), 1.0, &group)?;
    for n in notes {
        rep.note(n);
    }
    let (x2, b2) = assemble_and_pinch(&res, &b_loc)?;

    let crho = cfg.crho;
    let b_norm = op_norm(b);
    let eps_l = 56.0 * eps / l + eps;
    rep.bound("first", 5.0 * l);
    rep.bound("b", 6.0 * crho * delta / delta_loc + 2.0 * b_norm * eps_l);
    rep.bound("epsilon_l", eps_l);
    rep.bound("localization", 2.0 * crho * delta / delta_loc);
    let fcomm = res.max_f_commutator(b);
    rep.defect("max_f_commutator", fcomm);
    rep.defect("localization", dist(&b_loc, b));
    rep.defect("resolution_sum", res.sum_defect());
    let out = finish(rep, x2, b2, None, None, None);
    let mut rep = out.report;
    let (dx, db) = (rep.distances["first"], rep.distances["b"]);
    rep.flag("first_bound", dx <= rep.bounds["first"] + BOUND_SLACK);
    rep.flag("b_bound", db <= rep.bounds["b"] + BOUND_SLACK);
    rep.flag("f_commutator", fcomm <= b_norm * 56.0 * eps / l + eps + BOUND_SLACK);
    rep.flag("localization", rep.defects["localization"] <= rep.bounds["localization"] + BOUND_SLACK);
    Ok(BootstrapOutput { first: out.first, b: out.b, report: rep, resolution: Some(res), partition: Some(part), b_localized: Some(b_loc) })
}

// ---------------------------------------------------------------- unitary

#[derive(Clone, Debug, PartialEq)]
pub enum UnitaryCase {
    None,
    /// Conjugate-linear `φ` of order 2.
    Conj(PhaseCond),
    /// Linear `φ` of order `n` with `ζ` of order `n`.
    Rot { cond: PhaseCond, n: usize },
    /// Both, with `ϕ∘φ∘ϕ = φ⁻¹`.
    Dihedral { rot: PhaseCond, conj: PhaseCond, n: usize },
}

impl UnitaryCase {
    pub fn conds(&self) -> Vec<&PhaseCond> {
        match self {
            UnitaryCase::None => Vec::new(),
            UnitaryCase::Conj(c) | UnitaryCase::Rot { cond: c, .. } => alloc::vec![c],
            UnitaryCase::Dihedral { rot, conj, .. } => alloc::vec![rot, conj],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            UnitaryCase::None => "none",
            UnitaryCase::Conj(_) => "conj",
            UnitaryCase::Rot { .. } => "rot",
            UnitaryCase::Dihedral { .. } => "dihedral",
        }
    }

    pub fn equivariance(&self) -> Equivariance {
        match self {
            UnitaryCase::None => Equivariance::None,
            UnitaryCase::Conj(_) => Equivariance::Conjugation,
            UnitaryCase::Rot { n, .. } => Equivariance::Rotation(*n),
            UnitaryCase::Dihedral { n, .. } => Equivariance::Dihedral(*n),
        }
    }

    /// Same maps and first-operator phases, with `B` declared symmetric.
    pub fn with_symmetric_b(&self) -> UnitaryCase {
        let fix = |c: &PhaseCond| PhaseCond { eta: ONE, twisted: false, ..c.clone() };
        match self {
            UnitaryCase::None => UnitaryCase::None,
            UnitaryCase::Conj(c) => UnitaryCase::Conj(fix(c)),
            UnitaryCase::Rot { cond, n } => UnitaryCase::Rot { cond: fix(cond), n: *n },
            UnitaryCase::Dihedral { rot, conj, n } => UnitaryCase::Dihedral { rot: fix(rot), conj: fix(conj), n: *n },
        }
    }

    fn conj_cond(&self) -> Option<&PhaseCond> {
        match self {
            UnitaryCase::Conj(c) | UnitaryCase::Dihedral { conj: c, .. } => Some(c),
            _ => None,
        }
    }

    /// Validates the maps (kinds, orders, dihedral relation) for dimension `n`.
    pub fn validate(&self) -> Result<()> {
        let check_conj = |c: &PhaseCond| -> Result<()> {
            if c.map.is_linear() {
                return Err(invalid("the conjugation-type map must be conjugate-linear"));
            }
            if order_of(&c.map, 2) != Some(2) {
                return Err(precondition("the conjugate-linear map must have order 2"));
            }
            Ok(())
        };
        let check_rot = |c: &PhaseCond, n: usize| -> Result<()> {
            if n < 2 {
                return Err(invalid("rotation order must be at least 2"));
            }
            if !c.map.is_linear() {
                return Err(invalid("the rotation map must be linear"));
            }
            if order_of(&c.map, n) != Some(n) {
                return Err(precondition("the rotation map must have order n"));
            }
            if root_order(c.zeta, n) != Some(n) {
                return Err(precondition("ζ must have order n"));
            }
            Ok(())
        };
        match self {
            UnitaryCase::None => Ok(()),
            UnitaryCase::Conj(c) => check_conj(c),
            UnitaryCase::Rot { cond, n } => check_rot(cond, *n),
            UnitaryCase::Dihedral { rot, conj, n } => {
                check_rot(rot, *n)?;
                check_conj(conj)?;
                let lhs = compose(&compose(&conj.map, &rot.map)?, &conj.map)?;
                if !maps_equal(&lhs, &power(&rot.map, n - 1), 1e3 * MAP_TOL) {
                    return Err(precondition("dihedral relation ϕ∘φ∘ϕ = φ⁻¹ fails"));
                }
                Ok(())
            }
        }
    }

    /// Point actions of the nontrivial group elements on the spectrum of
    /// the normalized unitary.
    pub fn group_elements(&self) -> Result<Vec<GroupElement>> {
        let mut out = Vec::new();
        match self {
            UnitaryCase::None => {}
            UnitaryCase::Conj(c) => out.push(GroupElement { map: c.map.clone(), rotate: ONE, conj: true, reverses: true }),
            UnitaryCase::Rot { cond, n } => {
                for j in 1..*n {
                    out.push(GroupElement { map: power(&cond.map, j), rotate: cond.zeta.powi(-(j as i32)), conj: false, reverses: false });
                }
            }
            UnitaryCase::Dihedral { rot, conj, n } => {
                for a in 0..*n {
                    for b in 0..2 {
                        if a == 0 && b == 0 {
                            continue;
                        }
                        let ra = power(&rot.map, a);
                        let map = if b == 1 { compose(&ra, &conj.map)? } else { ra };
                        out.push(GroupElement { map, rotate: rot.zeta.powi(-(a as i32)), conj: b == 1, reverses: b == 1 });
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Unitary bootstrap with the partition scale chosen to minimize the
/// larger of the two assembled bounds.
pub fn bootstrap_unitary(u: &ComplexMatrix, b: &ComplexMatrix, up: &ComplexMatrix, bp: &ComplexMatrix, s: &[SymmetryMap], case: &UnitaryCase, cfg: &BootstrapConfig) -> Result<BootstrapOutput> {
    let tol = cfg.tol;
    check_inputs(u, b, up, bp, tol)?;
    check_kind(u, SpectralKind::Unitary)?;
    check_kind(up, SpectralKind::Unitary)?;
    check_s(s, u, up, tol)?;
    case.validate()?;
    let b_s_declared = s_defect(s, b) <= tol;
    let conds = case.conds();
    for c in &conds {
        if c.map.dim() != u.nrows() {
            return Err(Error::DimensionMismatch(u.nrows(), c.map.dim()));
        }
        if c.first_defect(u) > tol || c.b_defect(b) > tol {
            return Err(precondition("declared phase symmetry fails on the input"));
        }
        check_commutes_with_s(&c.map, s)?;
    }
    let eps = dist(up, u).max(dist(bp, b));
    let delta = comm_norm(u, b);
    let mut rep = BootstrapReport::new(&format!("unitary/{}", case.name()), eps, delta);

    let finish = |mut rep: BootstrapReport, u2: ComplexMatrix, b2: ComplexMatrix| {
        let du = dist(&u2, u);
        let db = dist(&b2, b);
        rep.distance("first", du);
        rep.distance("b", db);
        certify_common(&mut rep, &u2, &b2, SpectralKind::Unitary, s, &conds, b_s_declared);
        if eps > 0.0 {
            rep.realized_constant = Some(du.max(db) / eps.sqrt());
        }
        (rep, u2, b2)
    };
    let plain = |(rep, u2, b2): (BootstrapReport, ComplexMatrix, ComplexMatrix)| BootstrapOutput { first: u2, b: b2, report: rep, resolution: None, partition: None, b_localized: None };

    if delta <= COMMUTING_INPUT {
        rep.note("commuting input returned unchanged");
        return Ok(plain(finish(rep, u.clone(), b.clone())));
    }
    let n_loc = match case {
        UnitaryCase::Rot { n, .. } | UnitaryCase::Dihedral { n, .. } if *n >= 3 => *n,
        _ => 1,
    };
    let crho_eff = if n_loc >= 3 { n_loc as f64 * cfg.crho } else { cfg.crho };
    let c = cfg.dk_constant;
    let k = 17.0 * crho_eff * delta + 112.0 * c * eps;
    let eq = case.equivariance();
    let l = match choose_unitary_l(k, eps, eq)? {
        Some(l) => l,
        None => {
            let sym_ok = s_defect(s, up) <= SYMMETRY_TOL && conds.iter().all(|c| c.first_defect(up) <= SYMMETRY_TOL && c.b_defect(bp) <= SYMMETRY_TOL);
            if sym_ok {
                rep.note("L below the partition floor: symmetric approximant returned");
                return Ok(plain(finish(rep, up.clone(), bp.clone())));
            }
            rep.note("L clipped to the partition floor");
            plan_circle_partition(L_MIN, eq)?.l
        }
    };
    let part = plan_circle_partition(l, eq)?;
    let l = part.l;
    let delta_loc = DELTA_RATIO * l;
    rep.l = Some(l);
    rep.delta_loc = Some(delta_loc);

    let theta = case.conj_cond().map_or(ONE, |c| sqrt_phase(c.zeta));
    let ut = u * theta;
    let upt = up * theta;
    let b_loc = if n_loc >= 3 { localize_phase(&ut, b, delta_loc, n_loc)? } else { localize_normal(&ut, b, delta_loc)? };
    let d = spectral_decompose(&ut, SpectralKind::Unitary, default_cluster_tol(&ut))?;
    let dp = spectral_decompose(&upt, SpectralKind::Unitary, default_cluster_tol(&upt))?;
    let group = case.group_elements()?;
    let (res, notes) = resolve(&part, &d, &dp, dist(up, u), c, &group)?;
    for n in notes {
        rep.note(n);
    }
    let (ut2, b2) = assemble_and_pinch(&res, &b_loc)?;
    let u2 = ut2 * theta.conj();

    let eps_l = 56.0 * c * eps / l + eps;
    let b_norm = op_norm(b);
    rep.bound("first", 5.5 * l);
    rep.bound("b", 17.0 * crho_eff * delta / l + 2.0 * eps_l);
    rep.bound("epsilon_l", eps_l);
    let loc_bound = if n_loc >= 3 {
        crate::localization::distance_bound(cfg.crho, delta_loc, n_loc, delta, delta)
    } else {
        crate::localization::distance_bound(cfg.crho, delta_loc, 1, delta, delta)
    };
    rep.bound("localization", loc_bound);
    let fcomm = res.max_f_commutator(b);
    rep.defect("max_f_commutator", fcomm);
    rep.defect("localization", dist(&b_loc, b));
    rep.defect("resolution_sum", res.sum_defect());
    for (i, g) in group.iter().enumerate() {
        rep.defect(&format!("resolution_equivariance_{i}"), res.equivariance_defect(g));
    }
    let (mut rep, u2, b2) = finish(rep, u2, b2);
    let (du, db) = (rep.distances["first"], rep.distances["b"]);
    rep.flag("first_bound", du <= rep.bounds["first"] + BOUND_SLACK);
    rep.flag("b_bound", db <= rep.bounds["b"] + BOUND_SLACK);
    rep.flag("f_commutator", fcomm <= b_norm * 56.0 * c * eps / l + eps + BOUND_SLACK);
    rep.flag("localization", rep.defects["localization"] <= loc_bound + BOUND_SLACK);
    Ok(BootstrapOutput { first: u2, b: b2, report: rep, resolution: Some(res), partition: Some(part), b_localized: Some(b_loc) })
}

// ---------------------------------------------------------------- pipelines

#[derive(Clone, Debug)]
pub struct NormalOutput {
    pub x: ComplexMatrix,
    /// Normal, commuting with `x`.
    pub b: ComplexMatrix,
    /// The bootstrap's `B″` before normalization.
    pub b_bootstrap: ComplexMatrix,
    pub report: BootstrapReport,
}

/// Replaces `B″` by a nearby normal matrix in the commutant of `X″`:
/// `Re` is snapped to cluster means blockwise in the `X″` eigenspaces and
/// `Im` is pinched onto the resulting projections.
fn normalize_in_commutant(x2: &ComplexMatrix, b2: &ComplexMatrix, theta: C64) -> Result<ComplexMatrix> {
    let n = x2.nrows();
    let bh = b2 * theta;
    let re = re_part(&bh);
    let im = im_part(&bh);
    let d = spectral_decompose(x2, SpectralKind::Hermitian, default_cluster_tol(x2).max(1e-12))?;
    let vecs = d.eigenvectors();
    let mut pairs: Vec<(f64, nalgebra::DVector<C64>)> = Vec::with_capacity(n);
    for members in d.clusters() {
        let v = vecs.select_columns(members.iter());
        let c = v.adjoint() * &re * &v;
        let (vals, w) = eigh(&c)?;
        let basis = &v * w;
        for (i, &val) in vals.iter().enumerate() {
            pairs.push((val, basis.column(i).into_owned()));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let gap = comm_norm(&re, &im).sqrt().max(1e-8 * op_norm(&re).max(1.0));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..pairs.len() {
        match clusters.last_mut() {
            Some(c) if pairs[i].0 - pairs[*c.last().unwrap()].0 < gap => c.push(i),
            _ => clusters.push(alloc::vec![i]),
        }
    }
    let mut re2 = zeros(n);
    let mut im2 = zeros(n);
    for c in &clusters {
        let mut p = zeros(n);
        for &i in c {
            let v = &pairs[i].1;
            p += v * v.adjoint();
        }
        let mean = c.iter().map(|&i| pairs[i].0).sum::<f64>() / c.len() as f64;
        re2 += &p * real(mean);
        im2 += &p * &im * &p;
    }
    let bh3 = re_part(&re2) + re_part(&im2) * I;
    Ok(bh3 * theta.conj())
}

/// Self-adjoint bootstrap followed by normalization of `B″` inside the
/// commutant of `X″`.
pub fn lin_normal_pipeline(x: &ComplexMatrix, b: &ComplexMatrix, xp: &ComplexMatrix, bp: &ComplexMatrix, s: &[SymmetryMap], anti: Option<&PhaseCond>, cfg: &BootstrapConfig) -> Result<NormalOutput> {
    let out = bootstrap_sa(x, b, xp, bp, s, anti, cfg)?;
    let mut rep = out.report;
    rep.mode = String::from("sa/normal");
    let (x2, b2) = (out.first, out.b);
    let b3 = if normal_defect(&b2) <= COMMUTATION_TOL {
        rep.note("B″ already normal");
        b2.clone()
    } else {
        let theta = match anti {
            Some(a) if !a.b_map().is_linear() => sqrt_phase(a.eta),
            _ => ONE,
        };
        normalize_in_commutant(&x2, &b2, theta)?
    };
    rep.distance("b_normal_from_bootstrap", dist(&b3, &b2));
    rep.distance("b_normal", dist(&b3, b));
    let nd = normal_defect(&b3);
    rep.defect("normal", nd);
    rep.flag("normal", nd <= SYMMETRY_TOL);
    let comm = comm_norm(&x2, &b3);
    rep.defect("commutator_normal", comm);
    rep.flag("commutator_normal", comm <= COMMUTATION_TOL);
    let mut sym: f64 = 0.0;
    if s_defect(s, b) <= cfg.tol {
        sym = s_defect(s, &b3);
    }
    if let Some(a) = anti {
        sym = sym.max(a.b_defect(&b3));
    }
    rep.defect("b_normal_symmetry", sym);
    rep.flag("b_normal_symmetry", sym <= SYMMETRY_TOL);
    Ok(NormalOutput { x: x2, b: b3, b_bootstrap: b2, report: rep })
}

#[derive(Clone, Debug)]
pub struct LinOutput {
    pub a: ComplexMatrix,
    pub u: ComplexMatrix,
    pub p: ComplexMatrix,
    pub report: BootstrapReport,
}

/// Normal `A″ = U″P″` near an invertible contraction `A` with rotational
/// or dihedral phase symmetries, through the polar decomposition, the
/// oracle and the unitary bootstrap.
pub fn rotational_dihedral_lin(a: &ComplexMatrix, s: &[SymmetryMap], case: &UnitaryCase, cfg: &BootstrapConfig) -> Result<LinOutput> {
    ensure_square(a)?;
    let tol = cfg.tol;
    if op_norm(a) > 1.0 + tol {
        return Err(precondition("A must be a contraction"));
    }
    case.validate()?;
    if s.iter().any(|m| !m.is_linear()) {
        return Err(invalid("S must consist of linear maps"));
    }
    if s_defect(s, a) > tol {
        return Err(precondition("A is not S-symmetric"));
    }
    let conds = case.conds();
    for c in &conds {
        if c.first_defect(a) > tol {
            return Err(precondition("declared phase symmetry fails on A"));
        }
    }
    let polar = polar_decompose(a)?;
    let (u, p) = (polar.u, re_part(&polar.p));
    let s_specs: Vec<PhaseSpec> = s.iter().map(|m| PhaseSpec::new(m.clone(), ONE)).collect();
    let mut u_specs = s_specs.clone();
    let mut p_specs = s_specs;
    for c in &conds {
        u_specs.push(c.first_spec());
        p_specs.push(PhaseSpec::new(c.map.clone(), ONE));
    }
    let approx = commuting_approx_unitary(&u, &p, None, &u_specs, &p_specs)?;
    let case_p = case.with_symmetric_b();
    let out = bootstrap_unitary(&u, &p, &approx.first_prime, &approx.b_prime, s, &case_p, cfg)?;
    let a2 = &out.first * &out.b;
    let mut rep = out.report;
    rep.mode = format!("lin/{}", case.name());
    let selfcomm = comm_norm(&a.adjoint(), a);
    let polar_term = dist(a, &(&u * &p));
    let polar_bound = 0.5 * selfcomm.sqrt();
    rep.distance("a", dist(&a2, a));
    rep.distance("polar", polar_term);
    rep.bound("polar", polar_bound);
    rep.flag("polar", polar_term <= polar_bound + BOUND_SLACK);
    let boot = rep.bounds.get("first").copied().unwrap_or(0.0) + rep.bounds.get("b").copied().unwrap_or(0.0);
    let measured_boot = rep.distances["first"] + rep.distances["b"];
    // short-circuited runs carry no assembled bound; their distances are zero
    let boot = if rep.bounds.contains_key("first") { boot } else { measured_boot };
    rep.bound("bootstrap", boot);
    rep.bound("a", polar_bound + boot);
    let nd = normal_defect(&a2);
    rep.defect("a_normal", nd);
    rep.flag("a_normal", nd <= SYMMETRY_TOL);
    let mut sym = s_defect(s, &a2);
    for c in &conds {
        sym = sym.max(c.first_defect(&a2));
    }
    rep.defect("a_symmetry", sym);
    rep.flag("a_symmetry", sym <= SYMMETRY_TOL);
    rep.flag("a_distance", rep.distances["a"] <= rep.bounds["a"] + BOUND_SLACK);
    Ok(LinOutput { a: a2, u: out.first, p: out.b, report: rep })
}
