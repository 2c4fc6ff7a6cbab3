//! Dense complex matrix kernel: norms, commutators, spectral decompositions
//! of hermitian/unitary/normal matrices, functional calculus and the polar
//! decomposition.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::region::Region;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

/// Tolerance used to accept a matrix as hermitian/unitary/normal.
pub const KIND_TOL: f64 = 1e-8;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(n, n)
}

pub fn diag(values: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&DVector::from_column_slice(values))
}

pub fn real_diag(values: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&x| real(x))))
}

/// Builds a matrix from row-major entries.
pub fn from_rows(n: usize, entries: &[C64]) -> Result<ComplexMatrix> {
    if entries.len() != n * n {
        return Err(Error::DimensionMismatch(entries.len(), n * n));
    }
    Ok(ComplexMatrix::from_row_slice(n, n, entries))
}

pub fn ensure_square(a: &ComplexMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare(a.nrows(), a.ncols()));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

pub fn ensure_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(a.nrows(), b.nrows()));
    }
    Ok(())
}

/// Largest singular value.
pub fn op_norm(a: &ComplexMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone().singular_values().max()
}

/// `AB - BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(a)?;
    ensure_same_dim(a, b)?;
    Ok(comm(a, b))
}

pub(crate) fn comm(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn comm_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    op_norm(&comm(a, b))
}

pub fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    op_norm(&(a - b))
}

/// `Re A = (A + A*)/2`.
pub fn re_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()) * real(0.5)
}

/// `Im A = (A - A*)/(2i)`.
pub fn im_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a - a.adjoint()) * c64(0.0, -0.5)
}

pub fn hermitian_defect(a: &ComplexMatrix) -> f64 {
    op_norm(&(a - a.adjoint()))
}

pub fn unitary_defect(a: &ComplexMatrix) -> f64 {
    op_norm(&(a.adjoint() * a - identity(a.nrows())))
}

pub fn normal_defect(a: &ComplexMatrix) -> f64 {
    comm_norm(&a.adjoint(), a)
}

/// `‖P² - P‖ + ‖P - P*‖`.
pub fn projection_defect(p: &ComplexMatrix) -> f64 {
    op_norm(&(p * p - p)) + hermitian_defect(p)
}

/// Range-containment defect `‖F - E F E‖` (zero iff `F ≤ E` for projections).
pub fn order_defect(f: &ComplexMatrix, e: &ComplexMatrix) -> f64 {
    op_norm(&(f - e * f * e))
}

/// Angle of `z` normalized to `[0, 2π)`.
pub fn angle(z: C64) -> f64 {
    normalize_angle(z.im.atan2(z.re))
}

pub fn normalize_angle(t: f64) -> f64 {
    let r = t % (2.0 * PI);
    let r = if r < 0.0 { r + 2.0 * PI } else { r };
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// `V V*` for the given columns of `v`.
pub(crate) fn column_projection(v: &ComplexMatrix, cols: &[usize]) -> ComplexMatrix {
    let n = v.nrows();
    if cols.is_empty() {
        return zeros(n);
    }
    let sub = v.select_columns(cols.iter());
    &sub * sub.adjoint()
}

/// `V diag(d) V*`.
pub(crate) fn conjugate_diag(v: &ComplexMatrix, d: &[C64]) -> ComplexMatrix {
    let mut vd = v.clone();
    for (j, &x) in d.iter().enumerate() {
        let mut col = vd.column_mut(j);
        col *= x;
    }
    vd * v.adjoint()
}

/// Hermitian eigendecomposition, eigenvalues ascending.
pub fn eigh(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    ensure_square(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), zeros(0)));
    }
    let h = re_part(a);
    let e = SymmetricEigen::try_new(h, f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| e.eigenvalues[i].partial_cmp(&e.eigenvalues[j]).unwrap_or(core::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = e.eigenvectors.select_columns(order.iter());
    Ok((values, vectors))
}

/// Eigendecomposition of a normal matrix through its complex Schur form.
/// The triangular factor of a normal matrix is diagonal, so the Schur
/// vectors are orthonormal eigenvectors.
pub fn eig_normal(a: &ComplexMatrix) -> Result<(Vec<C64>, ComplexMatrix)> {
    ensure_square(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), zeros(0)));
    }
    if let Some(s) = Schur::try_new(a.clone(), f64::EPSILON, 10_000 * n.max(1)) {
        let (q, t) = s.unpack();
        let values = (0..n).map(|i| t[(i, i)]).collect();
        return Ok((values, q));
    }
    // QR stalls on exact permutation-like input; fall back to the pencil
    pencil_eig(a, 0)
}

const PENCIL_COEFFS: [f64; 4] = [0.618_033_988_749_894_9, 1.324_717_957_244_746, 0.414_213_562_373_095_1, 2.718_281_828_459_045];

/// Eigenvectors of `Re A + c Im A`, with clusters of nearly equal pencil
/// eigenvalues split again using the next coefficient.
fn pencil_eig(a: &ComplexMatrix, depth: usize) -> Result<(Vec<C64>, ComplexMatrix)> {
    let n = a.nrows();
    if n == 1 {
        return Ok((alloc::vec![a[(0, 0)]], identity(1)));
    }
    let Some(&c) = PENCIL_COEFFS.get(depth) else { return Err(Error::NoConvergence) };
    let h = re_part(a) + im_part(a) * real(c);
    let (vals, v) = eigh(&h)?;
    let tol = 1e-9 * (1.0 + op_norm(a));
    let mut values = Vec::with_capacity(n);
    let mut vectors = zeros(n);
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && vals[j] - vals[j - 1] < tol {
            j += 1;
        }
        let block = v.columns(i, j - i).into_owned();
        let compressed = block.adjoint() * a * &block;
        let (bv, bw) = if j - i == 1 { (alloc::vec![compressed[(0, 0)]], identity(1)) } else { pencil_eig(&compressed, depth + 1)? };
        vectors.columns_mut(i, j - i).copy_from(&(block * bw));
        values.extend(bv);
        i = j;
    }
    Ok((values, vectors))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpectralKind {
    Hermitian,
    Unitary,
    Normal,
}

impl SpectralKind {
    pub fn name(self) -> &'static str {
        match self {
            SpectralKind::Hermitian => "hermitian",
            SpectralKind::Unitary => "unitary",
            SpectralKind::Normal => "normal",
        }
    }
}

/// Spectral decomposition `A = Σ λ_i P_i` with eigenvalues clustered at a
/// fixed resolution.
#[derive(Clone, Debug)]
pub struct SpectralDecomp {
    pub kind: SpectralKind,
    /// One representative (the mean) per cluster.
    pub eigenvalues: Vec<C64>,
    /// Orthogonal projection onto each cluster's eigenspace.
    pub projections: Vec<ComplexMatrix>,
    raw: Vec<C64>,
    vectors: ComplexMatrix,
    members: Vec<Vec<usize>>,
}

impl SpectralDecomp {
    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    /// Unclustered eigenvalues, aligned with the columns of `eigenvectors`.
    pub fn raw_eigenvalues(&self) -> &[C64] {
        &self.raw
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    /// Indices (into the raw eigenvalues) belonging to each cluster.
    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.members
    }

    /// Projection onto the clusters whose representative satisfies `pred`.
    pub fn projection_where(&self, mut pred: impl FnMut(C64) -> bool) -> ComplexMatrix {
        let mut cols = Vec::new();
        for (c, m) in self.members.iter().enumerate() {
            if pred(self.eigenvalues[c]) {
                cols.extend_from_slice(m);
            }
        }
        column_projection(&self.vectors, &cols)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut d = alloc::vec![ZERO; self.dim()];
        for (c, m) in self.members.iter().enumerate() {
            for &i in m {
                d[i] = self.eigenvalues[c];
            }
        }
        conjugate_diag(&self.vectors, &d)
    }
}

pub fn default_cluster_tol(a: &ComplexMatrix) -> f64 {
    1e-8 * op_norm(a).max(f64::MIN_POSITIVE)
}

/// Checks that `a` is of the declared kind within [`KIND_TOL`].
pub fn check_kind(a: &ComplexMatrix, kind: SpectralKind) -> Result<()> {
    let scale = op_norm(a).max(1.0);
    let defect = match kind {
        SpectralKind::Hermitian => hermitian_defect(a) / scale,
        SpectralKind::Unitary => unitary_defect(a),
        SpectralKind::Normal => normal_defect(a) / (scale * scale),
    };
    if defect > KIND_TOL {
        return Err(Error::KindViolated { kind: kind.name(), defect });
    }
    Ok(())
}

pub fn spectral_decompose(a: &ComplexMatrix, kind: SpectralKind, cluster_tol: f64) -> Result<SpectralDecomp> {
    ensure_square(a)?;
    check_kind(a, kind)?;
    if !(cluster_tol >= 0.0) {
        return Err(invalid("cluster_tol must be nonnegative"));
    }
    let (raw, vectors) = match kind {
        SpectralKind::Hermitian => {
            let (v, q) = eigh(a)?;
            (v.into_iter().map(real).collect::<Vec<_>>(), q)
        }
        SpectralKind::Unitary | SpectralKind::Normal => {
            let (v, q) = eig_normal(a)?;
            let mut order: Vec<usize> = (0..v.len()).collect();
            if kind == SpectralKind::Unitary {
                order.sort_by(|&i, &j| angle(v[i]).partial_cmp(&angle(v[j])).unwrap());
            } else {
                order.sort_by(|&i, &j| (v[i].re, v[i].im).partial_cmp(&(v[j].re, v[j].im)).unwrap());
            }
            let vals = order.iter().map(|&i| v[i]).collect();
            (vals, q.select_columns(order.iter()))
        }
    };
    let members = match kind {
        SpectralKind::Hermitian => cluster_sorted(&raw, cluster_tol, false),
        SpectralKind::Unitary => cluster_sorted(&raw, cluster_tol, true),
        SpectralKind::Normal => cluster_greedy(&raw, cluster_tol),
    };
    let eigenvalues: Vec<C64> = members
        .iter()
        .map(|m| {
            let s: C64 = m.iter().map(|&i| raw[i]).sum();
            let mean = s / m.len() as f64;
            match kind {
                SpectralKind::Hermitian => real(mean.re),
                SpectralKind::Unitary if mean.norm() > 0.0 => mean / mean.norm(),
                _ => mean,
            }
        })
        .collect();
    let projections = members.iter().map(|m| column_projection(&vectors, m)).collect();
    Ok(SpectralDecomp { kind, eigenvalues, projections, raw, vectors, members })
}

/// Clusters values that are already sorted (by value or by angle), merging
/// neighbours within `tol`; with `circular` the last and first clusters may
/// also merge.
fn cluster_sorted(values: &[C64], tol: f64, circular: bool) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..values.len() {
        match out.last_mut() {
            Some(last) if (values[i] - values[*last.last().unwrap()]).norm() <= tol => last.push(i),
            _ => out.push(alloc::vec![i]),
        }
    }
    if circular && out.len() > 1 {
        let first = out[0][0];
        let last = *out.last().unwrap().last().unwrap();
        if (values[first] - values[last]).norm() <= tol {
            let tail = out.pop().unwrap();
            let mut merged = tail;
            merged.extend_from_slice(&out[0]);
            out[0] = merged;
        }
    }
    out
}

fn cluster_greedy(values: &[C64], tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    'outer: for i in 0..values.len() {
        for c in out.iter_mut() {
            if c.iter().any(|&j| (values[i] - values[j]).norm() <= tol) {
                c.push(i);
                continue 'outer;
            }
        }
        out.push(alloc::vec![i]);
    }
    out
}

/// Sum of the spectral projections whose eigenvalue lies in `region`.
pub fn spectral_projection(d: &SpectralDecomp, region: &Region) -> ComplexMatrix {
    d.projection_where(|z| region.contains(z))
}

/// `Σ f(λ_i) P_i`.
pub fn apply_function(d: &SpectralDecomp, f: impl Fn(C64) -> C64) -> Result<ComplexMatrix> {
    let mut vals = alloc::vec![ZERO; d.dim()];
    for (c, m) in d.members.iter().enumerate() {
        let y = f(d.eigenvalues[c]);
        if !y.re.is_finite() || !y.im.is_finite() {
            return Err(invalid("function undefined at an eigenvalue"));
        }
        for &i in m {
            vals[i] = y;
        }
    }
    Ok(conjugate_diag(&d.vectors, &vals))
}

/// Polar data of an invertible matrix: `A = U|A|` and `P = (|A| + |A*|)/2`.
#[derive(Clone, Debug)]
pub struct Polar {
    pub u: ComplexMatrix,
    pub p: ComplexMatrix,
    pub abs_a: ComplexMatrix,
    pub abs_a_star: ComplexMatrix,
}

pub const POLAR_FLOOR: f64 = 1e-8;

pub fn polar_decompose(a: &ComplexMatrix) -> Result<Polar> {
    ensure_square(a)?;
    let n = a.nrows();
    let svd = a.clone().svd(true, true);
    let smin = svd.singular_values.min();
    let smax = svd.singular_values.max();
    if n == 0 || smin < POLAR_FLOOR * smax || smax == 0.0 {
        return Err(Error::Singular(smin));
    }
    let w = svd.u.ok_or(Error::NoConvergence)?;
    let vt = svd.v_t.ok_or(Error::NoConvergence)?;
    let s: Vec<C64> = svd.singular_values.iter().map(|&x| real(x)).collect();
    let u = &w * &vt;
    let abs_a = conjugate_diag(&vt.adjoint(), &s);
    let abs_a_star = conjugate_diag(&w, &s);
    let p = (&abs_a + &abs_a_star) * real(0.5);
    Ok(Polar { u, p, abs_a, abs_a_star })
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}
