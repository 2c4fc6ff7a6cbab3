use acbs_core::generate::{random_hermitian, random_unitary, rng, voiculescu};
use acbs_core::linalg::*;
use acbs_core::projection::*;
use acbs_core::region::Region;
use proptest::prelude::*;

fn rotation3(t: f64) -> ComplexMatrix {
    // rotates e2 towards e3
    let (s, c) = t.sin_cos();
    from_rows(3, &[ONE, ZERO, ZERO, ZERO, real(c), real(-s), ZERO, real(s), real(c)]).unwrap()
}

#[test]
fn rounding() {
    let f = round_to_projection(&real_diag(&[0.9, 0.1])).unwrap();
    assert!(dist(&f, &real_diag(&[1.0, 0.0])) < 1e-15);
    assert!(round_to_projection(&real_diag(&[0.5, 0.5])).is_err());
    let p = real_diag(&[1.0, 0.0, 1.0]);
    assert!(dist(&round_to_projection(&p).unwrap(), &p) < 1e-15);
}

#[test]
fn sandwich_three_by_three() {
    let t = 0.1;
    let e = real_diag(&[1.0, 0.0, 0.0]);
    let g = real_diag(&[1.0, 1.0, 0.0]);
    let r = rotation3(t);
    let fp = &r * &g * r.adjoint();
    let sw = sandwich_projection(&e, &fp, &g, &[]).unwrap();
    assert!((sw.epsilon - t.sin()).abs() < 1e-14);
    assert!(dist(&sw.f, &g) < 1e-12);
    assert!(dist(&sw.f, &fp) <= 5.0 * sw.epsilon);
    assert!(sandwich_projection(&g, &fp, &e, &[]).is_err());
    // with G = I the middle block is already a projection
    let full = sandwich_projection(&e, &fp, &identity(3), &[]).unwrap();
    assert!(full.epsilon < 1e-15);
    assert!(dist(&full.f, &fp) < 1e-12);
    let free = sandwich_projection(&zeros(3), &fp, &identity(3), &[]).unwrap();
    assert!(dist(&free.f, &round_to_projection(&fp).unwrap()) < 1e-12);
    let same = sandwich_projection(&e, &e, &e, &[]).unwrap();
    assert!(dist(&same.f, &e) < 1e-15);
}

#[test]
fn davis_kahan_examples() {
    let a = real_diag(&[0.0, 1.0]);
    let b = real_diag(&[0.1, 1.0]);
    let ka = Region::closed(-0.2, 0.2);
    let kb = Region::closed(0.5, 1.5);
    let dk = dk_check(&a, &b, &ka, &kb, None, DEFAULT_DK_CONSTANT, 0.0).unwrap();
    assert_eq!(dk.lhs, 0.0);
    assert!((dk.delta - 0.3).abs() < 1e-15 && dk.c == 1.0 && dk.pass);
    // a rotated projection: ‖E_A E_B‖ = sin t = ‖A - B‖
    let t: f64 = 0.05;
    let (s, c) = t.sin_cos();
    let rot = from_rows(2, &[real(c), real(-s), real(s), real(c)]).unwrap();
    let b = &rot * &a * rot.adjoint();
    let dk = dk_check(&a, &b, &Region::closed(-0.1, 0.1), &Region::closed(0.9, 1.1), None, DEFAULT_DK_CONSTANT, 0.0).unwrap();
    assert!((dk.lhs - s).abs() < 1e-12);
    assert!((dk.rhs - s / 0.8).abs() < 1e-12 && dk.pass);
    assert!(dk_check(&a, &b, &ka, &Region::closed(0.1, 1.0), None, 1.0, 0.0).is_err());
}

#[test]
fn build_f_on_small_window() {
    let x = real_diag(&[0.0, 0.3, 0.6, 1.0]);
    let v = ComplexMatrix::from_fn(4, 1, |i, _| real([0.5, 0.5, -0.5, 0.5][i]));
    let xp = &x + &v * v.adjoint() * real(1e-4);
    assert!(t_c(&x, &xp) < 0.25);
    let t = build_f_sa(&x, &xp, &Region::open(0.25, 0.35), &Region::closed(0.1, 0.5), &[]).unwrap();
    assert!(!t.fallback_used);
    assert!(t.invariant_defect() < 1e-8);
    // E₀ = e₂e₂*, and F stays inside E_Ω = E₀ here
    assert!(dist(&t.e0, &real_diag(&[0.0, 1.0, 0.0, 0.0])) < 1e-12);
    assert!(dist(&t.f, &t.e0) < 1e-12);
    let far = &x + real_diag(&[0.0, 0.0, 0.0, 5.0]);
    assert!(build_f_sa(&x, &far, &Region::open(0.25, 0.35), &Region::closed(0.1, 0.5), &[]).unwrap().fallback_used);
    assert!(build_f_sa(&x, &xp, &Region::open(0.05, 0.35), &Region::closed(0.1, 0.5), &[]).is_err());
}

#[test]
fn voiculescu_window_projection() {
    let (u, v) = voiculescu(12);
    let t = build_f_unitary(&v, &v, &Region::open_arc(0.5, 1.0), &Region::closed_arc(0.05, 2.0), &[], DEFAULT_DK_CONSTANT).unwrap();
    assert!(t.invariant_defect() < 1e-10);
    assert!(comm_norm(&t.f, &v) < 1e-12);
    assert!((comm_norm(&t.f, &u) - 1.0).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sandwich_invariants(seed in 0u64..10_000, n in 3usize..12, t in 0.0f64..0.1) {
        let mut r = rng(seed);
        let q = random_unitary(n, &mut r);
        let proj = |k: usize| q.columns(0, k) * q.columns(0, k).adjoint();
        let (e, f0, g) = (proj(1), proj(2), proj(3));
        let k = random_hermitian(n, &mut r);
        let w = apply_function(&spectral_decompose(&k, SpectralKind::Hermitian, 1e-12).unwrap(), |z| C64::from_polar(1.0, t * z.re)).unwrap();
        let fp = re_part(&(&w * &f0 * w.adjoint()));
        if let Ok(sw) = sandwich_projection(&e, &fp, &g, &[]) {
            prop_assert!(projection_defect(&sw.f) < 1e-10);
            prop_assert!(order_defect(&e, &sw.f) < 1e-8);
            prop_assert!(order_defect(&sw.f, &g) < 1e-8);
            prop_assert!(dist(&sw.f, &fp) <= 5.0 * sw.epsilon + 1e-12);
        }
    }

    #[test]
    fn rounding_bound(seed in 0u64..10_000, n in 2usize..10, s in 0.0f64..0.1) {
        let mut r = rng(seed);
        let q = random_unitary(n, &mut r);
        let p = q.columns(0, 1) * q.columns(0, 1).adjoint();
        let x = &p + random_hermitian(n, &mut r) * real(s);
        let d = op_norm(&(&x * &x - &x));
        if d < 0.25 {
            let f = round_to_projection(&x).unwrap();
            prop_assert!(dist(&f, &x) <= 2.0 * d + 1e-12);
        }
    }
}

fn t_c(x: &ComplexMatrix, xp: &ComplexMatrix) -> f64 {
    let w = Window::from_regions(&Region::open(0.25, 0.35), &Region::closed(0.1, 0.5)).unwrap();
    w.c_omega(1.0) * dist(x, xp)
}
