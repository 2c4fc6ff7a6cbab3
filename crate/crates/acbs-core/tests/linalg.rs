use acbs_core::generate::{random_complex, random_hermitian, random_unitary, rng, voiculescu};
use acbs_core::linalg::*;
use acbs_core::region::Region;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn eigh_two_by_two() {
    let a = from_rows(2, &[real(2.0), real(1.0), real(1.0), real(2.0)]).unwrap();
    let (vals, vecs) = eigh(&a).unwrap();
    assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
    let back = &vecs * real_diag(&vals) * vecs.adjoint();
    assert!(dist(&back, &a) < 1e-13);
}

#[test]
fn eig_normal_handles_cyclic_shifts() {
    // exact permutation matrices stall plain shifted QR
    for n in [2, 3, 4, 8, 12, 16] {
        let (u, _) = voiculescu(n);
        let (vals, vecs) = eig_normal(&u).unwrap();
        let back = &vecs * diag(&vals) * vecs.adjoint();
        assert!(dist(&back, &u) < 1e-10, "n = {n}");
        for z in &vals {
            assert!((z.powu(n as u32) - ONE).norm() < 1e-10);
        }
    }
}

#[test]
fn spectral_projections_of_roots_of_unity() {
    let (_, v) = voiculescu(6);
    let d = spectral_decompose(&v, SpectralKind::Unitary, 1e-8).unwrap();
    assert_eq!(d.eigenvalues.len(), 6);
    let upper = spectral_projection(&d, &Region::closed_arc(0.1, PI - 0.2));
    // ω, ω² lie in the open upper half plane away from ±1
    assert!((upper.trace().re - 2.0).abs() < 1e-12);
    let mut total = zeros(6);
    for p in &d.projections {
        total += p;
    }
    assert!(dist(&total, &identity(6)) < 1e-12);
}

#[test]
fn clustering_merges_close_eigenvalues() {
    let a = real_diag(&[0.0, 1e-10, 0.5, 0.5 + 2e-10, 1.0]);
    let d = spectral_decompose(&a, SpectralKind::Hermitian, 1e-8).unwrap();
    assert_eq!(d.eigenvalues.len(), 3);
}

#[test]
fn check_kind_rejects() {
    let mut r = rng(1);
    let a = random_complex(4, &mut r);
    assert!(matches!(check_kind(&a, SpectralKind::Hermitian), Err(acbs_core::Error::KindViolated { .. })));
    assert!(check_kind(&re_part(&a), SpectralKind::Hermitian).is_ok());
    assert!(eigh(&zeros(0)).unwrap().0.is_empty());
}

#[test]
fn polar_of_diagonal() {
    let a = diag(&[c64(0.0, 0.5), real(-0.25)]);
    let p = polar_decompose(&a).unwrap();
    assert!(dist(&p.u, &diag(&[I, -ONE])) < 1e-14);
    assert!(dist(&p.p, &real_diag(&[0.5, 0.25])) < 1e-14);
    assert!(matches!(polar_decompose(&real_diag(&[1.0, 0.0])), Err(acbs_core::Error::Singular(_))));
}

#[test]
fn commutator_norms() {
    let (u, v) = voiculescu(5);
    assert!((comm_norm(&u, &v) - 2.0 * (PI / 5.0).sin()).abs() < 1e-12);
    assert_eq!(commutator(&u, &zeros(3)).unwrap_err(), acbs_core::Error::DimensionMismatch(5, 3));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hermitian_reconstruction(seed in 0u64..10_000, n in 1usize..12) {
        let mut r = rng(seed);
        let a = random_hermitian(n, &mut r);
        let d = spectral_decompose(&a, SpectralKind::Hermitian, default_cluster_tol(&a)).unwrap();
        prop_assert!(dist(&d.reconstruct(), &a) < 1e-10);
        for p in &d.projections {
            prop_assert!(projection_defect(p) < 1e-10);
        }
    }

    #[test]
    fn normal_reconstruction(seed in 0u64..10_000, n in 1usize..12) {
        let mut r = rng(seed);
        let u = random_unitary(n, &mut r);
        prop_assert!(unitary_defect(&u) < 1e-12);
        let (vals, vecs) = eig_normal(&u).unwrap();
        prop_assert!(dist(&(&vecs * diag(&vals) * vecs.adjoint()), &u) < 1e-10);
    }

    #[test]
    fn polar_parts(seed in 0u64..10_000, n in 1usize..10) {
        let mut r = rng(seed);
        let a = random_complex(n, &mut r) + identity(n) * real(3.0);
        let p = polar_decompose(&a).unwrap();
        prop_assert!(unitary_defect(&p.u) < 1e-10);
        prop_assert!(dist(&(&p.u * &p.abs_a), &a) < 1e-10);
        prop_assert!(dist(&(&p.abs_a_star * &p.u), &a) < 1e-10);
    }
}
