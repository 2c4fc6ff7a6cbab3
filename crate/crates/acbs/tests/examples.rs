use acbs::examples::*;
use acbs::pipeline::declared_defect;
use acbs_core::linalg::{comm_norm, from_rows, op_norm, real, ComplexMatrix, C64, ONE, ZERO};
use acbs_core::symmetry::AzClass;

fn shift(weights: &[f64]) -> ComplexMatrix {
    let m = weights.len() + 1;
    let mut b = ComplexMatrix::zeros(m, m);
    for (k, &w) in weights.iter().enumerate() {
        b[(k + 1, k)] = real(w);
    }
    b
}

fn bit_equal(a: &ComplexMatrix, b: &ComplexMatrix) -> bool {
    a.shape() == b.shape() && a.iter().zip(b.iter()).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
}

#[test]
fn voiculescu_three() {
    let p = gen_example("voiculescu", &GenParams { n: 3, ..Default::default() }).unwrap();
    let u = from_rows(3, &[ZERO, ZERO, ONE, ONE, ZERO, ZERO, ZERO, ONE, ZERO]).unwrap();
    assert_eq!(p.first, u);
    let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    for (j, z) in [w, w * w, w * w * w].into_iter().enumerate() {
        assert!((p.second[(j, j)] - z).norm() < 1e-15);
    }
    assert!(declared_defect(&p, &p.first, &p.second) < 1e-12);
}

#[test]
fn davidson_displays() {
    let p = gen_example("davidson", &GenParams { n: 2, ..Default::default() }).unwrap();
    let a = acbs_core::linalg::real_diag(&[0.0, 0.25, 0.5, 0.75, 1.0]);
    assert!(bit_equal(&p.first, &a));
    assert!(bit_equal(&p.second, &shift(&[0.5, 1.0, 1.0, 0.5])));
    let p = gen_example("davidson", &GenParams { n: 3, ..Default::default() }).unwrap();
    let a = ComplexMatrix::from_fn(10, 10, |i, j| if i == j { real(i as f64 / 9.0) } else { ZERO });
    assert!(bit_equal(&p.first, &a));
    let (t, tt) = (1.0 / 3.0, 2.0 / 3.0);
    assert!(bit_equal(&p.second, &shift(&[t, tt, 1.0, 1.0, 1.0, 1.0, 1.0, tt, t])));
}

#[test]
fn seeds_are_deterministic() {
    for name in ["tensor_avg", "az", "rot", "dihedral"] {
        let g = GenParams { n: 4, class: Some(AzClass::DIII), seed: 17, ..Default::default() };
        let a = gen_example(name, &g).unwrap();
        let b = gen_example(name, &g).unwrap();
        assert!(bit_equal(&a.first, &b.first) && bit_equal(&a.second, &b.second), "{name}");
        let c = gen_example(name, &GenParams { seed: 18, ..g }).unwrap();
        assert!(!bit_equal(&a.first, &c.first) || !bit_equal(&a.second, &c.second), "{name}");
    }
}

#[test]
fn class_d_pair() {
    let g = GenParams { n: 8, class: Some(AzClass::D), delta: Some(1e-2), seed: 3, ..Default::default() };
    let p = gen_example("az", &g).unwrap();
    assert!(declared_defect(&p, &p.first, &p.second) <= 1e-10);
    assert!(comm_norm(&p.first, &p.second) <= 4.0 * 1e-2 + 1e-12);
    assert!(op_norm(&p.first) <= 1.0 + 1e-12);
}

#[test]
fn file_roundtrip() {
    let g = GenParams { n: 4, class: Some(AzClass::CII), seed: 2, ..Default::default() };
    let p = gen_example("az", &g).unwrap();
    let back = pair_from_json(&pair_to_json(&p)).unwrap();
    assert_eq!(back.first, p.first);
    assert_eq!(back.second_specs, p.second_specs);
    assert_eq!(back.class, Some(AzClass::CII));
    assert!(gen_example("nope", &g).is_err());
    assert!(gen_example("az", &GenParams { class: None, ..g }).is_err());
}
