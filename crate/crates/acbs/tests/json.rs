use acbs::json::*;
use acbs_core::generate::{random_complex, random_unitary, rng};
use acbs_core::linalg::ComplexMatrix;
use acbs_core::symmetry::{MapKind, PhaseSpec, SymmetryMap};
use acbs_core::C64;
use proptest::prelude::*;
use serde_json::json;

fn bits(m: &ComplexMatrix) -> Vec<(u64, u64)> {
    m.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
}

proptest! {
    #[test]
    fn matrix_roundtrip_is_bit_exact(seed in 0u64..100_000, n in 0usize..9, scale in -300i32..300) {
        let mut r = rng(seed);
        let m = random_complex(n, &mut r) * C64::new(10f64.powi(scale), 0.0);
        let text = serde_json::to_string(&matrix_to_json(&m)).unwrap();
        let back = matrix_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(bits(&back), bits(&m));
    }

    #[test]
    fn spec_roundtrip(seed in 0u64..100_000, k in 0usize..4, t in -3.2f64..3.2) {
        let mut r = rng(seed);
        let map = SymmetryMap::new(MapKind::ALL[k], random_unitary(3, &mut r)).unwrap();
        let spec = PhaseSpec::new(map, C64::from_polar(1.0, t));
        let text = serde_json::to_string(&spec_to_json(&spec)).unwrap();
        let back = spec_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        prop_assert_eq!(back, spec);
    }
}

#[test]
fn malformed_inputs() {
    assert!(matrix_from_json(&json!({ "rows": 2, "cols": 2, "data": [[0.0, 0.0]] })).is_err());
    assert!(matrix_from_json(&json!({ "rows": 1, "cols": 2, "data": [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]] })).is_err());
    assert!(matrix_from_json(&json!([1, 2])).is_err());
    let w = matrix_to_json(&acbs_core::linalg::identity(2));
    assert!(map_from_json(&json!({ "kind": "XY", "W": w })).is_err());
    let bad_w = matrix_to_json(&(acbs_core::linalg::identity(2) * C64::new(2.0, 0.0)));
    assert!(map_from_json(&json!({ "kind": "LM", "W": bad_w })).is_err());
    assert!(specs_from_json(None).unwrap().is_empty());
}

#[test]
fn complex_roundtrip() {
    for z in [C64::new(0.1, -0.2), C64::new(f64::MIN_POSITIVE, 1e308), C64::new(-0.0, 0.0)] {
        let back = complex_from_json(&complex_to_json(z)).unwrap();
        assert_eq!((back.re.to_bits(), back.im.to_bits()), (z.re.to_bits(), z.im.to_bits()));
    }
}
