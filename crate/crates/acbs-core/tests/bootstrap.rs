use acbs_core::bootstrap::*;
use acbs_core::generate::{az_pair, phase_instance, random_complex, rng};
use acbs_core::linalg::*;
use acbs_core::oracle::{commuting_approx_sa, commuting_approx_unitary};
use acbs_core::region::Region;
use acbs_core::symmetry::{star_twist, AzClass, ClassRole, PhaseSpec, SymmetryMap};
use proptest::prelude::*;
use std::f64::consts::PI;

fn eq_strategy() -> impl Strategy<Value = Equivariance> {
    prop_oneof![
        Just(Equivariance::None),
        Just(Equivariance::Conjugation),
        (2usize..9).prop_map(Equivariance::Rotation),
        (2usize..9).prop_map(Equivariance::Dihedral),
    ]
}

fn cfg() -> BootstrapConfig {
    BootstrapConfig::default()
}

/// Class pair with `X = H`, `B = x`, time reversal moved into `S`.
fn sa_run(class: AzClass, n: usize, seed: u64) -> (acbs_core::generate::AzPair, Vec<SymmetryMap>, Option<PhaseCond>, BootstrapOutput) {
    let p = az_pair(class, n, None, seed).unwrap();
    let ap = commuting_approx_sa(&p.h, &p.x, None, &p.h_specs(), &p.x_specs()).unwrap();
    let mut s = Vec::new();
    let mut anti = None;
    for op in &p.ops {
        match op.role {
            ClassRole::T => s.push(star_twist(&op.map)),
            _ => anti = Some(PhaseCond::new(op.map.clone(), op.h_phase, op.x_phase, false)),
        }
    }
    let out = bootstrap_sa(&p.h, &p.x, &ap.first_prime, &ap.b_prime, &s, anti.as_ref(), &cfg()).unwrap();
    (p, s, anti, out)
}

fn unitary_run(order: usize, k: usize, dihedral: bool, seed: u64) -> (UnitaryCase, BootstrapOutput) {
    let inst = phase_instance(order, k, 1e-3, dihedral, seed).unwrap();
    let pd = polar_decompose(&inst.a).unwrap();
    let p = re_part(&pd.p);
    let rot = PhaseCond::new(inst.rot.clone(), inst.zeta, ONE, false);
    let case = if dihedral {
        UnitaryCase::Dihedral { rot, conj: PhaseCond::new(inst.reflection.clone().unwrap(), ONE, ONE, false), n: order }
    } else {
        UnitaryCase::Rot { cond: rot, n: order }
    };
    let u_specs: Vec<PhaseSpec> = case.conds().iter().map(|c| c.first_spec()).collect();
    let b_specs: Vec<PhaseSpec> = case.conds().iter().map(|c| c.b_spec()).collect();
    let ap = commuting_approx_unitary(&pd.u, &p, None, &u_specs, &b_specs).unwrap();
    let out = bootstrap_unitary(&pd.u, &p, &ap.first_prime, &ap.b_prime, &[], &case, &cfg()).unwrap();
    (case, out)
}

#[test]
fn circle_partition_example() {
    let p = plan_circle_partition(PI / 13.0, Equivariance::None).unwrap();
    assert_eq!(p.n0, 4);
    assert!((p.l - PI / 13.0).abs() < 1e-15);
    assert!((p.gap_len - 5.0 * PI / 26.0).abs() < 1e-14);
    assert!(plan_circle_partition(1e-9, Equivariance::None).is_err());
    assert!(plan_circle_partition(0.1, Equivariance::Rotation(1)).is_err());
}

#[test]
fn line_partition_example() {
    let p = plan_line_partition(0.1, -1.0, 1.0, true).unwrap();
    assert_eq!(p.k_range, (-2, 3));
    let t = p.tile(1);
    assert!(matches!(t.window, acbs_core::projection::Window::Line { lo, hi, .. } if (lo - 0.1).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15));
    assert!((p.gap(0).anchor.re).abs() < 1e-15);
    assert!(plan_line_partition(0.0, -1.0, 1.0, false).is_err());
}

#[test]
fn roots() {
    assert_eq!(root_order(C64::from_polar(1.0, 2.0 * PI / 6.0), 12), Some(6));
    assert_eq!(root_order(-ONE, 12), Some(2));
    assert_eq!(root_order(C64::from_polar(1.0, 1.0), 12), None);
}

#[test]
fn large_epsilon_zeroes_first() {
    let x = real_diag(&[0.5, -0.5]);
    let b = from_rows(2, &[ZERO, real(0.1), real(0.1), ZERO]).unwrap();
    let out = bootstrap_sa(&x, &b, &zeros(2), &b, &[], None, &cfg()).unwrap();
    assert_eq!(out.first, zeros(2));
    assert_eq!(out.b, b);
    assert!(out.report.all_pass());
}

#[test]
fn commuting_input_unchanged() {
    let x = real_diag(&[0.5, -0.5, 0.1]);
    let b = diag(&[I, ONE, real(0.3)]);
    let out = bootstrap_sa(&x, &b, &x, &b, &[], None, &cfg()).unwrap();
    assert_eq!(out.first, x);
    assert_eq!(out.b, b);
    let u = diag(&[I, -ONE, ONE]);
    let out = bootstrap_unitary(&u, &b, &u, &b, &[], &UnitaryCase::None, &cfg()).unwrap();
    assert_eq!(out.first, u);
    assert!(out.report.all_pass());
}

#[test]
fn rejects_bad_inputs() {
    let x = real_diag(&[0.5, -0.5]);
    let b = from_rows(2, &[ZERO, real(0.1), real(0.1), ZERO]).unwrap();
    // approximant pair does not commute
    assert!(bootstrap_sa(&x, &b, &x, &b, &[], None, &cfg()).is_err());
    assert!(bootstrap_sa(&(&x * real(3.0)), &b, &zeros(2), &b, &[], None, &cfg()).is_err());
    assert!(bootstrap_sa(&x, &b, &zeros(2), &b, &[SymmetryMap::conjugation(2)], None, &cfg()).is_err());
}

#[test]
fn class_instances() {
    for (i, class) in [AzClass::D, AzClass::C, AzClass::BDI, AzClass::CII, AzClass::DIII, AzClass::CI, AzClass::AIII].into_iter().enumerate() {
        let (p, s, anti, out) = sa_run(class, 8, 100 + i as u64);
        let rep = &out.report;
        assert!(rep.all_pass(), "{}: {:?}", class.name(), rep.pass);
        assert!(comm_norm(&out.first, &out.b) <= COMMUTATION_TOL);
        assert!(rep.distances["first"] <= 45.0 * rep.epsilon.sqrt() + BOUND_SLACK);
        for op in &p.ops {
            assert!(op.h_spec().defect(&out.first) <= SYMMETRY_TOL);
            assert!(op.x_spec().defect(&out.b) <= SYMMETRY_TOL);
        }
        let res = out.resolution.as_ref().expect("partition path taken");
        {
            assert!(res.sum_defect() < 1e-8);
            assert!(res.projection_defect() < 1e-8);
            assert!(res.orthogonality_defect() < 1e-8);
            assert!(comm_norm(&res.assemble(), &out.first) < 1e-10);
            if let Some(a) = &anti {
                let g = GroupElement { map: a.map.clone(), rotate: -ONE, conj: false, reverses: true };
                assert!(res.equivariance_defect(&g) < 1e-9, "{}", class.name());
                let mut r = rng(i as u64);
                let b = random_complex(8, &mut r);
                let lhs = a.map.act(&res.pinch(&b).unwrap());
                assert!(dist(&lhs, &res.pinch(&a.map.act(&b)).unwrap()) < 1e-9);
            }
            for m in &s {
                assert!(dist(&m.act(&out.first), &out.first) < SYMMETRY_TOL);
            }
        }
    }
}

#[test]
fn rotation_and_dihedral_runs() {
    for (order, k, dihedral) in [(2, 4, false), (4, 2, false), (3, 3, false), (2, 4, true), (4, 3, true)] {
        let (case, out) = unitary_run(order, k, dihedral, 7 + order as u64);
        assert!(out.report.all_pass(), "{} {order}: {:?}", case.name(), out.report.pass);
        assert!(unitary_defect(&out.first) < 1e-10);
        let res = out.resolution.as_ref().expect("partition path taken");
        {
            assert!(res.sum_defect() < 1e-8);
            for g in case.group_elements().unwrap() {
                assert!(res.equivariance_defect(&g) < 1e-9);
            }
            let part = out.partition.as_ref().unwrap();
            assert_eq!(part.n0 % case.equivariance().divisor(), 0);
        }
    }
}

#[test]
fn invalid_cases() {
    let inst = phase_instance(3, 2, 1e-3, true, 1).unwrap();
    let bad = UnitaryCase::Rot { cond: PhaseCond::new(inst.rot.clone(), ONE, ONE, false), n: 3 };
    assert!(bad.validate().is_err());
    let wrong_order = UnitaryCase::Rot { cond: PhaseCond::new(inst.rot.clone(), inst.zeta, ONE, false), n: 2 };
    assert!(wrong_order.validate().is_err());
    let conj = UnitaryCase::Conj(PhaseCond::new(inst.rot.clone(), ONE, ONE, false));
    assert!(conj.validate().is_err());
    let ok = UnitaryCase::Dihedral { rot: PhaseCond::new(inst.rot.clone(), inst.zeta, ONE, false), conj: PhaseCond::new(inst.reflection.unwrap(), ONE, ONE, false), n: 3 };
    assert!(ok.validate().is_ok());
    assert_eq!(ok.group_elements().unwrap().len(), 5);
}

#[test]
fn normal_pipeline() {
    // B = i x + H/2 obeys C(B) = -B and is far from normal
    let p = az_pair(AzClass::D, 8, Some(1e-4), 3).unwrap();
    let c = p.ops[0].map.clone();
    let b = scale_to(&(&p.x * I + &p.h * real(0.5)));
    let spec = PhaseSpec::new(c.clone(), -ONE);
    let ap = commuting_approx_sa(&p.h, &b, None, &p.h_specs(), std::slice::from_ref(&spec)).unwrap();
    let anti = PhaseCond::new(c, -ONE, -ONE, false);
    let out = lin_normal_pipeline(&p.h, &b, &ap.first_prime, &ap.b_prime, &[], Some(&anti), &cfg()).unwrap();
    assert!(out.report.all_pass(), "{:?}", out.report.pass);
    assert!(normal_defect(&out.b) < 1e-8);
    assert!(comm_norm(&out.x, &out.b) < 1e-10);
    assert!(spec.defect(&out.b) < 1e-8);
}

fn scale_to(a: &ComplexMatrix) -> ComplexMatrix {
    a / real(op_norm(a).max(1.0))
}

#[test]
fn lin_pipeline() {
    for (order, k, dihedral) in [(2, 3, false), (3, 2, false), (4, 2, false), (2, 4, true), (3, 3, true)] {
        let inst = phase_instance(order, k, 1e-3, dihedral, 40 + k as u64).unwrap();
        let rot = PhaseCond::new(inst.rot.clone(), inst.zeta, ONE, false);
        let case = if dihedral {
            UnitaryCase::Dihedral { rot, conj: PhaseCond::new(inst.reflection.clone().unwrap(), ONE, ONE, false), n: order }
        } else {
            UnitaryCase::Rot { cond: rot, n: order }
        };
        let out = rotational_dihedral_lin(&inst.a, &[], &case, &cfg()).unwrap();
        assert!(out.report.all_pass(), "{order} {dihedral}: {:?}", out.report.pass);
        assert!(normal_defect(&out.a) < 1e-8);
        assert!(dist(&out.a, &(&out.u * &out.p)) < 1e-12);
        for c in case.conds() {
            assert!(c.first_defect(&out.a) < 1e-8);
        }
    }
}

#[test]
fn lin_keeps_normal_input() {
    let inst = phase_instance(3, 2, 0.0, false, 5).unwrap();
    let case = UnitaryCase::Rot { cond: PhaseCond::new(inst.rot.clone(), inst.zeta, ONE, false), n: 3 };
    let out = rotational_dihedral_lin(&inst.a, &[], &case, &cfg()).unwrap();
    assert!(dist(&out.a, &inst.a) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn circle_partitions(l in 1e-4f64..1.5, eq in eq_strategy()) {
        let p = plan_circle_partition(l, eq).unwrap();
        let d = eq.divisor();
        prop_assert_eq!(p.n0 % d, 0);
        prop_assert!(p.l <= l * (1.0 + 1e-12));
        prop_assert!(p.gap_len >= 2.0 * p.l * (1.0 - 1e-9) && p.gap_len <= 3.0 * p.l * (1.0 + 1e-9));
        prop_assert!((p.n0 as f64 * (4.0 * p.l + p.gap_len) - 2.0 * PI).abs() < 1e-9);
        if p.n0 > d {
            // fewer tiles would force L above the target
            prop_assert!(2.0 * PI / (7.0 * (p.n0 - d) as f64) > l * (1.0 - 1e-9));
        }
        let n0 = p.n0 as i64;
        for k in [1, n0 / 2 + 1, n0] {
            let t = p.tile(k);
            prop_assert_eq!(p.tile_for_anchor(t.anchor), k);
            prop_assert!(p.tiles_near(t.anchor).contains(&k));
            let g = p.gap(k);
            prop_assert_eq!(p.gap_for_anchor(g.anchor), k % n0);
            prop_assert!(g.region.contains(g.anchor));
            // gap k sits between tile k and tile k + 1
            if let (acbs_core::projection::Window::Arc { end, .. }, Region::Arc { start, .. }) = (t.window, g.region) {
                let diff = normalize_angle(end - start);
                prop_assert!(diff.abs() < 1e-9 || (diff - 2.0 * PI).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn line_partitions(l in 1e-3f64..0.5, lo in -1.0f64..0.0, hi in 0.0f64..1.0, anti in any::<bool>()) {
        let p = plan_line_partition(l, lo, hi, anti).unwrap();
        let (a, b) = p.k_range;
        prop_assert!(((6 * a - 5) as f64) * l <= lo - 6.0 * l + 1e-12);
        prop_assert!(((6 * b - 1) as f64) * l >= hi + 6.0 * l - 1e-12);
        if anti {
            prop_assert_eq!(a, 1 - b);
        }
        for k in a..=b {
            prop_assert_eq!(p.tile_for_anchor(p.tile(k).anchor), k);
            prop_assert_eq!(p.gap_for_anchor(p.gap(k).anchor), k);
        }
    }

    #[test]
    fn unitary_scale_is_optimal(k in 1e-6f64..1e-2, eps in 1e-6f64..1e-2, eq in eq_strategy()) {
        let f = |l: f64| (5.5 * l).max(k / l + 2.0 * eps);
        let Some(best) = choose_unitary_l(k, eps, eq).unwrap() else { return Ok(()); };
        let d = eq.divisor();
        let mut grid_min = f64::INFINITY;
        for m in 1..400 {
            let n0 = (m * d) as f64;
            let (a, b) = (2.0 * PI / (7.0 * n0), 2.0 * PI / (6.0 * n0));
            for i in 0..=50 {
                grid_min = grid_min.min(f(a + (b - a) * i as f64 / 50.0));
            }
        }
        prop_assert!(f(best) <= grid_min * (1.0 + 1e-9));
        let p = plan_circle_partition(best * (1.0 + 1e-12), eq).unwrap();
        prop_assert!((p.l - best).abs() <= 1e-9 * best);
    }
}
