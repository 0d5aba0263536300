use cpmackey::exactlin::{FGAb, Int, Matrix};
use cpmackey::green::*;
use cpmackey::mackey::*;
use proptest::prelude::*;

fn is_prime_oracle(q: u64) -> bool {
    q >= 2 && (2..q).all(|d| q % d != 0)
}

fn field_corpus() -> Vec<GreenFunctor> {
    vec![
        concentrated_green(2, 2).unwrap(),
        concentrated_green(3, 5).unwrap(),
        constant_green(2, 3).unwrap(),
        constant_green(3, 2).unwrap(),
        constant_green(5, 2).unwrap(),
        f4_frobenius().unwrap(),
        f8_frobenius().unwrap(),
    ]
}

#[test]
fn burnside_green_is_valid_and_commutative() {
    for p in [2, 3, 5] {
        let g = burnside_green(p).unwrap();
        let r = validate_green(&g).unwrap();
        assert!(r.valid(), "{r:?}");
        assert!(r.commutative);
    }
}

#[test]
fn constant_fields_validate() {
    for q in [2, 3, 4, 5, 0] {
        let g = constant_green(2, q).unwrap();
        let r = validate_green(&g).unwrap();
        assert!(r.valid() && r.commutative, "q={q}: {r:?}");
    }
}

#[test]
fn corrupted_mult_fails_with_witness() {
    let m = constant(2, 3).unwrap();
    let g = GreenFunctor::new(m, vec![Int::from(1)], Matrix::from_i64(1, 1, &[2]), Matrix::from_i64(1, 1, &[2])).unwrap();
    let r = validate_green(&g).unwrap();
    assert!(!r.valid());
    let unit = r.checks.iter().find(|c| c.name == "left unit").unwrap();
    assert!(!unit.passed);
    assert!(unit.witness.is_some());
}

#[test]
fn noncommutative_product_is_flagged() {
    // upper triangular 2×2 matrices over 𝔽₂ on the basis E11, E12, E22, concentrated at the top
    let m = j_top(2, &FGAb::product_of_cyclics(&[2, 2, 2])).unwrap();
    let mut e = vec![0i64; 27];
    let mut put = |out: usize, i: usize, j: usize| e[out * 9 + i * 3 + j] = 1;
    put(0, 0, 0);
    put(1, 0, 1);
    put(1, 1, 2);
    put(2, 2, 2);
    let g = GreenFunctor::new(
        m,
        vec![Int::from(1), Int::from(0), Int::from(1)],
        Matrix::from_i64(3, 9, &e),
        Matrix::zeros(0, 0),
    )
    .unwrap();
    let r = validate_green(&g).unwrap();
    assert!(r.valid(), "{r:?}");
    assert!(!r.commutative);
    assert!(matches!(is_mackey_field(&g), Err(GreenError::NotCommutative)));
}

#[test]
fn constant_f2_over_c2_has_the_expected_ideal() {
    let g = constant_green(2, 2).unwrap();
    match is_mackey_field(&g).unwrap() {
        FieldVerdict::NotField(s) => {
            assert!(s.functor.top().is_trivial());
            assert_eq!(s.functor.bottom().describe(), "Z/2");
        }
        FieldVerdict::Field => panic!("constant F2 over C2 is not a field"),
    }
}

#[test]
fn constant_f3_over_c2_is_fixed_point_field() {
    let g = constant_green(2, 3).unwrap();
    assert!(is_mackey_field(&g).unwrap().is_field());
    let c = classify_field_shape(&g).unwrap();
    assert_eq!(c.shape, FieldShape::FixedPointShape { ring_order: 3, fixed_order: 3, action_trivial: true });
}

#[test]
fn ideal_trivial_cases() {
    let g = constant_green(2, 2).unwrap();
    for s in enumerate_subfunctors(g.underlying()).unwrap() {
        let full = s.top_order() == 2 && s.bottom_order() == 2;
        if s.is_zero() || full {
            assert!(is_ideal(&g, &s, Side::TwoSided).is_ideal);
        }
    }
}

#[test]
fn concentrated_prime_fields() {
    for p in [2, 3, 5] {
        for q in 2..12u64 {
            let g = concentrated_green(p, q).unwrap();
            let v = is_mackey_field(&g).unwrap();
            assert_eq!(v.is_field(), is_prime_oracle(q), "p={p} q={q}");
            if v.is_field() {
                let c = classify_field_shape(&g).unwrap();
                assert_eq!(c.shape, FieldShape::ConcentratedAtTop { order: q });
            }
        }
    }
}

#[test]
fn frobenius_fields_classify() {
    let f4 = classify_field_shape(&f4_frobenius().unwrap()).unwrap();
    assert_eq!(f4.shape, FieldShape::FixedPointShape { ring_order: 4, fixed_order: 2, action_trivial: false });
    let f8 = classify_field_shape(&f8_frobenius().unwrap()).unwrap();
    assert_eq!(f8.shape, FieldShape::FixedPointShape { ring_order: 8, fixed_order: 2, action_trivial: false });
}

#[test]
fn every_field_classifies_and_has_field_top() {
    for g in field_corpus() {
        if let FieldVerdict::Field = is_mackey_field(&g).unwrap() {
            assert!(top_level_is_field(&g).unwrap());
            let c = classify_field_shape(&g).unwrap();
            if let FieldShape::FixedPointShape { .. } = c.shape {
                assert!(!g.underlying().tr().is_zero_map());
            }
        }
    }
}

#[test]
fn top_level_field_detection() {
    assert!(!top_level_is_field(&constant_green(2, 4).unwrap()).unwrap());
    let zero = GreenFunctor::new(zero_functor(2).unwrap(), vec![], Matrix::zeros(0, 0), Matrix::zeros(0, 0)).unwrap();
    assert!(!top_level_is_field(&zero).unwrap());
    assert!(matches!(is_mackey_field(&zero), Err(GreenError::ZeroFunctor)));
    assert!(matches!(top_level_is_field(&burnside_green(2).unwrap()), Err(GreenError::InfiniteGroup(_))));
}

#[test]
fn constant_z4_is_not_a_field() {
    assert!(!is_mackey_field(&constant_green(3, 4).unwrap()).unwrap().is_field());
}

#[test]
fn burnside_is_rejected_as_infinite_and_has_proper_principal_ideal() {
    let g = burnside_green(2).unwrap();
    assert!(matches!(is_mackey_field(&g), Err(GreenError::InfiniteGroup(_))));
    let (top, _) = principal_ideal(&g, &[Int::from(0), Int::from(1)]);
    assert!(!contains_unit(&g, &top));
}

#[test]
fn twisted_module_with_zero_twist_is_base() {
    for g in [f4_frobenius().unwrap(), burnside_green(3).unwrap(), constant_green(2, 5).unwrap()] {
        let base = GreenModule::regular(&g, Side::Left);
        let t0 = TwistedModule::new(&base, 0).unwrap();
        assert_eq!(t0.module.action.bot_matrix(), base.action.bot_matrix());
        assert_eq!(t0.module.action.top_matrix(), base.action.top_matrix());
        for t in 1..g.prime() {
            TwistedModule::new(&base, t).unwrap();
        }
    }
}

#[test]
fn relative_box_over_ring_is_ring() {
    let g = f4_frobenius().unwrap();
    let r = GreenModule::regular(&g, Side::Right);
    let l = GreenModule::regular(&g, Side::Left);
    let (b, proj) = relative_box(&r, &l).unwrap();
    assert_eq!(b.functor().canonical(), g.underlying().canonical());
    assert!(proj.f_top().is_surjective());
}

#[test]
fn wrong_sides_are_rejected() {
    let g = constant_green(2, 3).unwrap();
    let l = GreenModule::regular(&g, Side::Left);
    assert!(matches!(relative_box(&l, &l), Err(GreenError::NotAModule(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn constant_green_field_iff_prime_not_dividing_p(p in prop::sample::select(vec![2u32, 3, 5]), q in 2u64..10) {
        let g = constant_green(p, q).unwrap();
        let field = is_mackey_field(&g).unwrap().is_field();
        // tr is multiplication by p; it must be invertible for the bottom not to be an ideal
        let expected = is_prime_oracle(q) && q % p as u64 != 0;
        prop_assert_eq!(field, expected);
        if field {
            prop_assert!(top_level_is_field(&g).unwrap());
        }
    }

    #[test]
    fn scaled_constant_products(q in 2u64..8, c in 1i64..8) {
        // x·y = c x y is always associative, and unital with unit 1 iff c = 1 mod q
        let m = constant(2, q).unwrap();
        let mult = Matrix::from_i64(1, 1, &[c]);
        let g = GreenFunctor::new(m, vec![Int::from(1)], mult.clone(), mult).unwrap();
        let r = validate_green(&g).unwrap();
        let passed = |n: &str| r.checks.iter().find(|k| k.name == n).unwrap().passed;
        prop_assert!(passed("associativity"));
        prop_assert_eq!(passed("left unit"), (c - 1).rem_euclid(q as i64) == 0);
        prop_assert_eq!(passed("right unit"), (c - 1).rem_euclid(q as i64) == 0);
    }
}
