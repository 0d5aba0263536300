use cpmackey::boxtensor::DEFAULT_GENERATOR_LIMIT as LIMIT;
use cpmackey::exactlin::FGAb;
use cpmackey::grading::RODegree;
use cpmackey::green::*;
use cpmackey::hochschild::*;
use cpmackey::mackey::*;
use cpmackey::simplicial::tensor_green_with_circle;
use proptest::prelude::*;

fn f2_top(p: u32) -> ClassifiedField {
    classify_field_shape(&concentrated_green(p, 2).unwrap()).unwrap()
}

/// Basis count of k[b] ⊗ Λ[z] by listing exponent vectors and exterior subsets.
fn koszul_oracle(weights: &[u32], s: u32, w: u32) -> u64 {
    let n = weights.len();
    let mut count = 0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() != s {
            continue;
        }
        let zw: u32 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| weights[i]).sum();
        if zw > w {
            continue;
        }
        let rest = w - zw;
        // count exponent vectors with Σ e_i d_i = rest
        let mut stack = vec![(0usize, rest)];
        while let Some((i, left)) = stack.pop() {
            if i == n {
                if left == 0 {
                    count += 1;
                }
                continue;
            }
            let mut e = 0;
            while e * weights[i] <= left {
                stack.push((i + 1, left - e * weights[i]));
                e += 1;
            }
        }
    }
    count
}

#[test]
fn burnside_over_burnside_is_constant() {
    let a = burnside_green(2).unwrap();
    let bar = twisted_cyclic_bar(&Base::Burnside, &a, 1, 3, LIMIT).unwrap();
    for level in &bar.complex.levels {
        assert_eq!(level.functor().canonical(), a.underlying().canonical());
    }
    let h = hh_of_bar(&bar).unwrap();
    assert_eq!(h[0].canonical, a.underlying().canonical());
    assert!(h[1].functor.is_zero());
    assert!(h[1].certified && !h[2].certified);
}

#[test]
fn levels_of_top_concentrated_algebras_stay_at_the_top() {
    let g = concentrated_green(3, 5).unwrap();
    let bar = twisted_cyclic_bar(&Base::Burnside, &g, 1, 3, LIMIT).unwrap();
    for level in &bar.complex.levels {
        assert!(level.functor().bottom().is_trivial());
    }
}

#[test]
fn twist_is_taken_mod_p() {
    let g = f4_frobenius().unwrap();
    let a = twisted_cyclic_bar(&Base::Burnside, &g, 0, 3, LIMIT).unwrap();
    let b = twisted_cyclic_bar(&Base::Burnside, &g, 2, 3, LIMIT).unwrap();
    assert!(a.complex.identical(&b.complex));
}

#[test]
fn untwisted_hh0_is_the_algebra() {
    for g in [f4_frobenius().unwrap(), constant_green(2, 3).unwrap(), burnside_green(3).unwrap()] {
        let h = hh(&Base::Burnside, &g, 0, 2, LIMIT).unwrap();
        assert_eq!(h[0].canonical, g.underlying().canonical());
    }
}

#[test]
fn hh_of_the_top_field() {
    let g = concentrated_green(2, 2).unwrap();
    let h = hh(&Base::Burnside, &g, 1, 4, LIMIT).unwrap();
    assert_eq!(h[0].top, "Z/2");
    assert!(h[0].functor.bottom().is_trivial());
    assert!(h[1].functor.is_zero());
    assert!(h[2].functor.is_zero());
    assert!(h[2].certified && !h[3].certified);
}

#[test]
fn hh_over_itself_is_the_algebra_in_degree_zero() {
    let g = f4_frobenius().unwrap();
    let h = hh(&Base::over_itself(&g), &g, 0, 3, LIMIT).unwrap();
    assert_eq!(h[0].canonical, g.underlying().canonical());
    assert!(h[1].functor.is_zero());
}

#[test]
fn frobenius_twist_over_itself_kills_the_unit() {
    // at the bottom 1 = ω − γ(ω) lies in the twisted relations
    let g = f4_frobenius().unwrap();
    let h = hh(&Base::over_itself(&g), &g, 1, 3, LIMIT).unwrap();
    assert!(h.iter().all(|e| e.functor.is_zero()));
}

#[test]
fn direct_route_matches_tensor_with_the_circle() {
    let g = f4_frobenius().unwrap();
    let bar = twisted_cyclic_bar(&Base::Burnside, &g, 1, 3, LIMIT).unwrap();
    let circle = tensor_green_with_circle(&g, 3, LIMIT).unwrap();
    assert!(bar.complex.identical(&circle));
}

#[test]
fn hh_agrees_with_tor_over_the_enveloping_algebra() {
    let inputs: Vec<(GreenFunctor, u32)> = vec![
        (f4_frobenius().unwrap(), 0),
        (f4_frobenius().unwrap(), 1),
        (constant_green(2, 3).unwrap(), 1),
        (concentrated_green(3, 2).unwrap(), 1),
    ];
    for (g, t) in inputs {
        let direct = hh(&Base::Burnside, &g, t, 3, LIMIT).unwrap();
        let tor = hh_via_tor(&g, t, 1, LIMIT).unwrap();
        for s in 0..=1 {
            assert_eq!(direct[s].canonical, tor[s].canonical, "s={s} t={t}");
        }
    }
}

#[test]
fn tor_zero_is_the_relative_box() {
    for g in [f4_frobenius().unwrap(), constant_green(3, 2).unwrap()] {
        let r = GreenModule::regular(&g, Side::Right);
        let l = GreenModule::regular(&g, Side::Left);
        let tor = tor_via_bar(&g, &r, &l, 0, LIMIT).unwrap();
        let (b, _) = relative_box(&r, &l).unwrap();
        assert_eq!(tor[0].canonical, b.functor().canonical());
    }
}

#[test]
fn tor_rejects_swapped_sides() {
    let g = constant_green(2, 3).unwrap();
    let l = GreenModule::regular(&g, Side::Left);
    assert!(tor_via_bar(&g, &l, &l, 0, LIMIT).is_err());
}

#[test]
fn noncommutative_or_oversized_inputs_are_rejected() {
    let m = j_top(2, &FGAb::product_of_cyclics(&[2, 2, 2])).unwrap();
    let mut e = vec![0i64; 27];
    for (out, i, j) in [(0, 0, 0), (1, 0, 1), (1, 1, 2), (2, 2, 2)] {
        e[out * 9 + i * 3 + j] = 1;
    }
    let upper = GreenFunctor::new(
        m,
        vec![1.into(), 0.into(), 1.into()],
        cpmackey::exactlin::Matrix::from_i64(3, 9, &e),
        cpmackey::exactlin::Matrix::zeros(0, 0),
    )
    .unwrap();
    assert!(matches!(hh(&Base::Burnside, &upper, 1, 2, LIMIT), Err(HochschildError::NotAnAlgebra(_))));
    let g = burnside_green(5).unwrap();
    assert!(matches!(hh(&Base::Burnside, &g, 1, 6, 50), Err(HochschildError::SizeLimit { .. })));
}

#[test]
fn koszul_generating_function_matches_enumeration() {
    for weights in [vec![1u32], vec![1, 2], vec![2, 3], vec![1, 1, 2]] {
        let gf = koszul_ranks(&weights, 3, 8);
        for s in 0..=3 {
            for w in 0..=8 {
                assert_eq!(gf[&(s, w)], koszul_oracle(&weights, s, w), "{weights:?} s={s} w={w}");
            }
        }
    }
}

#[test]
fn e2_single_generator() {
    let f = f2_top(2);
    let r = bokstedt_e2(&f, &[RODegree::rho(2, 1)], 2, 4, LIMIT).unwrap();
    assert!(r.agree, "{:?}", r.mismatches);
    for s in 0..=2 {
        for w in 0..=4 {
            assert_eq!(r.computed.rank(s, w), Some(koszul_oracle(&[1], s, w)));
        }
    }
    assert!(r.collapse.collapse_certified);
}

#[test]
fn e2_two_generators() {
    let f = f2_top(2);
    let r = bokstedt_e2(&f, &[RODegree::rho(2, 1), RODegree::rho(2, 2)], 2, 3, LIMIT).unwrap();
    assert!(r.agree, "{:?}", r.mismatches);
    for e in &r.computed.entries {
        assert_eq!(e.rank, koszul_oracle(&[1, 2], e.s, e.weight));
    }
}

#[test]
fn e2_at_an_odd_prime() {
    let f = f2_top(3);
    let r = bokstedt_e2(&f, &[RODegree::rho(3, 1)], 2, 3, LIMIT).unwrap();
    assert!(r.agree, "{:?}", r.mismatches);
}

#[test]
fn e2_slices_are_independent() {
    let f = f2_top(2);
    let gens = [RODegree::rho(2, 1), RODegree::rho(2, 2)];
    let full = bokstedt_e2(&f, &gens, 2, 3, LIMIT).unwrap();
    for (s, w) in [(0, 2), (1, 3), (2, 3), (1, 1)] {
        let single = e2_entry(&f, &gens, s, w, LIMIT).unwrap();
        assert_eq!(Some(single.rank), full.computed.rank(s, w));
    }
}

#[test]
fn e2_rejects_other_coefficients() {
    let f = f2_top(2);
    let bad = RODegree::new(2, 1, vec![0]).unwrap();
    assert!(matches!(bokstedt_e2(&f, &[bad], 1, 2, LIMIT), Err(HochschildError::Unsupported(_))));
    let f3 = classify_field_shape(&constant_green(2, 3).unwrap()).unwrap();
    assert!(matches!(bokstedt_e2(&f3, &[RODegree::rho(2, 1)], 1, 2, LIMIT), Err(HochschildError::Unsupported(_))));
}

#[test]
fn polynomial_tower_ranks() {
    // the coefficients are nonzero exactly in fixed dimension zero, so only weight a(d) contributes at d
    let f = f2_top(2);
    let window = cpmackey::grading::Window::parse(2, "a=-1..4,m=-2..3").unwrap();
    let t = polynomial_tower(&f, &[RODegree::rho(2, 1), RODegree::rho(2, 2)], &window, LIMIT).unwrap();
    for d in window.degrees(2) {
        let expected = if d.a < 0 { 0 } else { koszul_oracle(&[1, 2], 0, d.a as u32) as usize };
        assert_eq!(t.rank(&d), expected, "{}", d.key());
    }
    assert!(matches!(
        polynomial_tower(&f, &[RODegree::rho(2, 1)], &window, 3),
        Err(HochschildError::WindowOverflow { .. })
    ));
}

fn one_gen() -> KoszulAlgebra {
    KoszulAlgebra { p: 2, characteristic: 2, weights: vec![1], s_max: 3, weight_max: 6 }
}

#[test]
fn zero_differential_collapses() {
    let r = leibniz_check(&one_gen(), &CandidateDifferential { r: 2, values: vec![] }).unwrap();
    assert!(r.consistent && r.collapse_certified);
    assert!(r.generators.iter().all(|g| g.forced_zero));
}

#[test]
fn fabricated_value_in_a_zero_group_is_inconsistent() {
    let d = CandidateDifferential {
        r: 2,
        values: vec![DifferentialValue {
            generator: "b1".into(),
            target_s: -2,
            target_degree: RODegree::rho(2, 1).add(&RODegree::integer(2, 1)),
            coefficients: vec![1],
        }],
    };
    let r = leibniz_check(&one_gen(), &d).unwrap();
    assert!(!r.consistent && !r.collapse_certified);
    let square = r.propagations.iter().find(|p| p.product == "b1^2").unwrap();
    assert_eq!(square.leibniz_coefficient, 0);
    let cube = r.propagations.iter().find(|p| p.product == "b1^3").unwrap();
    assert!(!cube.consistent);
}

#[test]
fn wrong_bidegree_is_rejected() {
    let d = CandidateDifferential {
        r: 2,
        values: vec![DifferentialValue {
            generator: "z1".into(),
            target_s: 0,
            target_degree: RODegree::rho(2, 1),
            coefficients: vec![0],
        }],
    };
    assert!(matches!(leibniz_check(&one_gen(), &d), Err(HochschildError::BidegreeMismatch(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn koszul_counts(weights in prop::collection::vec(1u32..4, 1..4), s in 0u32..4, w in 0u32..9) {
        prop_assert_eq!(koszul_ranks(&weights, 3, 8)[&(s, w)], koszul_oracle(&weights, s, w));
    }

    #[test]
    fn zero_values_never_break_consistency(weights in prop::collection::vec(1u32..3, 1..3), r in 2i64..5) {
        let alg = KoszulAlgebra { p: 2, characteristic: 2, weights, s_max: 3, weight_max: 6 };
        let rep = leibniz_check(&alg, &CandidateDifferential { r, values: vec![] }).unwrap();
        prop_assert!(rep.consistent && rep.collapse_certified);
    }
}


#[test]
fn top_field_over_itself() {
    for p in [2, 3] {
        let g = concentrated_green(p, 2).unwrap();
        let h = hh(&Base::over_itself(&g), &g, 1, 4, LIMIT).unwrap();
        assert_eq!(h[0].canonical, g.underlying().canonical());
        assert!(h[1].functor.is_zero() && h[2].functor.is_zero());
        assert!(h.iter().all(|e| e.functor.bottom().is_trivial()));
    }
}

#[test]
fn tor_of_the_field_with_itself() {
    let g = concentrated_green(2, 2).unwrap();
    let r = GreenModule::regular(&g, Side::Right);
    let l = GreenModule::regular(&g, Side::Left);
    let tor = tor_via_bar(&g, &r, &l, 3, LIMIT).unwrap();
    assert_eq!(tor[0].canonical, g.underlying().canonical());
    assert!(tor[1..].iter().all(|e| e.functor.is_zero()));
}

#[test]
fn top_field_routes_agree_through_degree_two() {
    let g = concentrated_green(2, 2).unwrap();
    let direct = hh(&Base::Burnside, &g, 1, 4, LIMIT).unwrap();
    let tor = hh_via_tor(&g, 1, 2, LIMIT).unwrap();
    for s in 0..=2 {
        assert!(direct[s].certified);
        assert_eq!(direct[s].canonical, tor[s].canonical, "s={s}");
    }
}

#[test]
fn no_generators() {
    let f = f2_top(2);
    let r = bokstedt_e2(&f, &[], 2, 3, LIMIT).unwrap();
    assert!(r.agree);
    for e in &r.computed.entries {
        assert_eq!(e.rank, u64::from(e.s == 0 && e.weight == 0));
    }
    let window = cpmackey::grading::Window::symmetric(2, 2, 2);
    let t = polynomial_tower(&f, &[], &window, LIMIT).unwrap();
    for d in window.degrees(2) {
        let expected = usize::from(!cpmackey::grading::em_homotopy(&f, &d).unwrap().is_zero());
        assert_eq!(t.rank(&d), expected);
    }
}

#[test]
fn tower_products_add_monomials() {
    let f = f2_top(2);
    let window = cpmackey::grading::Window::parse(2, "a=0..3,m=0..3").unwrap();
    let t = polynomial_tower(&f, &[RODegree::rho(2, 1)], &window, LIMIT).unwrap();
    let (r1, r2) = (RODegree::rho(2, 1), RODegree::rho(2, 2));
    let pairing = t.graded.product(&r1, &r1).unwrap();
    // b · b = b²
    assert_eq!(pairing.apply_top(&[1.into()], &[1.into()]), vec![cpmackey::exactlin::Int::from(1)]);
    assert_eq!(t.rank(&r2), 1);
}
