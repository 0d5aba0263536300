use cpmackey::exactlin::{FGAb, Int};
use cpmackey::green::*;
use cpmackey::grading::*;
use cpmackey::mackey::*;
use proptest::prelude::*;

fn classified(g: GreenFunctor) -> ClassifiedField {
    classify_field_shape(&g).unwrap()
}

/// Orders of (top, bottom) read off from the case displays, computed without the library's constructors.
fn expected_orders(kind: &str, bottom: &[u64], gamma: &dyn Fn(u64) -> u64, fixed: u64, d: &RODegree) -> (u64, u64) {
    let ring: u64 = bottom.iter().product();
    match kind {
        "concentrated" => {
            if d.fixed_dim() == 0 {
                (fixed, 1)
            } else {
                (1, 1)
            }
        }
        "c2" => {
            if d.dim() != 0 {
                (1, 1)
            } else if d.a.rem_euclid(2) == 0 {
                (fixed, ring)
            } else {
                // fixed points of −γ, counted by brute force over the ring
                let neg_fixed = (0..ring).filter(|&x| (ring - gamma(x)) % ring == x % ring).count() as u64;
                (neg_fixed, ring)
            }
        }
        _ => {
            if d.dim() == 0 {
                (fixed, ring)
            } else {
                (1, 1)
            }
        }
    }
}

fn orders(m: &MackeyFunctor) -> (u64, u64) {
    (m.top().order_u64().unwrap(), m.bottom().order_u64().unwrap())
}

#[test]
fn rotating_sign_examples() {
    let rho = RODegree::rho(2, 1);
    assert_eq!(rotating_sign(&rho, &rho).unwrap(), RotatingSign { sign_top: -1, sign_bot: 1 });
    let z = RODegree::zero(2);
    assert_eq!(rotating_sign(&z, &rho).unwrap(), RotatingSign { sign_top: 1, sign_bot: 1 });
    let r2 = RODegree::rho(2, 2);
    assert_eq!(rotating_sign(&r2, &r2).unwrap(), RotatingSign { sign_top: 1, sign_bot: 1 });
    let s = rotating_sign(&rho, &rho).unwrap();
    assert_eq!(s.burnside_element(2), (Int::from(-1), Int::from(1)));
}

#[test]
fn em_grid_concentrated_f2() {
    let f = classified(concentrated_green(2, 2).unwrap());
    for d in Window::symmetric(2, 4, 4).degrees(2) {
        let got = orders(&em_homotopy(&f, &d).unwrap());
        assert_eq!(got, expected_orders("concentrated", &[], &|x| x, 2, &d), "{d}");
        if got.0 > 1 {
            assert!(em_homotopy(&f, &d).unwrap().bottom().is_trivial());
        }
    }
}

#[test]
fn em_grid_constant_f3_over_c2() {
    let f = classified(constant_green(2, 3).unwrap());
    for d in Window::symmetric(2, 4, 4).degrees(2) {
        let m = em_homotopy(&f, &d).unwrap();
        assert_eq!(orders(&m), expected_orders("c2", &[3], &|x| x, 3, &d), "{d}");
        assert!(validate_mackey(&m).all_passed());
    }
    let j = em_homotopy(&f, &RODegree::new(2, 1, vec![-1]).unwrap()).unwrap();
    assert!(j.top().is_trivial());
    assert_eq!(j.bottom().describe(), "Z/3");
    // the weyl action on the odd piece is −1
    let w = j.weyl().apply(&[Int::from(1)]);
    assert!(j.bottom().elems_equal(&w, &[Int::from(-1)]));
}

#[test]
fn em_grid_f4_frobenius_is_characteristic_two() {
    let f = classified(f4_frobenius().unwrap());
    for d in Window::symmetric(2, 3, 3).degrees(2) {
        let frob = |x: u64| {
            let (a, b) = (x & 1, x >> 1);
            (a ^ b) | (b << 1)
        };
        assert_eq!(orders(&em_homotopy(&f, &d).unwrap()), expected_orders("odd", &[2, 2], &frob, 2, &d), "{d}");
    }
}

#[test]
fn em_grid_fixed_point_over_c3() {
    for g in [constant_green(3, 2).unwrap(), f8_frobenius().unwrap()] {
        let ring = g.underlying().bottom().order_u64().unwrap();
        let fixed = g.underlying().top().order_u64().unwrap();
        let f = classified(g);
        for d in Window::symmetric(3, 4, 4).degrees(3) {
            let got = orders(&em_homotopy(&f, &d).unwrap());
            assert_eq!(got, expected_orders("odd", &[ring], &|x| x, fixed, &d), "{d}");
        }
    }
}

#[test]
fn window_parsing_and_enumeration() {
    let w = Window::parse(2, "a=-2..2,m=-1..1").unwrap();
    assert_eq!(w.degrees(2).len(), 15);
    assert_eq!(w.size(), 15);
    let w5 = Window::parse(5, "a=0..1,m2=-1..0").unwrap();
    let ds = w5.degrees(5);
    assert_eq!(ds.len(), 4);
    assert!(ds.iter().all(|d| d.m[0] == 0));
    assert!(Window::parse(2, "m3=0..1").is_err());
    assert!(Window::parse(2, "a").is_err());
    let k = RODegree::new(5, 3, vec![-1, 2]).unwrap();
    assert_eq!(k.key(), "3|-1,2");
    assert_eq!(RODegree::parse_key(5, "3|-1,2").unwrap(), k);
    assert!(RODegree::new(3, 0, vec![1, 1]).is_err());
}

#[test]
fn concentrated_f2_tower_has_no_ideal_in_window() {
    let f = classified(concentrated_green(2, 2).unwrap());
    let tower = em_tower(&f, &Window::symmetric(2, 2, 2)).unwrap();
    assert_eq!(tower.graded.support().len(), 5);
    let cert = graded_field_window_check(&tower, DEFAULT_COMBINATION_LIMIT).unwrap();
    assert!(cert.window_partial);
    assert!(cert.witness.is_none());
    assert_eq!(cert.candidates_checked, 30);
}

#[test]
fn degree_zero_burnside_has_a_proper_ideal() {
    let g = burnside_green(2).unwrap();
    let gg = degree_zero(&g, &Window::integer(2, -1, 1)).unwrap();
    let cert = graded_field_window_check(&gg, DEFAULT_COMBINATION_LIMIT).unwrap();
    assert!(cert.witness.is_some());
}

#[test]
fn degree_zero_constant_f2_over_c2_has_a_proper_ideal() {
    let g = constant_green(2, 2).unwrap();
    let gg = degree_zero(&g, &Window::integer(2, 0, 0)).unwrap();
    let cert = graded_field_window_check(&gg, DEFAULT_COMBINATION_LIMIT).unwrap();
    let w = cert.witness.unwrap();
    assert_eq!(w.pieces["0|0"], (1, 2));
}

#[test]
fn zero_graded_functor_is_rejected() {
    let gg = GradedGreen {
        graded: GradedMackey::new(2, GradingKind::RO, Window::symmetric(2, 1, 1)),
        unit_top: vec![],
        products: Default::default(),
    };
    assert!(matches!(graded_field_window_check(&gg, 10), Err(GradingError::ZeroFunctor)));
}

#[test]
fn graded_box_with_burnside_in_degree_zero() {
    let p = 2;
    let w = Window::integer(p, -3, 3);
    let mut m = GradedMackey::new(p, GradingKind::Integer, w.clone());
    m.insert(RODegree::integer(p, -1), constant(p, 4).unwrap()).unwrap();
    m.insert(RODegree::integer(p, 2), j_top(p, &FGAb::cyclic(3)).unwrap()).unwrap();
    let mut a = GradedMackey::new(p, GradingKind::Integer, w.clone());
    a.insert(RODegree::zero(p), burnside(p).unwrap()).unwrap();
    let b = graded_box(&m, &a, &w, DEFAULT_DEGREE_LIMIT).unwrap();
    assert_eq!(b.support(), m.support());
    for d in m.support() {
        assert_eq!(b.get(&d).unwrap().canonical(), m.get(&d).unwrap().canonical());
    }
    assert!(b.clipped.is_empty());
}

#[test]
fn graded_box_support_and_binomial_growth() {
    // F₂[b] with |b| = 1, concentrated at the top: box square has rank n + 1 in degree n
    let p = 2;
    let w = Window::integer(p, 0, 4);
    let mut t = GradedMackey::new(p, GradingKind::Integer, w.clone());
    for n in 0..=4 {
        t.insert(RODegree::integer(p, n), j_top(p, &FGAb::cyclic(2)).unwrap()).unwrap();
    }
    let sq = graded_box(&t, &t, &w, DEFAULT_DEGREE_LIMIT).unwrap();
    for n in 0..=4 {
        let piece = sq.get(&RODegree::integer(p, n)).unwrap();
        assert_eq!(piece.top().order_u64().unwrap(), 1 << (n + 1));
    }
    assert_eq!(sq.clipped.len(), 4);
    assert!(matches!(graded_box(&t, &t, &w, 3), Err(GradingError::WindowOverflow { .. })));
}

#[test]
fn graded_box_minkowski_support() {
    let p = 3;
    let big = Window::symmetric(p, 6, 6);
    let mut m = GradedMackey::new(p, GradingKind::RO, big.clone());
    let mut n = GradedMackey::new(p, GradingKind::RO, big.clone());
    let k = || j_top(p, &FGAb::cyclic(3)).unwrap();
    let md = [RODegree::new(p, 1, vec![0]).unwrap(), RODegree::new(p, -2, vec![1]).unwrap()];
    let nd = [RODegree::new(p, 0, vec![2]).unwrap(), RODegree::new(p, 3, vec![-1]).unwrap()];
    for d in &md {
        m.insert(d.clone(), k()).unwrap();
    }
    for d in &nd {
        n.insert(d.clone(), k()).unwrap();
    }
    let b = graded_box(&m, &n, &big, DEFAULT_DEGREE_LIMIT).unwrap();
    let mut expected: Vec<RODegree> = md.iter().flat_map(|x| nd.iter().map(move |y| x.add(y))).collect();
    expected.sort();
    expected.dedup();
    assert_eq!(b.support(), expected);
}

fn degree(p: u32) -> impl Strategy<Value = RODegree> {
    let k = irreducible_count(p);
    (-6i64..6, prop::collection::vec(-6i64..6, k)).prop_map(move |(a, m)| RODegree::new(p, a, m).unwrap())
}

fn prime_and_two_degrees() -> impl Strategy<Value = (RODegree, RODegree)> {
    prop::sample::select(vec![2u32, 3, 5, 7]).prop_flat_map(|p| (degree(p), degree(p)))
}

proptest! {
    #[test]
    fn dims_are_additive((x, y) in prime_and_two_degrees()) {
        prop_assert_eq!(x.add(&y).dim(), x.dim() + y.dim());
        prop_assert_eq!(x.add(&y).fixed_dim(), x.fixed_dim() + y.fixed_dim());
        prop_assert_eq!(x.neg().dim(), -x.dim());
        prop_assert_eq!(x.neg().fixed_dim(), -x.fixed_dim());
    }

    #[test]
    fn rotating_sign_is_symmetric_and_integral((x, y) in prime_and_two_degrees()) {
        let s = rotating_sign(&x, &y).unwrap();
        prop_assert_eq!(s, rotating_sign(&y, &x).unwrap());
        let p = x.prime();
        let (a, b) = s.burnside_element(p);
        prop_assert_eq!(a.clone() + b * Int::from(p), Int::from(s.sign_bot as i64));
    }

    #[test]
    fn concentrated_em_is_even(x in degree(3)) {
        let f = classified(concentrated_green(3, 2).unwrap());
        let a = em_homotopy(&f, &x).unwrap().canonical();
        let b = em_homotopy(&f, &x.neg()).unwrap().canonical();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn em_at_zero_is_the_field() {
    let fields = [
        concentrated_green(2, 2).unwrap(),
        concentrated_green(5, 3).unwrap(),
        constant_green(2, 3).unwrap(),
        constant_green(3, 2).unwrap(),
        f4_frobenius().unwrap(),
        f8_frobenius().unwrap(),
    ];
    for g in fields {
        let f = classified(g.clone());
        let m = em_homotopy(&f, &RODegree::zero(g.prime())).unwrap();
        assert!(MackeyMap::identity(g.underlying()).reinterpret(g.underlying(), &m).is_ok());
        assert_eq!(m.canonical(), g.underlying().canonical());
    }
}
