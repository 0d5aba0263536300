use cpmackey::green::{burnside_green, constant_green, f4_frobenius};
use cpmackey::mackey::homology_of_complex;
use cpmackey::simplicial::*;
use proptest::prelude::*;

fn labels(x: &SimplicialGSet, n: usize, xs: &[usize]) -> Vec<String> {
    xs.iter().map(|&e| x.label(n, e).to_string()).collect()
}

#[test]
fn doubled_circle_census() {
    let sd = edgewise_subdivision(&standard_circle(5), 2).unwrap();
    assert_eq!(sd.top(), 2);
    for n in 0..=2 {
        assert_eq!(sd.size(n), 2 * n + 2);
    }
    let census = sd.census();
    assert_eq!(census[0], vec!["1", "γ"]);
    assert_eq!(census[1], vec!["γ", "γ^3"]);
    assert!(census[2].is_empty());
    let g = sd.index_of(1, "γ").unwrap();
    let g3 = sd.index_of(1, "γ^3").unwrap();
    assert_eq!(labels(&sd, 0, &[sd.face(1, 0, g), sd.face(1, 1, g)]), vec!["1", "γ"]);
    assert_eq!(labels(&sd, 0, &[sd.face(1, 0, g3), sd.face(1, 1, g3)]), vec!["γ", "1"]);
    // the induced C_2 action swaps the two vertices
    assert_eq!(sd.order(), 2);
    assert_eq!(sd.act(0, 0), 1);
}

#[test]
fn subdivisions_satisfy_the_identities() {
    assert!(identity_suite(&standard_circle(6)).passed());
    assert!(verify_last_face_identity(&standard_circle(6)).passed());
    for r in [2, 3] {
        let sd = edgewise_subdivision(&standard_circle(6 * r - 1), r).unwrap();
        assert_eq!(sd.top(), 5);
        let rep = identity_suite(&sd);
        assert!(rep.passed(), "r={r}: {:?}", rep.failures);
        let last = verify_last_face_identity(&sd);
        assert!(last.passed(), "r={r}: {:?}", last.failures);
        assert_eq!(sd.order(), r as u32);
    }
}

#[test]
fn corrupted_face_is_caught() {
    let mut sd = edgewise_subdivision(&standard_circle(8), 3).unwrap();
    let n = 2;
    let e = 4;
    let bad = (sd.face(n, n, e) + 1) % sd.size(n - 1);
    sd.override_face(n, n, e, bad);
    let rep = verify_last_face_identity(&sd);
    assert!(!rep.passed());
    assert_eq!(rep.failures[0].level, 2);
    assert_eq!(rep.failures[0].element, sd.label(2, 4));
    assert!(!identity_suite(&sd).passed());
}

#[test]
fn subdivision_needs_enough_levels() {
    assert!(matches!(
        edgewise_subdivision(&standard_circle(1), 3),
        Err(SimplicialError::InsufficientTruncation { .. })
    ));
}

#[test]
fn p_circle_is_free_with_expected_orbits() {
    for p in [2u32, 3, 5] {
        let x = p_circle(p, 3);
        assert!(identity_suite(&x).passed());
        for k in 0..=3 {
            assert_eq!(x.size(k), p as usize * (k + 1));
            assert_eq!(x.orbit_representatives(k), (0..=k).collect::<Vec<_>>());
            // x^i ↦ x^{i+k+1}
            for i in 0..x.size(k) {
                assert_eq!(x.act(k, i), (i + k + 1) % x.size(k));
            }
        }
        let nd: Vec<usize> = x.nondegenerate().iter().map(Vec::len).collect();
        assert_eq!(nd, vec![p as usize, p as usize, 0, 0]);
    }
}

#[test]
fn fold_diagrams_commute() {
    for p in [2, 3] {
        let r = fold_diagrams(p, 3).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.wedge_nondegenerate[..2], [p as usize, 2 * p as usize]);
        assert!(r.wedge_nondegenerate[2..].iter().all(|&c| c == 0));
    }
}

#[test]
fn wedge_rejects_bad_inclusions() {
    let x = p_circle(2, 2);
    let o = orbit(2, 2);
    let f = orbit_inclusion(&x, 0).unwrap();
    let constant = SimplicialMap { maps: (0..=2).map(|n| vec![f.maps[n][0]; 2]).collect() };
    assert!(matches!(wedge_over_orbit(&x, &constant, &x, &f), Err(SimplicialError::NotEquivariant { .. })));
    let (point, collapse) = quotient(&o, &vec![vec![0, 0]; 3]).unwrap();
    assert_eq!(point.size(0), 1);
    assert!(matches!(wedge_over_orbit(&point, &collapse, &x, &f), Err(SimplicialError::NotInjective { .. })));
}

#[test]
fn no_equivariant_counit() {
    for p in [2, 3, 5] {
        let r = counit_search(p, 2);
        assert_eq!(r.simplicial_maps, p as usize, "connected: only constant maps");
        assert_eq!(r.equivariant_maps, 0);
    }
}

#[test]
fn pinch_for_p2_swaps_edges() {
    let v = pinch_candidate(2, 2).unwrap();
    assert!(v.pinch_is_isomorphism);
    assert!(!v.equivariant);
    assert!(v.witness.is_some());
    assert_eq!(v.image_vertex_shift, Some(0));
    assert_eq!(v.wedge_vertex_shift, Some(1));
    for m in &v.image_action {
        if m.level == 0 {
            assert_eq!(m.from, m.to);
        } else {
            // edges of one copy go to the matching edges of the other copy
            assert_ne!(m.from.starts_with("ℓ:"), m.to.starts_with("ℓ:"), "{m:?}");
        }
    }
    assert_eq!(v.image_action.iter().filter(|m| m.level == 1).count(), 4);
    assert!(!v.equivariant_iso_exists);
}

#[test]
fn pinch_for_p3_rotates_twice() {
    let v = pinch_candidate(3, 2).unwrap();
    assert!(v.pinch_is_isomorphism);
    assert!(!v.equivariant);
    assert_eq!(v.image_vertex_shift, Some(2));
    assert_eq!(v.wedge_vertex_shift, Some(1));
    assert!(!v.equivariant_iso_exists);
}

#[test]
fn tensor_with_circle_is_simplicial() {
    for g in [constant_green(2, 3).unwrap(), f4_frobenius().unwrap(), burnside_green(2).unwrap()] {
        let t = tensor_green_with_circle(&g, 2, 1 << 12).unwrap();
        for k in 0..=2 {
            assert_eq!(t.levels[k].arity(), k + 1);
        }
        assert!(t.failed_identities().is_empty(), "{:?}", t.failed_identities());
        let c = t.moore_complex().unwrap();
        let h = homology_of_complex(&c).unwrap();
        assert_eq!(h.len(), 3);
    }
}

#[test]
fn constant_field_tensor_degree_zero_is_the_ring() {
    // H_0 of the circle tensor is the twisted coinvariants of R, which for trivial action is R itself
    let g = constant_green(2, 3).unwrap();
    let t = tensor_green_with_circle(&g, 2, 1 << 12).unwrap();
    let h = homology_of_complex(&t.moore_complex().unwrap()).unwrap();
    assert_eq!(h[0].1.canonical(), g.underlying().canonical());
}

#[test]
fn non_free_actions_are_rejected() {
    let g = constant_green(2, 3).unwrap();
    let o = orbit(2, 1);
    let (point, _) = quotient(&o, &vec![vec![0, 0]; 2]).unwrap();
    assert!(matches!(tensor_green_with_set(&g, &point, 64), Err(SimplicialError::NotFreeAction { level: 0 })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn subdivision_identities(r in 1usize..5, levels in 1usize..5) {
        let sd = edgewise_subdivision(&standard_circle((levels + 1) * r - 1), r).unwrap();
        prop_assert_eq!(sd.top(), levels);
        prop_assert!(identity_suite(&sd).passed());
        prop_assert!(verify_last_face_identity(&sd).passed());
        for n in 0..=levels {
            prop_assert_eq!(sd.size(n), (n + 1) * r);
            // r(n+1) - (number of degenerate) nondegenerate cells only in dims 0 and 1
            let nd = sd.nondegenerate()[n].len();
            prop_assert_eq!(nd, if n <= 1 { r } else { 0 });
        }
    }

    #[test]
    fn nested_subdivision_multiplies(r in 1usize..4, s in 1usize..4) {
        let levels = 2;
        let big = standard_circle((levels + 1) * r * s - 1);
        let twice = edgewise_subdivision(&edgewise_subdivision(&big, s).unwrap(), r).unwrap();
        let once = edgewise_subdivision(&big, r * s).unwrap();
        prop_assert_eq!(twice.top(), once.top());
        for n in 1..=levels {
            for i in 0..=n {
                for e in 0..once.size(n) {
                    prop_assert_eq!(twice.face(n, i, e), once.face(n, i, e));
                }
            }
        }
    }
}
