use cpmackey::boxtensor::*;
use cpmackey::exactlin::{FGAb, Matrix};
use cpmackey::mackey::*;

fn f4_frobenius() -> MackeyFunctor {
    let v = FGAb::product_of_cyclics(&[2, 2]);
    j_bottom(2, &v, &Matrix::from_i64(2, 2, &[1, 1, 0, 1])).unwrap()
}

fn corpus() -> Vec<MackeyFunctor> {
    let swap = Matrix::from_i64(2, 2, &[0, 1, 1, 0]);
    vec![
        burnside(2).unwrap(),
        constant(2, 6).unwrap(),
        constant(2, 0).unwrap(),
        j_top(2, &FGAb::cyclic(2)).unwrap(),
        j_bottom(2, &FGAb::product_of_cyclics(&[2, 2]), &swap).unwrap(),
        f4_frobenius(),
        j_bottom(2, &FGAb::cyclic(0), &Matrix::from_i64(1, 1, &[-1])).unwrap(),
    ]
}

#[test]
fn unitor_is_iso_on_corpus() {
    for m in corpus() {
        let u = unitor(&m).unwrap();
        assert!(u.is_iso(), "unitor not iso for {m:?}");
        assert!(right_unitor(&m).unwrap().is_iso());
    }
    assert!(unitor(&constant(2, 4).unwrap()).unwrap().is_iso());
    assert!(unitor(&burnside(3).unwrap()).unwrap().is_iso());
}

#[test]
fn swap_is_iso_on_corpus_pairs() {
    let c = corpus();
    for m in &c {
        for n in &c {
            let s = swap_map(m, n).unwrap();
            assert!(s.is_iso(), "swap not iso for {m:?} {n:?}");
        }
    }
}

#[test]
fn swap_twice_is_identity() {
    let c = corpus();
    let (m, n) = (&c[1], &c[5]);
    let s = swap_map(m, n).unwrap();
    let t = swap_map(n, m).unwrap();
    assert!(t.after(&s).equals(&MackeyMap::identity(s.source())));
}

#[test]
fn rebracketing_is_iso() {
    let c = corpus();
    let triples = [(0, 1, 3), (1, 5, 4), (5, 5, 6), (2, 4, 0), (3, 3, 3), (6, 1, 5)];
    for (i, j, k) in triples {
        let f = rebracket(&c[i], &c[j], &c[k]).unwrap();
        assert!(f.is_iso(), "rebracket not iso for {i} {j} {k}");
        let l = f.source().canonical();
        let r = f.target().canonical();
        assert_eq!(l, r);
    }
}

#[test]
fn frobenius_relations_vanish() {
    let c = corpus();
    for m in &c {
        for n in &c {
            let b = box_product(m, n).unwrap();
            for a in 0..m.top().ngens() {
                for y in 0..n.bottom().ngens() {
                    let d = frobenius_defect(&b, a, y);
                    assert!(b.functor().top().is_zero_elem(&d));
                }
            }
        }
    }
}

#[test]
fn res_of_transfer_class_is_norm() {
    for m in corpus() {
        let b = box_product(&m, &m).unwrap();
        let f = b.functor();
        let lhs = f.res().after(f.tr());
        let norm = cpmackey::exactlin::AbHom::new_unchecked(f.bottom().clone(), f.bottom().clone(), f.norm_matrix());
        assert!(lhs.equals(&norm));
        assert!(validate_mackey(f).all_passed());
    }
}

#[test]
fn constant_f2_squared_is_constant_f2() {
    let f2 = constant(2, 2).unwrap();
    let b = box_product(&f2, &f2).unwrap();
    assert_eq!(b.functor().canonical(), f2.canonical());
    let mult = Pairing::new(&f2, &f2, &f2, Matrix::from_i64(1, 1, &[1]), Matrix::from_i64(1, 1, &[1])).unwrap();
    assert!(map_from_pairing(&mult).unwrap().is_iso());
}

#[test]
fn concentrated_boxes() {
    let k = j_top(3, &FGAb::cyclic(4)).unwrap();
    let l = j_top(3, &FGAb::cyclic(6)).unwrap();
    let b = box_product(&k, &l).unwrap();
    assert!(b.functor().bottom().is_trivial());
    assert_eq!(b.functor().top().describe(), "Z/2");
    let p = box_power(&j_top(2, &FGAb::cyclic(2)).unwrap(), 4, DEFAULT_GENERATOR_LIMIT).unwrap();
    assert!(p.functor().bottom().is_trivial());
    assert_eq!(p.functor().top().describe(), "Z/2");
}

#[test]
fn rotation_order_divides_p_times_arity() {
    let m = f4_frobenius();
    for k in 1..=3 {
        let pw = box_power(&m, k, DEFAULT_GENERATOR_LIMIT).unwrap();
        let r = rotation(&pw, 1).unwrap();
        let mut acc = MackeyMap::identity(pw.functor());
        for _ in 0..(2 * k) {
            acc = r.after(&acc);
        }
        assert!(acc.equals(&MackeyMap::identity(pw.functor())));
    }
}

#[test]
fn unequivariant_pairing_rejected() {
    let m = j_bottom(2, &FGAb::product_of_cyclics(&[2, 2]), &Matrix::from_i64(2, 2, &[0, 1, 1, 0])).unwrap();
    let z2 = constant(2, 2).unwrap();
    // projects the bottom onto the first coordinate: not equivariant for the swap
    let bot = Matrix::from_i64(1, 4, &[1, 0, 0, 0]);
    let top = Matrix::zeros(1, m.top().ngens() * m.top().ngens());
    let p = Pairing::new(&m, &m, &z2, top, bot).unwrap();
    assert!(matches!(map_from_pairing(&p), Err(BoxError::IncompatiblePairing { .. })));
}

#[test]
fn prime_mismatch_is_reported() {
    let a = burnside(2).unwrap();
    let b = burnside(3).unwrap();
    assert!(matches!(box_product(&a, &b), Err(BoxError::PrimeMismatch(2, 3))));
}

#[test]
fn size_limit_is_an_error() {
    let a = burnside(2).unwrap();
    assert!(matches!(box_power(&a, 10, 100), Err(BoxError::SizeLimit { .. })));
}

#[test]
fn law_report_on_corpus() {
    let c = corpus();
    let r = box_laws(&c).unwrap();
    assert!(r.passed(), "{:?}", r.failures);
    assert_eq!(r.unitors_checked, c.len());
    assert_eq!(r.swaps_checked, c.len() * c.len());
    assert_eq!(r.rebrackets_checked, 2 * c.len());
    let mixed = box_laws(&[burnside(2).unwrap(), burnside(3).unwrap()]).unwrap();
    assert_eq!(mixed.swaps_checked, 2);
}
