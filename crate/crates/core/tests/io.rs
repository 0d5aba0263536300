use cpmackey::green::*;
use cpmackey::io::*;
use cpmackey::mackey::*;

#[test]
fn presets_round_trip() {
    for (name, p, order) in [("burnside", 2, None), ("constant", 3, Some(4)), ("j_top", 5, Some(2)), ("f4_frobenius", 2, None)] {
        let j = MackeyJson { preset: Some(name.into()), prime: p, order, ..Default::default() };
        let m = j.to_functor("").unwrap();
        let text = serde_json::to_string(&MackeyJson::from_functor(&m).unwrap()).unwrap();
        let back: MackeyJson = serde_json::from_str(&text).unwrap();
        let m2 = back.to_functor("").unwrap();
        assert_eq!(m.canonical(), m2.canonical());
        assert_eq!(m.tr().matrix(), m2.tr().matrix());
        assert!(validate_mackey(&m2).all_passed());
    }
}

#[test]
fn green_round_trip() {
    for g in [f4_frobenius().unwrap(), burnside_green(3).unwrap(), concentrated_green(2, 2).unwrap()] {
        let text = serde_json::to_string(&GreenJson::from_green(&g).unwrap()).unwrap();
        let back: GreenJson = serde_json::from_str(&text).unwrap();
        let h = back.to_green("").unwrap();
        assert_eq!(h.mult().top_matrix(), g.mult().top_matrix());
        assert_eq!(h.mult().bot_matrix(), g.mult().bot_matrix());
        assert_eq!(h.unit_top(), g.unit_top());
    }
}

#[test]
fn explicit_constant_z2() {
    let text = r#"{"prime": 2, "top": {"generators": 1, "relations": [[2]]},
        "bottom": {"generators": 1, "relations": [[2]]}, "tr": [[2]], "res": [[1]], "weyl": [[1]]}"#;
    let m: MackeyJson = serde_json::from_str(text).unwrap();
    assert_eq!(m.to_functor("").unwrap().canonical(), constant(2, 2).unwrap().canonical());
}

#[test]
fn bad_shapes_report_locations() {
    let text = r#"{"prime": 2, "top": {"generators": 1}, "bottom": {"generators": 1},
        "tr": [[1, 0]], "res": [[1]], "weyl": [[1]]}"#;
    let m: MackeyJson = serde_json::from_str(text).unwrap();
    let e = m.to_functor("/functor").unwrap_err();
    assert_eq!(e.pointer, "/functor/tr/0");
    let missing = MackeyJson { prime: 2, ..Default::default() };
    assert_eq!(missing.to_functor("").unwrap_err().pointer, "/top");
    let unknown = MackeyJson { preset: Some("sphere".into()), prime: 2, ..Default::default() };
    assert_eq!(unknown.to_functor("").unwrap_err().pointer, "/preset");
    assert!(serde_json::from_str::<MackeyJson>(r#"{"prime": 2, "colour": 1}"#).is_err());
}
