use cpmackey::boxtensor::{box_laws, FlatBox, Label, DEFAULT_GENERATOR_LIMIT};
use cpmackey::grading::{em_homotopy, em_tower, graded_field_window_check, Window, DEFAULT_COMBINATION_LIMIT};
use cpmackey::green::{classify_field_shape, is_mackey_field, validate_green, FieldVerdict, GreenModule, Side};
use cpmackey::hochschild::{
    bokstedt_e2, hh, hh_of_bar, hh_via_tor, leibniz_check, tor_via_bar, twisted_cyclic_bar, Base, HomologyEntry,
};
use cpmackey::io::IoError;
use cpmackey::mackey::validate_mackey;
use cpmackey::simplicial::{
    counit_search, edgewise_subdivision, fold_diagrams, identity_suite, p_circle, pinch_candidate, standard_circle,
    tensor_green_with_circle, verify_last_face_identity,
};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::problem::*;

#[derive(Debug)]
pub enum CliError {
    /// Malformed input, with a JSON-pointer location.
    Schema { pointer: String, message: String },
    /// Well-formed input that the library rejects.
    Invalid(String),
    /// A computation that could not finish, such as a size limit.
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::Invalid(_) => 1,
            CliError::Compute(_) => 2,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            CliError::Schema { pointer, message } => json!({"error": "SchemaError", "pointer": pointer, "message": message}),
            CliError::Invalid(m) => json!({"error": "InvalidInput", "message": m}),
            CliError::Compute(m) => json!({"error": "ComputationError", "message": m}),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Schema { pointer: format!("/payload{}", e.pointer), message: e.message }
    }
}

fn compute(e: impl std::fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Invalid(e.to_string())
}

pub struct Report {
    pub json: Value,
    pub table: String,
    /// False when a validation subcommand found a failing check.
    pub success: bool,
}

pub struct Settings {
    pub limit: usize,
    pub window: Option<String>,
}

pub fn parse<T: DeserializeOwned>(v: &Value, prefix: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        let pointer = if path == "." {
            prefix.to_string()
        } else {
            format!("{prefix}/{}", path.replace(['.', '['], "/").replace(']', ""))
        };
        CliError::Schema { pointer, message: e.into_inner().to_string() }
    })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let padded: Vec<String> =
            cells.iter().zip(&widths).map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count()))).collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = vec![line(headers.iter().map(|h| h.to_string()).collect())];
    out.push(line(widths.iter().map(|w| "-".repeat(*w)).collect()));
    out.extend(rows.iter().map(|r| line(r.clone())));
    out.join("\n") + "\n"
}

fn yes(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

pub fn dispatch(command: &str, payload: &Value, s: &Settings) -> Result<Report, CliError> {
    match command {
        "validate" => validate(parse(payload, "/payload")?),
        "box" => box_cmd(parse(payload, "/payload")?, s),
        "green-check" => green_check(parse(payload, "/payload")?),
        "field-check" => field_check(parse(payload, "/payload")?),
        "classify" => classify(parse(payload, "/payload")?),
        "em-homotopy" => em(parse(payload, "/payload")?, s),
        "graded-field-window" => field_window(parse(payload, "/payload")?, s),
        "circle" => circle(parse(payload, "/payload")?),
        "hh" => hh_cmd(parse(payload, "/payload")?, s),
        "tor" => tor_cmd(parse(payload, "/payload")?, s),
        "e2" => e2_cmd(parse(payload, "/payload")?, s),
        "leibniz" => leibniz_cmd(parse(payload, "/payload")?),
        other => Err(CliError::Schema { pointer: "/command".into(), message: format!("unknown command {other:?}") }),
    }
}

fn validate(v: Validate) -> Result<Report, CliError> {
    let mut items = Vec::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for (i, m) in v.functors.iter().enumerate() {
        let f = m.to_functor(&format!("/functors/{i}"))?;
        let r = validate_mackey(&f);
        ok &= r.all_passed();
        rows.push(vec![format!("functors/{i}"), f.canonical().describe(), yes(r.all_passed()), "-".into()]);
        items.push(json!({"item": format!("functors/{i}"), "functor": f.canonical().describe(), "mackey": r}));
    }
    for (i, g) in v.greens.iter().enumerate() {
        let g = g.to_green(&format!("/greens/{i}"))?;
        let r = validate_mackey(g.underlying());
        let gr = validate_green(&g).map_err(compute)?;
        ok &= r.all_passed() && gr.valid();
        rows.push(vec![format!("greens/{i}"), g.underlying().canonical().describe(), yes(r.all_passed()), yes(gr.valid())]);
        items.push(json!({"item": format!("greens/{i}"), "functor": g.underlying().canonical().describe(), "mackey": r, "green": gr}));
    }
    Ok(Report {
        json: json!({"all_passed": ok, "items": items}),
        table: table(&["item", "functor", "mackey", "green"], &rows),
        success: ok,
    })
}

fn label(l: &Label) -> String {
    let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    match l {
        Label::Pure(v) => format!("pure({})", join(v)),
        Label::Transfer(v) => format!("tr({})", join(v)),
    }
}

fn box_cmd(v: BoxPayload, s: &Settings) -> Result<Report, CliError> {
    let mut out = serde_json::Map::new();
    let mut text = String::new();
    match (&v.left, &v.right) {
        (Some(l), Some(r)) => {
            let (l, r) = (l.to_functor("/left")?, r.to_functor("/right")?);
            let b = FlatBox::new(l.prime(), &[l, r], s.limit).map_err(compute)?;
            let f = b.functor();
            let top: Vec<String> = (0..f.top().ngens()).map(|i| label(&b.top_label(i))).collect();
            let bottom: Vec<String> = (0..f.bottom().ngens()).map(|i| format!("{:?}", b.bottom_label(i))).collect();
            text += &format!("box: {}\n", f.canonical().describe());
            let rows: Vec<Vec<String>> = top.iter().enumerate().map(|(i, l)| vec!["top".into(), i.to_string(), l.clone()]).chain(
                bottom.iter().enumerate().map(|(i, l)| vec!["bottom".into(), i.to_string(), l.clone()]),
            ).collect();
            text += &table(&["level", "generator", "provenance"], &rows);
            out.insert("box".into(), json!({
                "functor": f.canonical().describe(),
                "canonical": f.canonical(),
                "top_generators": top,
                "bottom_generators": bottom,
            }));
        }
        (None, None) => {}
        _ => return Err(CliError::Schema { pointer: "/payload".into(), message: "give both left and right".into() }),
    }
    let mut success = true;
    if !v.laws.is_empty() {
        let corpus = v.laws.iter().enumerate().map(|(i, m)| m.to_functor(&format!("/laws/{i}"))).collect::<Result<Vec<_>, _>>()?;
        let r = box_laws(&corpus).map_err(compute)?;
        success = r.passed();
        text += &table(
            &["law", "checked"],
            &[
                vec!["unitor".into(), r.unitors_checked.to_string()],
                vec!["swap".into(), r.swaps_checked.to_string()],
                vec!["rebracket".into(), r.rebrackets_checked.to_string()],
                vec!["frobenius".into(), r.frobenius_checked.to_string()],
            ],
        );
        text += &format!("failures: {}\n", r.failures.len());
        out.insert("laws".into(), json!({"passed": r.passed(), "report": r}));
    }
    Ok(Report { json: Value::Object(out), table: text, success })
}

fn green_check(v: Greens) -> Result<Report, CliError> {
    let mut items = Vec::new();
    let mut rows = Vec::new();
    let mut ok = true;
    for (i, g) in v.greens.iter().enumerate() {
        let g = g.to_green(&format!("/greens/{i}"))?;
        let r = validate_green(&g).map_err(compute)?;
        ok &= r.valid();
        rows.push(vec![i.to_string(), g.underlying().canonical().describe(), yes(r.valid()), yes(r.commutative)]);
        items.push(json!({"index": i, "functor": g.underlying().canonical().describe(), "valid": r.valid(), "report": r}));
    }
    Ok(Report { json: json!({"items": items}), table: table(&["#", "functor", "valid", "commutative"], &rows), success: ok })
}

fn field_check(v: Greens) -> Result<Report, CliError> {
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for (i, g) in v.greens.iter().enumerate() {
        let g = g.to_green(&format!("/greens/{i}"))?;
        match is_mackey_field(&g).map_err(invalid)? {
            FieldVerdict::Field => {
                let c = classify_field_shape(&g).map_err(compute)?;
                let tr_nonzero = !g.underlying().tr().is_zero_map();
                rows.push(vec![i.to_string(), g.underlying().canonical().describe(), "Field".into(), format!("{:?}", c.shape)]);
                items.push(json!({"index": i, "verdict": "Field", "shape": c.shape, "tr_nonzero": tr_nonzero}));
            }
            FieldVerdict::NotField(sub) => {
                let w = json!({
                    "top": sub.functor.top().describe(),
                    "bottom": sub.functor.bottom().describe(),
                    "top_order": sub.top_order(),
                    "bottom_order": sub.bottom_order(),
                });
                rows.push(vec![
                    i.to_string(),
                    g.underlying().canonical().describe(),
                    "NotField".into(),
                    format!("ideal top {} bottom {}", sub.functor.top().describe(), sub.functor.bottom().describe()),
                ]);
                items.push(json!({"index": i, "verdict": "NotField", "witness": w}));
            }
        }
    }
    Ok(Report { json: json!({"items": items}), table: table(&["#", "functor", "verdict", "detail"], &rows), success: true })
}

fn classify(v: Greens) -> Result<Report, CliError> {
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for (i, g) in v.greens.iter().enumerate() {
        let g = g.to_green(&format!("/greens/{i}"))?;
        let c = classify_field_shape(&g).map_err(invalid)?;
        rows.push(vec![i.to_string(), format!("{:?}", c.shape)]);
        items.push(json!({"index": i, "shape": c.shape}));
    }
    Ok(Report { json: json!({"items": items}), table: table(&["#", "shape"], &rows), success: true })
}

fn window_for(p: u32, s: &Settings, default: Window) -> Result<Window, CliError> {
    match &s.window {
        Some(w) => Window::parse(p, w).map_err(|e| CliError::Schema { pointer: "/limits/window".into(), message: e.to_string() }),
        None => Ok(default),
    }
}

fn em(v: EmHomotopy, s: &Settings) -> Result<Report, CliError> {
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for (i, g) in v.fields.iter().enumerate() {
        let g = g.to_green(&format!("/fields/{i}"))?;
        let p = g.prime();
        let f = classify_field_shape(&g).map_err(invalid)?;
        let degrees = if v.degrees.is_empty() {
            window_for(p, s, Window::symmetric(p, 4, 4))?.degrees(p)
        } else {
            v.degrees
                .iter()
                .enumerate()
                .map(|(j, d)| {
                    d.clone().with_prime(p).map_err(|e| CliError::Schema { pointer: format!("/payload/degrees/{j}"), message: e.to_string() })
                })
                .collect::<Result<_, _>>()?
        };
        let mut entries = Vec::new();
        for d in degrees {
            let h = em_homotopy(&f, &d).map_err(compute)?;
            rows.push(vec![i.to_string(), d.key(), h.top().describe(), h.bottom().describe()]);
            entries.push(json!({"degree": d.key(), "top": h.top().describe(), "bottom": h.bottom().describe(), "canonical": h.canonical()}));
        }
        items.push(json!({"index": i, "shape": f.shape, "entries": entries}));
    }
    Ok(Report { json: json!({"fields": items}), table: table(&["field", "degree", "top", "bottom"], &rows), success: true })
}

fn field_window(v: FieldWindow, s: &Settings) -> Result<Report, CliError> {
    let g = v.field.to_green("/field")?;
    let p = g.prime();
    let f = classify_field_shape(&g).map_err(invalid)?;
    let window = window_for(p, s, Window::symmetric(p, 2, 2))?;
    let tower = em_tower(&f, &window).map_err(compute)?;
    let cert = graded_field_window_check(&tower, v.combination_limit.unwrap_or(DEFAULT_COMBINATION_LIMIT)).map_err(compute)?;
    let rows = vec![
        vec!["support".into(), cert.support.len().to_string()],
        vec!["candidates".into(), cert.candidates_checked.to_string()],
        vec!["ideal found".into(), yes(cert.witness.is_some())],
        vec!["partial".into(), yes(cert.window_partial)],
    ];
    Ok(Report {
        json: json!({"window": window, "certificate": cert}),
        table: table(&["item", "value"], &rows),
        success: true,
    })
}

fn circle(v: Circle) -> Result<Report, CliError> {
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for c in &v.checks {
        let (name, value, passed) = match *c {
            CircleCheck::Census { r, top } => {
                let x = edgewise_subdivision(&standard_circle((top + 1) * r - 1), r).map_err(invalid)?;
                let sizes: Vec<usize> = (0..=x.top()).map(|n| x.size(n)).collect();
                let census = x.census();
                (format!("census r={r}"), json!({"sizes": sizes, "nondegenerate": census}), true)
            }
            CircleCheck::Subdivision { r, top } => {
                let x = edgewise_subdivision(&standard_circle((top + 1) * r - 1), r).map_err(invalid)?;
                let ids = identity_suite(&x);
                let last = verify_last_face_identity(&x);
                let ok = ids.passed() && last.passed();
                (format!("subdivision r={r}"), json!({"identities": ids, "last_face": last}), ok)
            }
            CircleCheck::PCircle { p, top } => {
                let x = p_circle(p, top);
                let orbits: Vec<usize> = (0..=top).map(|n| x.orbit_representatives(n).len()).collect();
                let ok = orbits.iter().enumerate().all(|(n, &o)| o == n + 1) && identity_suite(&x).passed();
                (format!("p-circle p={p}"), json!({"orbits": orbits, "sizes": (0..=top).map(|n| x.size(n)).collect::<Vec<_>>()}), ok)
            }
            CircleCheck::Fold { p, top } => {
                let r = fold_diagrams(p, top).map_err(invalid)?;
                let ok = r.passed();
                (format!("fold p={p}"), to_value(&r), ok)
            }
            CircleCheck::Pinch { p, top } => {
                let r = pinch_candidate(p, top).map_err(invalid)?;
                let ok = !r.equivariant && !r.equivariant_iso_exists;
                (format!("pinch p={p}"), to_value(&r), ok)
            }
            CircleCheck::Counit { p, top } => {
                let r = counit_search(p, top);
                let ok = r.equivariant_maps == 0;
                (format!("counit p={p}"), to_value(&r), ok)
            }
        };
        rows.push(vec![name.clone(), yes(passed)]);
        items.push(json!({"check": name, "expected_outcome": passed, "report": value}));
    }
    Ok(Report { json: json!({"checks": items}), table: table(&["check", "expected outcome"], &rows), success: true })
}

fn homology_rows(h: &[HomologyEntry]) -> Vec<Vec<String>> {
    h.iter().map(|e| vec![e.s.to_string(), e.top.clone(), e.bottom.clone(), yes(e.certified)]).collect()
}

fn hh_cmd(v: Hh, s: &Settings) -> Result<Report, CliError> {
    let g = v.algebra.to_green("/algebra")?;
    let base = match v.base {
        BaseChoice::Burnside => Base::Burnside,
        BaseChoice::Itself => Base::over_itself(&g),
    };
    let bar = twisted_cyclic_bar(&base, &g, v.twist, v.truncation, s.limit).map_err(hochschild_error)?;
    let h = hh_of_bar(&bar).map_err(hochschild_error)?;
    let mut out = json!({"twist": bar.twist, "truncation": v.truncation, "homology": h});
    let mut text = table(&["s", "top", "bottom", "certified"], &homology_rows(&h));
    if v.compare_circle {
        if v.base != BaseChoice::Burnside || bar.twist != 1 {
            return Err(CliError::Schema {
                pointer: "/payload/compare_circle".into(),
                message: "the circle route is over the Burnside functor with twist 1".into(),
            });
        }
        let circle = tensor_green_with_circle(&g, v.truncation, s.limit).map_err(compute)?;
        let same = bar.complex.identical(&circle);
        out["circle_route_identical"] = json!(same);
        text += &format!("identical to the circle route through level {}: {}\n", v.truncation, yes(same));
    }
    Ok(Report { json: out, table: text, success: true })
}

fn hochschild_error(e: cpmackey::hochschild::HochschildError) -> CliError {
    use cpmackey::hochschild::HochschildError as H;
    match e {
        H::NotAnAlgebra(_) | H::BidegreeMismatch(_) | H::Unsupported(_) => invalid(e),
        _ => compute(e),
    }
}

fn tor_cmd(v: Tor, s: &Settings) -> Result<Report, CliError> {
    let g = v.algebra.to_green("/algebra")?;
    let tor = match v.modules {
        TorModules::Bimodule => hh_via_tor(&g, v.twist, v.s_max, s.limit),
        TorModules::Regular => {
            let r = GreenModule::regular(&g, Side::Right);
            let l = GreenModule::regular(&g, Side::Left);
            tor_via_bar(&g, &r, &l, v.s_max, s.limit)
        }
    }
    .map_err(hochschild_error)?;
    let mut out = json!({"tor": tor});
    let mut text = table(&["s", "top", "bottom", "certified"], &homology_rows(&tor));
    if v.compare_hh {
        if v.modules != TorModules::Bimodule {
            return Err(CliError::Schema { pointer: "/payload/compare_hh".into(), message: "comparison needs bimodule".into() });
        }
        let direct = hh(&Base::Burnside, &g, v.twist, v.s_max + 2, s.limit).map_err(hochschild_error)?;
        let agree = (0..=v.s_max).all(|i| direct[i].canonical == tor[i].canonical);
        out["hh"] = to_value(&direct);
        out["agree"] = json!(agree);
        text += &format!("agrees with hh through s = {}: {}\n", v.s_max, yes(agree));
    }
    Ok(Report { json: out, table: text, success: true })
}

fn e2_cmd(v: E2, s: &Settings) -> Result<Report, CliError> {
    let g = v.field.to_green("/field")?;
    let p = g.prime();
    let f = classify_field_shape(&g).map_err(invalid)?;
    let gens = v
        .generators
        .iter()
        .enumerate()
        .map(|(j, d)| d.clone().with_prime(p).map_err(|e| CliError::Schema { pointer: format!("/payload/generators/{j}"), message: e.to_string() }))
        .collect::<Result<Vec<_>, _>>()?;
    let r = bokstedt_e2(&f, &gens, v.s_max, v.weight_max, s.limit).map_err(hochschild_error)?;
    let rows: Vec<Vec<String>> = r
        .computed
        .entries
        .iter()
        .zip(&r.oracle.entries)
        .map(|(c, o)| vec![c.s.to_string(), c.degree.clone(), c.rank.to_string(), o.rank.to_string()])
        .collect();
    let mut text = table(&["s", "degree", "rank", "koszul"], &rows);
    text += &format!("agree: {}\ncollapse certified: {}\n", yes(r.agree), yes(r.collapse.collapse_certified));
    Ok(Report { json: to_value(&r), table: text, success: true })
}

fn leibniz_cmd(v: Leibniz) -> Result<Report, CliError> {
    let r = leibniz_check(&v.algebra, &v.differential).map_err(hochschild_error)?;
    let mut rows: Vec<Vec<String>> = r
        .generators
        .iter()
        .map(|g| vec![g.generator.clone(), format!("({}, {})", g.target.0, g.target.1), g.target_rank.to_string(), yes(g.forced_zero)])
        .collect();
    rows.extend(r.propagations.iter().map(|p| {
        vec![p.product.clone(), format!("({}, {})", p.target.0, p.target.1), p.target_rank.to_string(), format!("coefficient {}", p.leibniz_coefficient)]
    }));
    let mut text = table(&["element", "target", "rank", "forced zero"], &rows);
    for i in &r.inconsistencies {
        text += &format!("inconsistent: {i}\n");
    }
    text += &format!("collapse certified: {}\n", yes(r.collapse_certified));
    Ok(Report { json: to_value(&r), table: text, success: true })
}

pub fn default_limit() -> usize {
    DEFAULT_GENERATOR_LIMIT
}
