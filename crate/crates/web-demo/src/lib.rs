//! Browser bindings: each operation takes and returns JSON text. The plain functions are what the
//! native tests call; the `#[wasm_bindgen]` wrappers only convert errors.

use cpmackey::boxtensor::DEFAULT_GENERATOR_LIMIT;
use cpmackey::green::{classify_field_shape, is_mackey_field, FieldVerdict};
use cpmackey::hochschild::{hh, Base};
use cpmackey::io::GreenJson;
use cpmackey::simplicial::{edgewise_subdivision, standard_circle};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest truncation and subdivision the page will attempt.
pub const MAX_TRUNCATION: usize = 4;
pub const MAX_SUBDIVISION: usize = 4;

fn green(text: &str) -> Result<cpmackey::green::GreenFunctor, String> {
    let g: GreenJson = serde_json::from_str(text).map_err(|e| format!("input: {e}"))?;
    g.to_green("").map_err(|e| e.to_string())
}

fn render(v: Value) -> String {
    serde_json::to_string_pretty(&v).expect("serializable")
}

/// Field verdict with the shape of a field or the orders of a witness ideal.
pub fn field_check_json(text: &str) -> Result<String, String> {
    let g = green(text)?;
    let functor = g.underlying().canonical().describe();
    Ok(render(match is_mackey_field(&g).map_err(|e| e.to_string())? {
        FieldVerdict::Field => {
            let c = classify_field_shape(&g).map_err(|e| e.to_string())?;
            json!({"functor": functor, "verdict": "Field", "shape": c.shape})
        }
        FieldVerdict::NotField(sub) => json!({
            "functor": functor,
            "verdict": "NotField",
            "witness": {"top": sub.functor.top().describe(), "bottom": sub.functor.bottom().describe()},
        }),
    }))
}

/// Twisted Hochschild homology over the Burnside functor, degrees 0..truncation−1.
pub fn hochschild_json(text: &str, twist: u32, truncation: usize) -> Result<String, String> {
    if !(1..=MAX_TRUNCATION).contains(&truncation) {
        return Err(format!("truncation must lie in 1..={MAX_TRUNCATION}"));
    }
    let g = green(text)?;
    let h = hh(&Base::Burnside, &g, twist, truncation, DEFAULT_GENERATOR_LIMIT).map_err(|e| e.to_string())?;
    Ok(render(json!({
        "twist": twist % g.prime(),
        "degrees": h.iter().map(|e| json!({"s": e.s, "top": e.top, "bottom": e.bottom, "certified": e.certified})).collect::<Vec<_>>(),
    })))
}

/// Nondegenerate cells of the r-fold subdivided circle, level by level.
pub fn circle_census_json(r: usize, top: usize) -> Result<String, String> {
    if !(1..=MAX_SUBDIVISION).contains(&r) || top > MAX_SUBDIVISION {
        return Err(format!("r must lie in 1..={MAX_SUBDIVISION} and top in 0..={MAX_SUBDIVISION}"));
    }
    let sd = edgewise_subdivision(&standard_circle((top + 1) * r), r).map_err(|e| e.to_string())?.truncated(top);
    let levels: Vec<Value> =
        sd.census().into_iter().enumerate().map(|(n, cells)| json!({"level": n, "size": sd.size(n), "nondegenerate": cells})).collect();
    Ok(render(json!({"r": r, "order": sd.order(), "levels": levels})))
}

#[wasm_bindgen]
pub fn field_check(text: &str) -> Result<String, JsError> {
    field_check_json(text).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn hochschild(text: &str, twist: u32, truncation: usize) -> Result<String, JsError> {
    hochschild_json(text, twist, truncation).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn circle_census(r: usize, top: usize) -> Result<String, JsError> {
    circle_census_json(r, top).map_err(|e| JsError::new(&e))
}
