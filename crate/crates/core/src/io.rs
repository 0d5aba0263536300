//! JSON forms of groups, Mackey functors and Green functors.
//!
//! Matrices are arrays of rows with target generators as rows. A functor is either a preset
//! (`{"preset": "burnside", "prime": 2}`) or an explicit presentation.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::exactlin::{FGAb, Int, Matrix};
use crate::green::{
    burnside_green, concentrated_green, constant_green, f4_frobenius, f8_frobenius, GreenFunctor,
};
use crate::mackey::{burnside, constant, j_top, zero_functor, MackeyFunctor};

/// A conversion failure at a JSON-pointer location.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{pointer}: {message}")]
pub struct IoError {
    pub pointer: String,
    pub message: String,
}

fn err(pointer: &str, message: impl Into<String>) -> IoError {
    IoError { pointer: pointer.to_string(), message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupJson {
    pub generators: usize,
    #[serde(default)]
    pub relations: Vec<Vec<i64>>,
}

impl GroupJson {
    pub fn to_group(&self, at: &str) -> Result<FGAb, IoError> {
        let rel = matrix(&self.relations, None, self.generators, &format!("{at}/relations"))?;
        Ok(FGAb::new(self.generators, rel))
    }

    pub fn from_group(g: &FGAb, at: &str) -> Result<Self, IoError> {
        Ok(GroupJson { generators: g.ngens(), relations: rows_i64(g.relations(), at)? })
    }
}

fn matrix(rows: &[Vec<i64>], nrows: Option<usize>, ncols: usize, at: &str) -> Result<Matrix, IoError> {
    if let Some(n) = nrows {
        if rows.len() != n {
            return Err(err(at, format!("expected {n} rows, found {}", rows.len())));
        }
    }
    let mut out = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        if r.len() != ncols {
            return Err(err(&format!("{at}/{i}"), format!("expected {ncols} entries, found {}", r.len())));
        }
        out.push(r.iter().map(|&x| Int::from(x)).collect());
    }
    Ok(Matrix::from_rows(out, ncols))
}

fn rows_i64(m: &Matrix, at: &str) -> Result<Vec<Vec<i64>>, IoError> {
    m.to_rows()
        .into_iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_i64().ok_or_else(|| err(at, format!("entry {x} does not fit in 64 bits"))))
                .collect()
        })
        .collect()
}

fn ints(v: &[Int], at: &str) -> Result<Vec<i64>, IoError> {
    v.iter().map(|x| x.to_i64().ok_or_else(|| err(at, format!("entry {x} does not fit in 64 bits")))).collect()
}

/// A Mackey functor: `preset` with `prime` (and `order` where needed), or all of top, bottom, tr, res, weyl.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MackeyJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub prime: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<GroupJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bottom: Option<GroupJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tr: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub res: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weyl: Option<Vec<Vec<i64>>>,
}

pub const MACKEY_PRESETS: &[&str] = &["burnside", "constant", "j_top", "zero", "f4_frobenius", "f8_frobenius"];
pub const GREEN_PRESETS: &[&str] = &["burnside", "constant", "concentrated", "f4_frobenius", "f8_frobenius"];

fn need<'a, T>(x: &'a Option<T>, at: &str, field: &str) -> Result<&'a T, IoError> {
    x.as_ref().ok_or_else(|| err(&format!("{at}/{field}"), "missing field"))
}

fn order(x: Option<u64>, at: &str) -> Result<u64, IoError> {
    x.ok_or_else(|| err(&format!("{at}/order"), "this preset needs an order"))
}

fn fixed_prime(p: u32, want: u32, at: &str) -> Result<(), IoError> {
    if p == want {
        Ok(())
    } else {
        Err(err(&format!("{at}/prime"), format!("this preset lives over C_{want}")))
    }
}

impl MackeyJson {
    pub fn to_functor(&self, at: &str) -> Result<MackeyFunctor, IoError> {
        let p = self.prime;
        let wrap = |e: crate::mackey::MackeyError| err(at, e.to_string());
        if let Some(name) = &self.preset {
            if self.top.is_some() || self.bottom.is_some() || self.tr.is_some() || self.res.is_some() || self.weyl.is_some() {
                return Err(err(at, "a preset takes no explicit levels"));
            }
            return match name.as_str() {
                "burnside" => burnside(p).map_err(wrap),
                "constant" => constant(p, order(self.order, at)?).map_err(wrap),
                "j_top" => j_top(p, &FGAb::cyclic(order(self.order, at)?)).map_err(wrap),
                "zero" => zero_functor(p).map_err(wrap),
                "f4_frobenius" => {
                    fixed_prime(p, 2, at)?;
                    Ok(f4_frobenius().map_err(|e| err(at, e.to_string()))?.underlying().clone())
                }
                "f8_frobenius" => {
                    fixed_prime(p, 3, at)?;
                    Ok(f8_frobenius().map_err(|e| err(at, e.to_string()))?.underlying().clone())
                }
                other => Err(err(&format!("{at}/preset"), format!("unknown preset {other:?}; known: {}", MACKEY_PRESETS.join(", ")))),
            };
        }
        let top = need(&self.top, at, "top")?.to_group(&format!("{at}/top"))?;
        let bottom = need(&self.bottom, at, "bottom")?.to_group(&format!("{at}/bottom"))?;
        let (t, b) = (top.ngens(), bottom.ngens());
        let tr = matrix(need(&self.tr, at, "tr")?, Some(t), b, &format!("{at}/tr"))?;
        let res = matrix(need(&self.res, at, "res")?, Some(b), t, &format!("{at}/res"))?;
        let weyl = matrix(need(&self.weyl, at, "weyl")?, Some(b), b, &format!("{at}/weyl"))?;
        MackeyFunctor::new(p, top, bottom, tr, res, weyl).map_err(wrap)
    }

    pub fn from_functor(m: &MackeyFunctor) -> Result<Self, IoError> {
        Ok(MackeyJson {
            prime: m.prime(),
            top: Some(GroupJson::from_group(m.top(), "/top")?),
            bottom: Some(GroupJson::from_group(m.bottom(), "/bottom")?),
            tr: Some(rows_i64(m.tr().matrix(), "/tr")?),
            res: Some(rows_i64(m.res().matrix(), "/res")?),
            weyl: Some(rows_i64(m.weyl().matrix(), "/weyl")?),
            ..Default::default()
        })
    }
}

/// A Green functor: a preset, or an explicit Mackey functor with `unit` (image of 1 at the top)
/// and products on generator pairs, column i·n + j for the pair (i, j).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    pub prime: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<GroupJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bottom: Option<GroupJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tr: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub res: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weyl: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mult_top: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mult_bot: Option<Vec<Vec<i64>>>,
}

impl GreenJson {
    pub fn to_green(&self, at: &str) -> Result<GreenFunctor, IoError> {
        let p = self.prime;
        let wrap = |e: crate::green::GreenError| err(at, e.to_string());
        if let Some(name) = &self.preset {
            if self.top.is_some() || self.unit.is_some() || self.mult_top.is_some() || self.mult_bot.is_some() {
                return Err(err(at, "a preset takes no explicit levels"));
            }
            return match name.as_str() {
                "burnside" => burnside_green(p).map_err(wrap),
                "constant" => constant_green(p, order(self.order, at)?).map_err(wrap),
                "concentrated" => concentrated_green(p, order(self.order, at)?).map_err(wrap),
                "f4_frobenius" => {
                    fixed_prime(p, 2, at)?;
                    f4_frobenius().map_err(wrap)
                }
                "f8_frobenius" => {
                    fixed_prime(p, 3, at)?;
                    f8_frobenius().map_err(wrap)
                }
                other => Err(err(&format!("{at}/preset"), format!("unknown preset {other:?}; known: {}", GREEN_PRESETS.join(", ")))),
            };
        }
        let m = MackeyJson {
            preset: None,
            prime: p,
            order: self.order,
            top: self.top.clone(),
            bottom: self.bottom.clone(),
            tr: self.tr.clone(),
            res: self.res.clone(),
            weyl: self.weyl.clone(),
        }
        .to_functor(at)?;
        let (t, b) = (m.top().ngens(), m.bottom().ngens());
        let unit = need(&self.unit, at, "unit")?;
        if unit.len() != t {
            return Err(err(&format!("{at}/unit"), format!("expected {t} entries, found {}", unit.len())));
        }
        let mt = matrix(need(&self.mult_top, at, "mult_top")?, Some(t), t * t, &format!("{at}/mult_top"))?;
        let mb = matrix(need(&self.mult_bot, at, "mult_bot")?, Some(b), b * b, &format!("{at}/mult_bot"))?;
        GreenFunctor::new(m, unit.iter().map(|&x| Int::from(x)).collect(), mt, mb).map_err(wrap)
    }

    pub fn from_green(g: &GreenFunctor) -> Result<Self, IoError> {
        let m = MackeyJson::from_functor(g.underlying())?;
        Ok(GreenJson {
            prime: m.prime,
            top: m.top,
            bottom: m.bottom,
            tr: m.tr,
            res: m.res,
            weyl: m.weyl,
            unit: Some(ints(g.unit_top(), "/unit")?),
            mult_top: Some(rows_i64(g.mult().top_matrix(), "/mult_top")?),
            mult_bot: Some(rows_i64(g.mult().bot_matrix(), "/mult_bot")?),
            ..Default::default()
        })
    }
}
