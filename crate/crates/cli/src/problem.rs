//! Problem files: `{"version": 1, "command": ..., "payload": {...}, "limits": {...}}`.

use cpmackey::grading::RODegree;
use cpmackey::hochschild::{CandidateDifferential, KoszulAlgebra};
use cpmackey::io::{GreenJson, MackeyJson};
use serde::Deserialize;
use serde_json::Value;

pub const VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub command: String,
    pub payload: Value,
    #[serde(default)]
    pub limits: Limits,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    pub generators: Option<usize>,
    pub window: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Validate {
    #[serde(default)]
    pub functors: Vec<MackeyJson>,
    #[serde(default)]
    pub greens: Vec<GreenJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxPayload {
    pub left: Option<MackeyJson>,
    pub right: Option<MackeyJson>,
    #[serde(default)]
    pub laws: Vec<MackeyJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Greens {
    pub greens: Vec<GreenJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmHomotopy {
    pub fields: Vec<GreenJson>,
    #[serde(default)]
    pub degrees: Vec<RODegree>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldWindow {
    pub field: GreenJson,
    pub combination_limit: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circle {
    pub checks: Vec<CircleCheck>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
pub enum CircleCheck {
    Census { r: usize, top: usize },
    Subdivision { r: usize, top: usize },
    PCircle { p: u32, top: usize },
    Fold { p: u32, top: usize },
    Pinch { p: u32, top: usize },
    Counit { p: u32, top: usize },
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BaseChoice {
    Burnside,
    #[serde(rename = "self")]
    Itself,
}

fn one() -> u32 {
    1
}

fn three() -> usize {
    3
}

fn two() -> usize {
    2
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hh {
    pub algebra: GreenJson,
    pub base: BaseChoice,
    #[serde(default = "one")]
    pub twist: u32,
    #[serde(default = "three")]
    pub truncation: usize,
    /// Also build the algebra tensored with the p-fold circle and compare levelwise.
    #[serde(default)]
    pub compare_circle: bool,
}

#[derive(Debug, Deserialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum TorModules {
    /// M and ^γM over M □ M.
    Bimodule,
    /// R and R over R.
    Regular,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tor {
    pub algebra: GreenJson,
    pub modules: TorModules,
    #[serde(default = "one")]
    pub twist: u32,
    #[serde(default = "two")]
    pub s_max: usize,
    #[serde(default)]
    pub compare_hh: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct E2 {
    pub field: GreenJson,
    pub generators: Vec<RODegree>,
    pub s_max: u32,
    pub weight_max: u32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Leibniz {
    pub algebra: KoszulAlgebra,
    pub differential: CandidateDifferential,
}
