//! RO(C_p)-degrees, graded Mackey and Green functors over finite windows, and
//! the homotopy Mackey functors of Eilenberg–Mac Lane spectra of Mackey fields.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::boxtensor::{box_product, BoxError, Pairing};
use crate::exactlin::{Int, Matrix, MembershipSolver};
use crate::green::{ClassifiedField, FieldShape, GreenError};
use crate::mackey::{
    direct_sum, enumerate_subfunctors, j_bottom, zero_functor, MackeyError, MackeyFunctor, Subfunctor,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GradingError {
    #[error("degree has {got} representation multiplicities, expected {expected}")]
    BadDegree { expected: usize, got: usize },
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("field is not classified: {0}")]
    UnclassifiedField(String),
    #[error("window overflow: {needed} degrees, limit {limit}")]
    WindowOverflow { needed: usize, limit: usize },
    #[error("piece at degree {0} is infinite")]
    InfiniteGroup(String),
    #[error("graded functor is zero")]
    ZeroFunctor,
    #[error("missing product {0} x {1}")]
    MissingProduct(String, String),
    #[error("bad window: {0}")]
    BadWindow(String),
    #[error("enumeration exceeds {limit} candidates")]
    SizeLimit { limit: usize },
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error(transparent)]
    Mackey(#[from] MackeyError),
    #[error(transparent)]
    Green(#[from] GreenError),
}

/// A virtual real representation of C_p: a copies of the trivial one plus m_j copies of each
/// nontrivial irreducible (σ for p = 2, the rotations λ_1..λ_{(p−1)/2} for odd p).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RODegree {
    #[serde(skip)]
    p: u32,
    pub a: i64,
    pub m: Vec<i64>,
}

pub fn irreducible_count(p: u32) -> usize {
    if p == 2 {
        1
    } else {
        ((p - 1) / 2) as usize
    }
}

impl RODegree {
    pub fn new(p: u32, a: i64, m: Vec<i64>) -> Result<Self, GradingError> {
        let expected = irreducible_count(p);
        if m.len() != expected {
            return Err(GradingError::BadDegree { expected, got: m.len() });
        }
        Ok(RODegree { p, a, m })
    }

    pub fn zero(p: u32) -> Self {
        RODegree { p, a: 0, m: vec![0; irreducible_count(p)] }
    }

    /// The integer degree n.
    pub fn integer(p: u32, n: i64) -> Self {
        RODegree { p, a: n, m: vec![0; irreducible_count(p)] }
    }

    /// The regular representation scaled by k.
    pub fn rho(p: u32, k: i64) -> Self {
        RODegree { p, a: k, m: vec![k; irreducible_count(p)] }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    /// Sets the prime after deserialization.
    pub fn with_prime(mut self, p: u32) -> Result<Self, GradingError> {
        self.p = p;
        RODegree::new(p, self.a, self.m)
    }

    pub fn dim(&self) -> i64 {
        if self.p == 2 {
            self.a + self.m[0]
        } else {
            self.a + 2 * self.m.iter().sum::<i64>()
        }
    }

    pub fn fixed_dim(&self) -> i64 {
        self.a
    }

    pub fn add(&self, o: &RODegree) -> RODegree {
        RODegree { p: self.p, a: self.a + o.a, m: self.m.iter().zip(&o.m).map(|(x, y)| x + y).collect() }
    }

    pub fn neg(&self) -> RODegree {
        RODegree { p: self.p, a: -self.a, m: self.m.iter().map(|x| -x).collect() }
    }

    pub fn sub(&self, o: &RODegree) -> RODegree {
        self.add(&o.neg())
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.m.iter().all(|&x| x == 0)
    }

    /// Canonical key "a|m1,m2,…".
    pub fn key(&self) -> String {
        let ms: Vec<String> = self.m.iter().map(|x| x.to_string()).collect();
        format!("{}|{}", self.a, ms.join(","))
    }

    pub fn parse_key(p: u32, s: &str) -> Result<Self, GradingError> {
        let bad = || GradingError::BadWindow(format!("bad degree key {s:?}"));
        let (a, m) = s.split_once('|').ok_or_else(bad)?;
        let a = a.trim().parse().map_err(|_| bad())?;
        let m = if m.trim().is_empty() {
            vec![]
        } else {
            m.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<Vec<i64>, _>>()?
        };
        RODegree::new(p, a, m)
    }
}

impl fmt::Display for RODegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

/// Signs of the switch map on the two levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RotatingSign {
    pub sign_top: i8,
    pub sign_bot: i8,
}

impl RotatingSign {
    /// The Burnside element y·1 + z·[C_p/e] restricting to these signs: y = sign_top, y + p·z = sign_bot.
    pub fn burnside_element(&self, p: u32) -> (Int, Int) {
        let y = self.sign_top as i64;
        let diff = self.sign_bot as i64 - y;
        debug_assert_eq!(diff % p as i64, 0);
        (Int::from(y), Int::from(diff / p as i64))
    }
}

fn parity_sign(e: i64) -> i8 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn rotating_sign(alpha: &RODegree, beta: &RODegree) -> Result<RotatingSign, GradingError> {
    if alpha.p != beta.p {
        return Err(GradingError::PrimeMismatch(alpha.p, beta.p));
    }
    Ok(RotatingSign {
        sign_top: parity_sign(alpha.fixed_dim() * beta.fixed_dim()),
        sign_bot: parity_sign(alpha.dim() * beta.dim()),
    })
}

/// A box of degrees: a in [a_lo, a_hi], m_j in [m_lo_j, m_hi_j].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub a: (i64, i64),
    pub m: Vec<(i64, i64)>,
}

impl Window {
    pub fn symmetric(p: u32, a: i64, m: i64) -> Self {
        Window { a: (-a, a), m: vec![(-m, m); irreducible_count(p)] }
    }

    /// Integer degrees lo..=hi.
    pub fn integer(p: u32, lo: i64, hi: i64) -> Self {
        Window { a: (lo, hi), m: vec![(0, 0); irreducible_count(p)] }
    }

    pub fn contains(&self, d: &RODegree) -> bool {
        d.a >= self.a.0 && d.a <= self.a.1 && d.m.iter().zip(&self.m).all(|(x, (lo, hi))| x >= lo && x <= hi)
    }

    pub fn size(&self) -> usize {
        let span = |(lo, hi): (i64, i64)| if hi < lo { 0 } else { (hi - lo + 1) as usize };
        self.m.iter().fold(span(self.a), |acc, &r| acc.saturating_mul(span(r)))
    }

    /// All degrees, ordered by (a, m).
    pub fn degrees(&self, p: u32) -> Vec<RODegree> {
        let mut out = Vec::new();
        if self.size() == 0 {
            return out;
        }
        for a in self.a.0..=self.a.1 {
            let mut cur: Vec<i64> = self.m.iter().map(|r| r.0).collect();
            loop {
                out.push(RODegree { p, a, m: cur.clone() });
                let Some(i) = (0..cur.len()).rev().find(|&i| cur[i] < self.m[i].1) else { break };
                cur[i] += 1;
                for j in i + 1..cur.len() {
                    cur[j] = self.m[j].0;
                }
            }
        }
        out
    }

    /// Parses "a=-2..2,m1=-2..2"; unspecified m ranges default to 0..0.
    pub fn parse(p: u32, s: &str) -> Result<Window, GradingError> {
        let k = irreducible_count(p);
        let mut w = Window { a: (0, 0), m: vec![(0, 0); k] };
        let bad = |why: &str| GradingError::BadWindow(format!("{why} in {s:?}"));
        for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (name, range) = part.split_once('=').ok_or_else(|| bad("missing '='"))?;
            let (lo, hi) = match range.split_once("..") {
                Some((l, h)) => (l.trim().parse::<i64>(), h.trim().parse::<i64>()),
                None => (range.trim().parse::<i64>(), range.trim().parse::<i64>()),
            };
            let r = (lo.map_err(|_| bad("bad bound"))?, hi.map_err(|_| bad("bad bound"))?);
            match name.trim() {
                "a" | "n" => w.a = r,
                "m" if k == 1 => w.m[0] = r,
                other => {
                    let idx: usize = other
                        .strip_prefix('m')
                        .and_then(|x| x.parse().ok())
                        .filter(|&i: &usize| i >= 1 && i <= k)
                        .ok_or_else(|| bad("unknown coordinate"))?;
                    w.m[idx - 1] = r;
                }
            }
        }
        Ok(w)
    }
}

impl FromStr for GradingKind {
    type Err = GradingError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "integer" | "Z" => Ok(GradingKind::Integer),
            "ro" | "RO" => Ok(GradingKind::RO),
            _ => Err(GradingError::BadWindow(format!("unknown grading kind {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradingKind {
    Integer,
    RO,
}

/// Finitely many Mackey functors indexed by degrees inside a window; absent degrees are zero.
#[derive(Clone, Debug)]
pub struct GradedMackey {
    pub p: u32,
    pub kind: GradingKind,
    pub window: Window,
    pub pieces: BTreeMap<RODegree, MackeyFunctor>,
    /// Degrees of the support dropped by clipping to the window.
    pub clipped: Vec<RODegree>,
}

impl GradedMackey {
    pub fn new(p: u32, kind: GradingKind, window: Window) -> Self {
        GradedMackey { p, kind, window, pieces: BTreeMap::new(), clipped: Vec::new() }
    }

    pub fn insert(&mut self, d: RODegree, m: MackeyFunctor) -> Result<(), GradingError> {
        if m.prime() != self.p {
            return Err(GradingError::PrimeMismatch(self.p, m.prime()));
        }
        if !self.window.contains(&d) {
            self.clipped.push(d);
            return Ok(());
        }
        if !m.is_zero() {
            self.pieces.insert(d, m);
        }
        Ok(())
    }

    pub fn get(&self, d: &RODegree) -> Option<&MackeyFunctor> {
        self.pieces.get(d)
    }

    pub fn support(&self) -> Vec<RODegree> {
        self.pieces.keys().cloned().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }
}

/// Default bound on the number of degree pairs a graded box product may combine.
pub const DEFAULT_DEGREE_LIMIT: usize = 4096;

/// Degree n piece = ⊕_{k+l=n} M_k □ N_l, clipped to `out`; clipped degrees are recorded.
pub fn graded_box(m: &GradedMackey, n: &GradedMackey, out: &Window, limit: usize) -> Result<GradedMackey, GradingError> {
    if m.p != n.p {
        return Err(GradingError::PrimeMismatch(m.p, n.p));
    }
    let pairs = m.pieces.len() * n.pieces.len();
    if pairs > limit {
        return Err(GradingError::WindowOverflow { needed: pairs, limit });
    }
    let kind = if m.kind == GradingKind::Integer && n.kind == GradingKind::Integer {
        GradingKind::Integer
    } else {
        GradingKind::RO
    };
    let mut parts: BTreeMap<RODegree, Vec<MackeyFunctor>> = BTreeMap::new();
    let mut result = GradedMackey::new(m.p, kind, out.clone());
    for (dk, mk) in &m.pieces {
        for (dl, nl) in &n.pieces {
            let d = dk.add(dl);
            if !out.contains(&d) {
                if !result.clipped.contains(&d) {
                    result.clipped.push(d);
                }
                continue;
            }
            parts.entry(d).or_default().push(box_product(mk, nl)?.functor().clone());
        }
    }
    for (d, fs) in parts {
        let (sum, _) = direct_sum(&fs, m.p);
        result.insert(d, sum)?;
    }
    result.clipped.sort();
    Ok(result)
}

/// A graded Green functor: unit at degree 0 and products between pieces.
#[derive(Clone, Debug)]
pub struct GradedGreen {
    pub graded: GradedMackey,
    pub unit_top: Vec<Int>,
    pub products: BTreeMap<(RODegree, RODegree), Pairing>,
}

impl GradedGreen {
    /// Product pairing M_α × M_β → M_{α+β}, if both pieces and the target are nonzero in the window.
    pub fn product(&self, a: &RODegree, b: &RODegree) -> Option<&Pairing> {
        self.products.get(&(a.clone(), b.clone()))
    }
}

fn characteristic_two(m: &MackeyFunctor) -> bool {
    let b = m.bottom();
    (0..b.ngens()).all(|i| {
        let mut v = vec![Int::zero(); b.ngens()];
        v[i] = Int::from(2);
        b.is_zero_elem(&v)
    })
}

/// The homotopy Mackey functor of HF in degree α.
pub fn em_homotopy(f: &ClassifiedField, alpha: &RODegree) -> Result<MackeyFunctor, GradingError> {
    let g = f.green.underlying();
    let p = g.prime();
    if alpha.p != p {
        return Err(GradingError::PrimeMismatch(p, alpha.p));
    }
    match f.shape {
        FieldShape::ConcentratedAtTop { .. } => {
            if alpha.fixed_dim() == 0 {
                Ok(g.clone())
            } else {
                Ok(zero_functor(p)?)
            }
        }
        FieldShape::FixedPointShape { .. } => {
            if alpha.dim() != 0 {
                return Ok(zero_functor(p)?);
            }
            // dim α = 0 and p = 2 means α = k − kσ with k = a
            if p != 2 || characteristic_two(g) || alpha.a.rem_euclid(2) == 0 {
                Ok(g.clone())
            } else {
                let neg = g.weyl().matrix().neg();
                Ok(j_bottom(2, g.bottom(), &neg)?)
            }
        }
    }
}

/// A pairing between fixed-point-shaped functors, determined by its bottom level through the injective res.
fn pairing_from_bottom(l: &MackeyFunctor, r: &MackeyFunctor, out: &MackeyFunctor, mult_bot: Matrix) -> Result<Pairing, GradingError> {
    let (lt, rt, ot) = (l.top().ngens(), r.top().ngens(), out.top().ngens());
    let probe = Pairing::new(l, r, out, Matrix::zeros(ot, lt * rt), mult_bot.clone())?;
    let solver = MembershipSolver::new(out.bottom(), out.res().matrix());
    let mut top = Matrix::zeros(ot, lt * rt);
    for i in 0..lt {
        for j in 0..rt {
            let prod = probe.apply_bot(&l.res().matrix().column(i), &r.res().matrix().column(j));
            let pre = solver
                .solve(&prod)
                .ok_or_else(|| GradingError::UnclassifiedField("product leaves the fixed points".into()))?;
            for (k, x) in pre.into_iter().enumerate() {
                top.set(k, i * rt + j, x);
            }
        }
    }
    Ok(Pairing::new(l, r, out, top, mult_bot)?)
}

/// The graded Green functor HF_⋆ restricted to a window.
pub fn em_tower(f: &ClassifiedField, window: &Window) -> Result<GradedGreen, GradingError> {
    let g = &f.green;
    let p = g.prime();
    let mut graded = GradedMackey::new(p, GradingKind::RO, window.clone());
    for d in window.degrees(p) {
        graded.insert(d.clone(), em_homotopy(f, &d)?)?;
    }
    let mut products = BTreeMap::new();
    let degs = graded.support();
    for a in &degs {
        for b in &degs {
            let c = a.add(b);
            let Some(out) = graded.get(&c) else { continue };
            let (l, r) = (graded.get(a).unwrap(), graded.get(b).unwrap());
            let pairing = match f.shape {
                FieldShape::ConcentratedAtTop { .. } => Pairing::new(
                    l,
                    r,
                    out,
                    g.mult().top_matrix().clone(),
                    g.mult().bot_matrix().clone(),
                )?,
                FieldShape::FixedPointShape { .. } => pairing_from_bottom(l, r, out, g.mult().bot_matrix().clone())?,
            };
            pairing.check()?;
            products.insert((a.clone(), b.clone()), pairing);
        }
    }
    Ok(GradedGreen { graded, unit_top: g.unit_top().to_vec(), products })
}

/// The outcome of a window-bounded search for graded ideals.
#[derive(Clone, Debug, Serialize)]
pub struct PartialCertificate {
    pub window_partial: bool,
    pub candidates_checked: usize,
    pub support: Vec<String>,
    pub witness: Option<IdealWitness>,
}

/// A nontrivial proper graded ideal inside the window: per degree, the orders of its two levels.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct IdealWitness {
    pub pieces: BTreeMap<String, (u64, u64)>,
    pub principal_generator: Option<(String, Vec<String>)>,
}

/// Bound on the number of graded subfunctor combinations examined.
pub const DEFAULT_COMBINATION_LIMIT: usize = 1 << 20;

fn coords(g: &crate::exactlin::FGAb, v: &[Int]) -> Vec<u64> {
    g.reduce(v).iter().map(|x| x.to_u64().unwrap()).collect()
}

fn graded_closed(g: &GradedGreen, degs: &[RODegree], choice: &[&Subfunctor]) -> bool {
    let idx: BTreeMap<&RODegree, usize> = degs.iter().enumerate().map(|(i, d)| (d, i)).collect();
    for a in degs {
        let m = g.graded.get(a).unwrap();
        let (mt, mb) = (m.top().ngens(), m.bottom().ngens());
        for (j, b) in degs.iter().enumerate() {
            let c = a.add(b);
            let s = choice[j];
            let target_idx = idx.get(&c).copied();
            let Some(pair) = g.product(a, b) else { continue };
            let out = pair.out();
            let in_target = |top: bool, v: &[Int]| -> bool {
                let level = if top { out.top() } else { out.bottom() };
                match target_idx {
                    Some(k) => {
                        let elems = if top { &choice[k].top_elements } else { &choice[k].bottom_elements };
                        elems.contains(&coords(level, v))
                    }
                    None => level.is_zero_elem(v),
                }
            };
            for x in s.inclusion.f_top().matrix().columns() {
                for e in 0..mt {
                    let mut u = vec![Int::zero(); mt];
                    u[e] = Int::one();
                    if !in_target(true, &pair.apply_top(&u, &x)) {
                        return false;
                    }
                }
            }
            for x in s.inclusion.f_bot().matrix().columns() {
                for e in 0..mb {
                    let mut u = vec![Int::zero(); mb];
                    u[e] = Int::one();
                    if !in_target(false, &pair.apply_bot(&u, &x)) {
                        return false;
                    }
                }
            }
        }
    }
    // right multiples follow from left ones only for commutative products; check them as well
    for (j, a) in degs.iter().enumerate() {
        for b in degs.iter() {
            let Some(pair) = g.product(a, b) else { continue };
            let r = g.graded.get(b).unwrap();
            let c = a.add(b);
            let out = pair.out();
            let k = idx.get(&c).copied();
            for x in choice[j].inclusion.f_top().matrix().columns() {
                for e in 0..r.top().ngens() {
                    let mut u = vec![Int::zero(); r.top().ngens()];
                    u[e] = Int::one();
                    let v = pair.apply_top(&x, &u);
                    let ok = match k {
                        Some(k) => choice[k].top_elements.contains(&coords(out.top(), &v)),
                        None => out.top().is_zero_elem(&v),
                    };
                    if !ok {
                        return false;
                    }
                }
            }
            for x in choice[j].inclusion.f_bot().matrix().columns() {
                for e in 0..r.bottom().ngens() {
                    let mut u = vec![Int::zero(); r.bottom().ngens()];
                    u[e] = Int::one();
                    let v = pair.apply_bot(&x, &u);
                    let ok = match k {
                        Some(k) => choice[k].bottom_elements.contains(&coords(out.bottom(), &v)),
                        None => out.bottom().is_zero_elem(&v),
                    };
                    if !ok {
                        return false;
                    }
                }
            }
        }
    }
    true
}

fn is_full(m: &MackeyFunctor, s: &Subfunctor) -> bool {
    Some(s.top_order() as u64) == m.top().order_u64() && Some(s.bottom_order() as u64) == m.bottom().order_u64()
}

/// Searches for a nontrivial proper graded ideal supported in the window.
///
/// Finite pieces: exhaustive over products of per-degree subfunctors. If some piece is
/// infinite, only principal ideals on generators are tried, and finding none is an error.
pub fn graded_field_window_check(g: &GradedGreen, limit: usize) -> Result<PartialCertificate, GradingError> {
    if g.graded.is_zero() {
        return Err(GradingError::ZeroFunctor);
    }
    let degs = g.graded.support();
    let support: Vec<String> = degs.iter().map(|d| d.key()).collect();
    for a in &degs {
        for b in &degs {
            if g.graded.get(&a.add(b)).is_some() && g.product(a, b).is_none() {
                return Err(GradingError::MissingProduct(a.key(), b.key()));
            }
        }
    }
    if let Some(bad) = degs.iter().find(|d| !g.graded.get(d).unwrap().is_finite()) {
        return principal_search(g, &degs, support, bad);
    }
    let mut lattices: Vec<Vec<Subfunctor>> = Vec::new();
    let mut total: usize = 1;
    for d in &degs {
        let subs = enumerate_subfunctors(g.graded.get(d).unwrap())?;
        total = total.checked_mul(subs.len()).filter(|&t| t <= limit).ok_or(GradingError::SizeLimit { limit })?;
        lattices.push(subs);
    }
    let mut cur = vec![0usize; degs.len()];
    let mut checked = 0;
    loop {
        let choice: Vec<&Subfunctor> = cur.iter().enumerate().map(|(i, &k)| &lattices[i][k]).collect();
        let zero = choice.iter().all(|s| s.is_zero());
        let full = choice.iter().zip(&degs).all(|(s, d)| is_full(g.graded.get(d).unwrap(), s));
        if !zero && !full {
            checked += 1;
            if graded_closed(g, &degs, &choice) {
                let pieces = degs
                    .iter()
                    .zip(&choice)
                    .map(|(d, s)| (d.key(), (s.top_order() as u64, s.bottom_order() as u64)))
                    .collect();
                return Ok(PartialCertificate {
                    window_partial: true,
                    candidates_checked: checked,
                    support,
                    witness: Some(IdealWitness { pieces, principal_generator: None }),
                });
            }
        }
        let mut i = cur.len();
        loop {
            if i == 0 {
                return Ok(PartialCertificate { window_partial: true, candidates_checked: checked, support, witness: None });
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < lattices[i].len() {
                break;
            }
            cur[i] = 0;
        }
    }
}

fn principal_search(
    g: &GradedGreen,
    degs: &[RODegree],
    support: Vec<String>,
    infinite: &RODegree,
) -> Result<PartialCertificate, GradingError> {
    let zero = RODegree::zero(g.graded.p);
    let Some(m0) = g.graded.get(&zero) else {
        return Err(GradingError::InfiniteGroup(infinite.key()));
    };
    let solver_unit = |gens: &Matrix| MembershipSolver::new(m0.top(), gens).solve(&g.unit_top).is_some();
    let mut checked = 0;
    for b in degs {
        let mb = g.graded.get(b).unwrap();
        let Some(pair) = g.product(&b.neg(), b) else { continue };
        let ma = pair.left();
        let mut cands: Vec<Vec<Int>> = (0..mb.top().ngens())
            .map(|i| {
                let mut v = vec![Int::zero(); mb.top().ngens()];
                v[i] = Int::one();
                v
            })
            .collect();
        cands.extend(mb.tr().matrix().columns());
        for x in cands {
            if mb.top().is_zero_elem(&x) {
                continue;
            }
            checked += 1;
            let rx = mb.res().apply(&x);
            let mut cols = Vec::new();
            for i in 0..ma.top().ngens() {
                let mut u = vec![Int::zero(); ma.top().ngens()];
                u[i] = Int::one();
                cols.push(pair.apply_top(&u, &x));
            }
            for i in 0..ma.bottom().ngens() {
                let mut u = vec![Int::zero(); ma.bottom().ngens()];
                u[i] = Int::one();
                cols.push(m0.tr().apply(&pair.apply_bot(&u, &rx)));
            }
            let gens = Matrix::from_columns(m0.top().ngens(), &cols);
            if !solver_unit(&gens) {
                let xs: Vec<String> = x.iter().map(|v| v.to_string()).collect();
                return Ok(PartialCertificate {
                    window_partial: true,
                    candidates_checked: checked,
                    support,
                    witness: Some(IdealWitness { pieces: BTreeMap::new(), principal_generator: Some((b.key(), xs)) }),
                });
            }
        }
    }
    Err(GradingError::InfiniteGroup(infinite.key()))
}

/// A graded Green functor concentrated in degree 0.
pub fn degree_zero(g: &crate::green::GreenFunctor, window: &Window) -> Result<GradedGreen, GradingError> {
    let p = g.prime();
    let mut graded = GradedMackey::new(p, GradingKind::Integer, window.clone());
    let z = RODegree::zero(p);
    graded.insert(z.clone(), g.underlying().clone())?;
    let mut products = BTreeMap::new();
    if graded.get(&z).is_some() {
        products.insert((z.clone(), z), g.mult().clone());
    }
    Ok(GradedGreen { graded, unit_top: g.unit_top().to_vec(), products })
}

/// Distinct values of em_homotopy over a window, keyed by degree (for tables).
pub fn em_table(f: &ClassifiedField, window: &Window) -> Result<Vec<(RODegree, String)>, GradingError> {
    let p = f.green.prime();
    window
        .degrees(p)
        .into_iter()
        .map(|d| em_homotopy(f, &d).map(|m| (d, m.canonical().describe())))
        .collect()
}
