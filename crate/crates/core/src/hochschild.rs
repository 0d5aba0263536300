//! Twisted cyclic bar complexes of Green functors and their homology, Tor from the two-sided bar
//! complex, and weight-sliced Hochschild homology of polynomial towers over a concentrated field.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::boxtensor::{
    concat_pairing, relative_flat_box, slot_map, tree_map, Balancing, BoxError, Factor, FlatBox, Nesting, Pairing,
};
use crate::exactlin::{Int, Matrix};
use crate::grading::{
    em_homotopy, rotating_sign, GradedGreen, GradedMackey, GradingError, GradingKind, RODegree, Window,
};
use crate::green::{validate_green, ClassifiedField, FieldShape, GreenError, GreenFunctor, GreenModule, RingMap, Side};
use crate::mackey::{
    burnside_scalar, direct_sum, homology_of_complex, MackeyCanonical, MackeyChainComplex, MackeyError,
    MackeyFunctor, MackeyMap,
};
use crate::simplicial::{SimplicialError, SimplicialMackey};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HochschildError {
    #[error("not an algebra: {0}")]
    NotAnAlgebra(String),
    #[error("presentation needs {needed} generators, limit is {limit}")]
    SizeLimit { needed: usize, limit: usize },
    #[error("window overflow: {needed} summands, limit {limit}")]
    WindowOverflow { needed: usize, limit: usize },
    #[error("bidegree mismatch: {0}")]
    BidegreeMismatch(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Box(BoxError),
    #[error(transparent)]
    Mackey(#[from] MackeyError),
    #[error(transparent)]
    Green(#[from] GreenError),
    #[error(transparent)]
    Grading(#[from] GradingError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
}

impl From<BoxError> for HochschildError {
    fn from(e: BoxError) -> Self {
        match e {
            BoxError::SizeLimit { needed, limit } => HochschildError::SizeLimit { needed, limit },
            e => HochschildError::Box(e),
        }
    }
}

/// The ring the bar construction is balanced over.
#[derive(Clone, Debug)]
pub enum Base {
    /// Absolute box products.
    Burnside,
    /// Box products balanced over R through a ring map R → M.
    Ring { ring: GreenFunctor, structure: RingMap },
}

impl Base {
    pub fn over_itself(m: &GreenFunctor) -> Base {
        Base::Ring { ring: m.clone(), structure: RingMap { map: MackeyMap::identity(m.underlying()) } }
    }
}

fn unit_vec(n: usize, i: usize) -> Vec<Int> {
    let mut v = vec![Int::zero(); n];
    v[i] = Int::one();
    v
}

fn require_commutative_algebra(base: &Base, m: &GreenFunctor) -> Result<(), HochschildError> {
    let report = validate_green(m)?;
    if !report.valid() {
        return Err(HochschildError::NotAnAlgebra("Green functor axioms fail".into()));
    }
    if !report.commutative {
        return Err(HochschildError::NotAnAlgebra("multiplication is not commutative".into()));
    }
    if let Base::Ring { ring, structure } = base {
        let f = &structure.map;
        let (r, mm) = (ring.underlying(), m.underlying());
        if f.source().canonical() != r.canonical() || f.target().canonical() != mm.canonical() {
            return Err(HochschildError::NotAnAlgebra("structure map has the wrong source or target".into()));
        }
        if !mm.top().elems_equal(&f.f_top().apply(ring.unit_top()), m.unit_top()) {
            return Err(HochschildError::NotAnAlgebra("structure map does not preserve the unit".into()));
        }
        let (rt, rb) = (r.top().ngens(), r.bottom().ngens());
        for i in 0..rt {
            for j in 0..rt {
                let (a, b) = (unit_vec(rt, i), unit_vec(rt, j));
                let lhs = f.f_top().apply(&ring.mul_top(&a, &b));
                let rhs = m.mul_top(&f.f_top().apply(&a), &f.f_top().apply(&b));
                if !mm.top().elems_equal(&lhs, &rhs) {
                    return Err(HochschildError::NotAnAlgebra(format!("structure map is not multiplicative at top ({i}, {j})")));
                }
            }
        }
        for i in 0..rb {
            for j in 0..rb {
                let (a, b) = (unit_vec(rb, i), unit_vec(rb, j));
                let lhs = f.f_bot().apply(&ring.mul_bot(&a, &b));
                let rhs = m.mul_bot(&f.f_bot().apply(&a), &f.f_bot().apply(&b));
                if !mm.bottom().elems_equal(&lhs, &rhs) {
                    return Err(HochschildError::NotAnAlgebra(format!("structure map is not multiplicative at bottom ({i}, {j})")));
                }
            }
        }
    }
    Ok(())
}

/// The twisted cyclic bar construction truncated at level K.
#[derive(Clone, Debug)]
pub struct TwistedCyclicBar {
    pub algebra: GreenFunctor,
    pub twist: u32,
    pub truncation: usize,
    pub complex: SimplicialMackey,
}

/// Level k of the bar construction: k+1 copies of M, boxed over the base and closed up by the twist.
fn bar_level(base: &Base, m: &GreenFunctor, twist: u32, k: usize, limit: usize) -> Result<FlatBox, HochschildError> {
    let factors = vec![m.underlying().clone(); k + 1];
    let p = m.prime();
    match base {
        Base::Burnside => Ok(FlatBox::new(p, &factors, limit)?),
        Base::Ring { ring, structure } => {
            let (right, left) = m.actions_through(structure)?;
            let wrap = Some((right.clone(), left.clone(), twist));
            let bal = Balancing { ring: ring.underlying().clone(), right: vec![right; k], left: vec![left; k], wrap };
            Ok(relative_flat_box(p, &factors, &bal, limit)?.0)
        }
    }
}

pub fn twisted_cyclic_bar(
    base: &Base,
    m: &GreenFunctor,
    twist: u32,
    truncation: usize,
    limit: usize,
) -> Result<TwistedCyclicBar, HochschildError> {
    if truncation < 1 {
        return Err(HochschildError::Unsupported("truncation must be at least 1".into()));
    }
    require_commutative_algebra(base, m)?;
    let twist = twist % m.prime();
    let levels: Vec<FlatBox> = (0..=truncation).map(|k| bar_level(base, m, twist, k, limit)).collect::<Result<_, _>>()?;
    let mu = m.mult();
    let mut faces = vec![Vec::new()];
    let mut degens = Vec::new();
    for k in 0..=truncation {
        if k > 0 {
            let mut fs = Vec::with_capacity(k + 1);
            for i in 0..k {
                let mut trees: Vec<Factor> = (0..i).map(Factor::slot).collect();
                trees.push(Factor::slot(i).times(Factor::slot(i + 1), mu));
                trees.extend((i + 2..=k).map(Factor::slot));
                fs.push(slot_map(&levels[k], &trees, &levels[k - 1])?);
            }
            let mut trees = vec![Factor::twisted(k, twist).times(Factor::slot(0), mu)];
            trees.extend((1..k).map(Factor::slot));
            fs.push(slot_map(&levels[k], &trees, &levels[k - 1])?);
            faces.push(fs);
        }
        if k < truncation {
            let mut ds = Vec::with_capacity(k + 1);
            for i in 0..=k {
                let mut trees: Vec<Factor> = (0..=i).map(Factor::slot).collect();
                trees.push(m.unit_factor());
                trees.extend((i + 1..=k).map(Factor::slot));
                ds.push(slot_map(&levels[k], &trees, &levels[k + 1])?);
            }
            degens.push(ds);
        }
    }
    let complex = SimplicialMackey { levels, faces, degens };
    if let Some(bad) = complex.failed_identities().into_iter().next() {
        return Err(HochschildError::NotAnAlgebra(format!("simplicial identity fails: {bad}")));
    }
    Ok(TwistedCyclicBar { algebra: m.clone(), twist, truncation, complex })
}

/// One homology group with its trust flag.
#[derive(Clone, Debug, Serialize)]
pub struct HomologyEntry {
    pub s: usize,
    pub top: String,
    pub bottom: String,
    pub canonical: MackeyCanonical,
    /// False at the highest stored degree, which would need one more level to be trusted.
    pub certified: bool,
    #[serde(skip)]
    pub functor: MackeyFunctor,
}

fn entry(s: usize, h: MackeyFunctor, certified: bool) -> HomologyEntry {
    HomologyEntry {
        s,
        top: h.top().describe(),
        bottom: h.bottom().describe(),
        canonical: h.canonical(),
        certified,
        functor: h,
    }
}

/// Homology of the Moore complex in degrees 0..K−1; degree K−1 is flagged uncertified.
pub fn hh_of_bar(bar: &TwistedCyclicBar) -> Result<Vec<HomologyEntry>, HochschildError> {
    let c = bar.complex.moore_complex()?;
    let k = bar.truncation;
    Ok(homology_of_complex(&c)?
        .into_iter()
        .take(k)
        .map(|(s, h)| {
            let s = s as usize;
            entry(s, h, s + 2 <= k)
        })
        .collect())
}

pub fn hh(base: &Base, m: &GreenFunctor, twist: u32, truncation: usize, limit: usize) -> Result<Vec<HomologyEntry>, HochschildError> {
    hh_of_bar(&twisted_cyclic_bar(base, m, twist, truncation, limit)?)
}

/// M □ M with the factorwise product.
pub fn enveloping(m: &GreenFunctor, limit: usize) -> Result<GreenFunctor, HochschildError> {
    let p = m.prime();
    let mm = m.underlying();
    let e2 = FlatBox::new(p, &[mm.clone(), mm.clone()], limit)?;
    let e4 = FlatBox::new(p, &vec![mm.clone(); 4], limit)?;
    let cp = concat_pairing(&Nesting::Boxed(e2.clone()), &Nesting::Boxed(e2.clone()), &e4, limit)?;
    let mu = m.mult();
    let fold = slot_map(&e4, &[Factor::slot(0).times(Factor::slot(2), mu), Factor::slot(1).times(Factor::slot(3), mu)], &e2)?;
    let mult = cp.then(&fold)?;
    let unit = e2.pure_element(&[m.unit_top().to_vec(), m.unit_top().to_vec()]);
    Ok(GreenFunctor::new(e2.functor().clone(), unit, mult.top_matrix().clone(), mult.bot_matrix().clone())?)
}

/// M as a right module over M □ M, and M as a left module with the second factor twisted by weyl^t:
/// m·(a ⊗ b) = m a b and (a ⊗ b)·n = γ^t(a) n b.
pub fn bimodule_pair(m: &GreenFunctor, e: &GreenFunctor, twist: u32, limit: usize) -> Result<(GreenModule, GreenModule), HochschildError> {
    let p = m.prime();
    let mm = m.underlying();
    let e2 = FlatBox::new(p, &[mm.clone(), mm.clone()], limit)?;
    let e3 = FlatBox::new(p, &vec![mm.clone(); 3], limit)?;
    let mu = m.mult();
    let right_cp = concat_pairing(&Nesting::Single(mm.clone()), &Nesting::Boxed(e2.clone()), &e3, limit)?;
    let right = right_cp.then(&tree_map(&e3, &Factor::slot(0).times(Factor::slot(1), mu).times(Factor::slot(2), mu))?)?;
    let left_cp = concat_pairing(&Nesting::Boxed(e2), &Nesting::Single(mm.clone()), &e3, limit)?;
    let left_tree = Factor::twisted(0, twist % p).times(Factor::slot(2), mu).times(Factor::slot(1), mu);
    let left = left_cp.then(&tree_map(&e3, &left_tree)?)?;
    let rm = GreenModule::new(e, mm, right, Side::Right)?;
    let lm = GreenModule::new(e, mm, left, Side::Left)?;
    Ok((rm, lm))
}

/// Tor^E_s(M, N) for s ≤ s_max from the two-sided bar complex M □ E^{□s} □ N.
pub fn tor_via_bar(
    e: &GreenFunctor,
    m: &GreenModule,
    n: &GreenModule,
    s_max: usize,
    limit: usize,
) -> Result<Vec<HomologyEntry>, HochschildError> {
    if m.side != Side::Right || n.side != Side::Left {
        return Err(HochschildError::Green(GreenError::NotAModule("expected a right and a left module".into())));
    }
    let ef = e.underlying();
    let p = e.prime();
    let mut levels = Vec::new();
    for s in 0..=s_max + 1 {
        let mut factors = vec![m.carrier.clone()];
        factors.extend(std::iter::repeat_n(ef.clone(), s));
        factors.push(n.carrier.clone());
        levels.push(FlatBox::new(p, &factors, limit)?);
    }
    let mut objects = Vec::new();
    let mut diffs = Vec::new();
    for s in 0..=s_max + 1 {
        objects.push(levels[s].functor().clone());
        if s == 0 {
            continue;
        }
        let mut d = MackeyMap::zero(levels[s].functor(), levels[s - 1].functor());
        for i in 0..=s {
            let pairing = if i == 0 {
                &m.action
            } else if i == s {
                &n.action
            } else {
                e.mult()
            };
            let mut trees: Vec<Factor> = (0..i).map(Factor::slot).collect();
            trees.push(Factor::slot(i).times(Factor::slot(i + 1), pairing));
            trees.extend((i + 2..=s + 1).map(Factor::slot));
            let f = slot_map(&levels[s], &trees, &levels[s - 1])?;
            d = if i % 2 == 0 { d.add(&f) } else { d.sub(&f) };
        }
        diffs.push(d);
    }
    let c = MackeyChainComplex::new(0, objects, diffs)?;
    Ok(homology_of_complex(&c)?.into_iter().take(s_max + 1).map(|(s, h)| entry(s as usize, h, true)).collect())
}

/// HH of M through Tor over the enveloping algebra.
pub fn hh_via_tor(m: &GreenFunctor, twist: u32, s_max: usize, limit: usize) -> Result<Vec<HomologyEntry>, HochschildError> {
    require_commutative_algebra(&Base::Burnside, m)?;
    let e = enveloping(m, limit)?;
    let (rm, lm) = bimodule_pair(m, &e, twist, limit)?;
    tor_via_bar(&e, &rm, &lm, s_max, limit)
}

/// Weight of each generator: degree i·ρ has weight i.
fn generator_weights(p: u32, generators: &[RODegree]) -> Result<Vec<u32>, HochschildError> {
    generators
        .iter()
        .map(|g| {
            let w = g.a;
            if w >= 1 && *g == RODegree::rho(p, w) {
                Ok(w as u32)
            } else {
                Err(HochschildError::Unsupported(format!("generator degree {} is not a positive multiple of ρ", g.key())))
            }
        })
        .collect()
}

/// Exponent vectors of monomials of total weight w, in lexicographic order.
pub fn monomials(weights: &[u32], w: u32) -> Vec<Vec<u32>> {
    fn go(weights: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == weights.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for e in 0..=left / weights[i] {
            cur.push(e);
            go(weights, i + 1, left - e * weights[i], cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(weights, 0, w, &mut Vec::new(), &mut out);
    out
}

fn require_concentrated(f: &ClassifiedField) -> Result<(), HochschildError> {
    match f.shape {
        FieldShape::ConcentratedAtTop { .. } => Ok(()),
        _ => Err(HochschildError::Unsupported("polynomial towers are built over a field concentrated at the top".into())),
    }
}

/// One summand of a tower piece: a monomial times a coefficient degree.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct TowerSummand {
    pub exponents: Vec<u32>,
    pub coefficient_degree: String,
}

/// HF_⋆[b_1, …, b_n] on a window: each piece is a sum over monomials of the coefficient tower.
#[derive(Clone, Debug)]
pub struct PolynomialTower {
    pub weights: Vec<u32>,
    pub graded: GradedGreen,
    pub summands: BTreeMap<RODegree, Vec<TowerSummand>>,
}

impl PolynomialTower {
    /// Number of copies of the field at degree d.
    pub fn rank(&self, d: &RODegree) -> usize {
        self.summands.get(d).map_or(0, Vec::len)
    }
}

pub fn polynomial_tower(
    f: &ClassifiedField,
    generators: &[RODegree],
    window: &Window,
    limit: usize,
) -> Result<PolynomialTower, HochschildError> {
    require_concentrated(f)?;
    let g = f.green.underlying();
    let p = g.prime();
    let weights = generator_weights(p, generators)?;
    let degrees = window.degrees(p);
    let w_bound = degrees.iter().map(|d| d.a.abs() + d.m.iter().map(|x| 2 * x.abs()).sum::<i64>()).max().unwrap_or(0) as u32;
    let mut layout: BTreeMap<RODegree, Vec<(Vec<u32>, RODegree)>> = BTreeMap::new();
    let mut count = 0usize;
    for d in &degrees {
        let mut parts = Vec::new();
        for w in 0..=w_bound {
            let c = d.sub(&RODegree::rho(p, w as i64));
            if em_homotopy(f, &c)?.is_zero() {
                continue;
            }
            for mono in monomials(&weights, w) {
                count += 1;
                if count > limit {
                    return Err(HochschildError::WindowOverflow { needed: count, limit });
                }
                parts.push((mono, c.clone()));
            }
        }
        if !parts.is_empty() {
            layout.insert(d.clone(), parts);
        }
    }
    let mut graded = GradedMackey::new(p, GradingKind::RO, window.clone());
    let mut sums = BTreeMap::new();
    for (d, parts) in &layout {
        let pieces = vec![g.clone(); parts.len()];
        let (sum, offsets) = direct_sum(&pieces, p);
        graded.insert(d.clone(), sum.clone())?;
        sums.insert(d.clone(), (sum, offsets));
    }
    let mut products = BTreeMap::new();
    for (a, pa) in &layout {
        for (b, pb) in &layout {
            let c = a.add(b);
            let Some(pc) = layout.get(&c) else { continue };
            let (la, lb, lc) = (&sums[a].0, &sums[b].0, &sums[&c].0);
            let pairing = block_pairing(g, f.green.mult(), (la, pa), (lb, pb), (lc, pc))?;
            products.insert((a.clone(), b.clone()), pairing);
        }
    }
    let summands = layout
        .into_iter()
        .map(|(d, parts)| {
            (d, parts.into_iter().map(|(e, c)| TowerSummand { exponents: e, coefficient_degree: c.key() }).collect())
        })
        .collect();
    Ok(PolynomialTower {
        weights,
        graded: GradedGreen { graded, unit_top: f.green.unit_top().to_vec(), products },
        summands,
    })
}

type Layout<'a> = (&'a MackeyFunctor, &'a Vec<(Vec<u32>, RODegree)>);

/// Product of sums of field copies: (μ, x)·(ν, y) = (μν, xy).
fn block_pairing(g: &MackeyFunctor, mult: &Pairing, a: Layout, b: Layout, c: Layout) -> Result<Pairing, HochschildError> {
    let (gt, gb) = (g.top().ngens(), g.bottom().ngens());
    let (lt, rt) = (a.0.top().ngens(), b.0.top().ngens());
    let (lb, rb) = (a.0.bottom().ngens(), b.0.bottom().ngens());
    let mut top = Matrix::zeros(c.0.top().ngens(), lt * rt);
    let mut bot = Matrix::zeros(c.0.bottom().ngens(), lb * rb);
    for (i, (ma, ca)) in a.1.iter().enumerate() {
        for (j, (mb, cb)) in b.1.iter().enumerate() {
            let prod: Vec<u32> = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
            let cd = ca.add(cb);
            let Some(k) = c.1.iter().position(|(m, d)| *m == prod && *d == cd) else { continue };
            for x in 0..gt {
                for y in 0..gt {
                    let v = mult.apply_top(&unit_vec(gt, x), &unit_vec(gt, y));
                    for (r, val) in v.into_iter().enumerate() {
                        top.set(k * gt + r, (i * gt + x) * rt + j * gt + y, val);
                    }
                }
            }
            for x in 0..gb {
                for y in 0..gb {
                    let v = mult.apply_bot(&unit_vec(gb, x), &unit_vec(gb, y));
                    for (r, val) in v.into_iter().enumerate() {
                        bot.set(k * gb + r, (i * gb + x) * rb + j * gb + y, val);
                    }
                }
            }
        }
    }
    let pairing = Pairing::new(a.0, b.0, c.0, top, bot)?;
    pairing.check()?;
    Ok(pairing)
}

/// Ordered compositions of w into `parts` nonnegative parts, lexicographically.
fn compositions(w: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 1 {
        return vec![vec![w]];
    }
    let mut out = Vec::new();
    for first in 0..=w {
        for mut rest in compositions(w - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// One level of a weight slice: compositions, their boxes, and the direct sum with offsets.
struct SliceLevel {
    comps: Vec<Vec<u32>>,
    boxes: Vec<FlatBox>,
    sum: MackeyFunctor,
    offsets: Vec<(usize, usize)>,
}

/// Weight pieces of k[b_1, …, b_n] over the concentrated field k, with their products.
struct WeightAlgebra {
    p: u32,
    pieces: Vec<MackeyFunctor>,
    products: BTreeMap<(u32, u32), Pairing>,
}

impl WeightAlgebra {
    fn new(f: &ClassifiedField, weights: &[u32], w_max: u32) -> Result<Self, HochschildError> {
        let g = f.green.underlying();
        let p = g.prime();
        let zero = RODegree::zero(p);
        let layouts: Vec<Vec<(Vec<u32>, RODegree)>> =
            (0..=w_max).map(|w| monomials(weights, w).into_iter().map(|m| (m, zero.clone())).collect()).collect();
        let pieces: Vec<MackeyFunctor> = layouts.iter().map(|l| direct_sum(&vec![g.clone(); l.len()], p).0).collect();
        let mut products = BTreeMap::new();
        for a in 0..=w_max {
            for b in 0..=w_max - a {
                let (a_, b_, c_) = (a as usize, b as usize, (a + b) as usize);
                let pairing = block_pairing(
                    g,
                    f.green.mult(),
                    (&pieces[a_], &layouts[a_]),
                    (&pieces[b_], &layouts[b_]),
                    (&pieces[c_], &layouts[c_]),
                )?;
                products.insert((a, b), pairing);
            }
        }
        Ok(WeightAlgebra { p, pieces, products })
    }

    fn box_of(&self, comp: &[u32], limit: usize) -> Result<FlatBox, HochschildError> {
        let factors: Vec<MackeyFunctor> = comp.iter().map(|&w| self.pieces[w as usize].clone()).collect();
        Ok(FlatBox::new(self.p, &factors, limit)?)
    }

    /// Level s of the cyclic bar complex in weight w, as a direct sum over compositions.
    fn level(&self, w: u32, s: usize, limit: usize) -> Result<SliceLevel, HochschildError> {
        let comps = compositions(w, s + 1);
        let boxes: Vec<FlatBox> = comps.iter().map(|c| self.box_of(c, limit)).collect::<Result<_, _>>()?;
        let funcs: Vec<MackeyFunctor> = boxes.iter().map(|b| b.functor().clone()).collect();
        let (sum, offsets) = direct_sum(&funcs, self.p);
        Ok(SliceLevel { comps, boxes, sum, offsets })
    }
}

/// The graded Moore differential of one weight slice, from level s to s−1.
fn slice_differential(
    alg: &WeightAlgebra,
    twist: u32,
    src: &SliceLevel,
    tgt: &SliceLevel,
) -> Result<MackeyMap, HochschildError> {
    let p = alg.p;
    let mut top = Matrix::zeros(tgt.sum.top().ngens(), src.sum.top().ngens());
    let mut bot = Matrix::zeros(tgt.sum.bottom().ngens(), src.sum.bottom().ngens());
    for (ci, comp) in src.comps.iter().enumerate() {
        let s = comp.len() - 1;
        for i in 0..=s {
            let (target, trees): (Vec<u32>, Vec<Factor>) = if i < s {
                let mut t = comp[..i].to_vec();
                t.push(comp[i] + comp[i + 1]);
                t.extend_from_slice(&comp[i + 2..]);
                let mut trees: Vec<Factor> = (0..i).map(Factor::slot).collect();
                trees.push(Factor::slot(i).times(Factor::slot(i + 1), &alg.products[&(comp[i], comp[i + 1])]));
                trees.extend((i + 2..=s).map(Factor::slot));
                (t, trees)
            } else {
                let last = comp[s];
                let rest: u32 = comp[..s].iter().sum();
                let sign = rotating_sign(&RODegree::rho(p, last as i64), &RODegree::rho(p, rest as i64))?;
                let (y, z) = sign.burnside_element(p);
                let scalar = burnside_scalar(&alg.pieces[last as usize], &y, &z);
                let mut t = vec![last + comp[0]];
                t.extend_from_slice(&comp[1..s]);
                let mut trees =
                    vec![Factor::twisted(s, twist).mapped(&scalar).times(Factor::slot(0), &alg.products[&(last, comp[0])])];
                trees.extend((1..s).map(Factor::slot));
                (t, trees)
            };
            let tj = tgt.comps.iter().position(|c| *c == target).expect("faces preserve weight");
            let f = slot_map(&src.boxes[ci], &trees, &tgt.boxes[tj])?;
            let sign = if i % 2 == 0 { Int::one() } else { -Int::one() };
            let (so_t, so_b) = src.offsets[ci];
            let (to_t, to_b) = tgt.offsets[tj];
            let (ft, fb) = (f.f_top().matrix(), f.f_bot().matrix());
            for r in 0..ft.nrows() {
                for c in 0..ft.ncols() {
                    let v = ft.get(r, c);
                    if !v.is_zero() {
                        top.add_at(to_t + r, so_t + c, &(v * &sign));
                    }
                }
            }
            for r in 0..fb.nrows() {
                for c in 0..fb.ncols() {
                    let v = fb.get(r, c);
                    if !v.is_zero() {
                        bot.add_at(to_b + r, so_b + c, &(v * &sign));
                    }
                }
            }
        }
    }
    Ok(MackeyMap::new(&src.sum, &tgt.sum, top, bot)?)
}

fn rank_over(field_order: u64, order: u64) -> u64 {
    let mut r = 0;
    let mut n = order;
    while n > 1 {
        n /= field_order;
        r += 1;
    }
    r
}

/// One entry of a bigraded table: homological degree s and internal degree w·ρ.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct RankEntry {
    pub s: u32,
    pub weight: u32,
    pub degree: String,
    pub rank: u64,
    pub top: String,
    pub bottom: String,
}

/// Ranks over the field, keyed by (s, w); absent keys are outside the window.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct BigradedRankTable {
    pub p: u32,
    pub s_max: u32,
    pub weight_max: u32,
    pub entries: Vec<RankEntry>,
}

impl BigradedRankTable {
    pub fn rank(&self, s: u32, weight: u32) -> Option<u64> {
        self.entries.iter().find(|e| e.s == s && e.weight == weight).map(|e| e.rank)
    }
}

fn concentrated_f2(f: &ClassifiedField) -> Result<u64, HochschildError> {
    require_concentrated(f)?;
    match f.shape {
        FieldShape::ConcentratedAtTop { order } => Ok(order),
        _ => unreachable!(),
    }
}

/// HH_s in weight w of k[b_1, …, b_n] over k, computed on its own.
pub fn e2_entry(f: &ClassifiedField, generators: &[RODegree], s: u32, w: u32, limit: usize) -> Result<RankEntry, HochschildError> {
    let q = concentrated_f2(f)?;
    let p = f.green.prime();
    let weights = generator_weights(p, generators)?;
    let alg = WeightAlgebra::new(f, &weights, w)?;
    let s = s as usize;
    let mut levels = Vec::new();
    for k in s.saturating_sub(1)..=s + 1 {
        levels.push(alg.level(w, k, limit)?);
    }
    let here = if s == 0 { 0 } else { 1 };
    let out = if s == 0 { None } else { Some(slice_differential(&alg, 1, &levels[1], &levels[0])?) };
    let inc = slice_differential(&alg, 1, &levels[here + 1], &levels[here])?;
    let (objects, diffs) = match out {
        Some(o) => (vec![levels[0].sum.clone(), levels[1].sum.clone(), levels[2].sum.clone()], vec![o, inc]),
        None => (vec![levels[0].sum.clone(), levels[1].sum.clone()], vec![inc]),
    };
    let c = MackeyChainComplex::new(0, objects, diffs)?;
    let h = homology_of_complex(&c)?[here].1.clone();
    Ok(rank_entry(p, q, s as u32, w, &h))
}

fn rank_entry(p: u32, q: u64, s: u32, w: u32, h: &MackeyFunctor) -> RankEntry {
    let order = h.top().order_u64().unwrap_or(0);
    RankEntry {
        s,
        weight: w,
        degree: RODegree::rho(p, w as i64).key(),
        rank: rank_over(q, order),
        top: h.top().describe(),
        bottom: h.bottom().describe(),
    }
}

/// Ranks of k[b_1..b_n] ⊗ Λ(z_1..z_n), |b_i| = (0, d_i), |z_i| = (1, d_i), from the generating function
/// Π (1 + t x^{d_i}) / (1 − x^{d_i}).
pub fn koszul_ranks(weights: &[u32], s_max: u32, w_max: u32) -> BTreeMap<(u32, u32), u64> {
    let (ns, nw) = (s_max as usize + 1, w_max as usize + 1);
    let mut poly = vec![vec![0u64; nw]; ns];
    poly[0][0] = 1;
    for &d in weights {
        let d = d as usize;
        // multiply by 1/(1 − x^d)
        for row in poly.iter_mut() {
            for w in d..nw {
                row[w] += row[w - d];
            }
        }
        // multiply by (1 + t x^d)
        let prev = poly.clone();
        for s in 1..ns {
            for w in d..nw {
                poly[s][w] += prev[s - 1][w - d];
            }
        }
    }
    let mut out = BTreeMap::new();
    for s in 0..ns {
        for w in 0..nw {
            out.insert((s as u32, w as u32), poly[s][w]);
        }
    }
    out
}

/// Outcome of the E₂ computation against the Koszul count.
#[derive(Clone, Debug, Serialize)]
pub struct E2Report {
    pub computed: BigradedRankTable,
    pub oracle: BigradedRankTable,
    pub agree: bool,
    pub mismatches: Vec<(u32, u32)>,
    pub collapse: LeibnizReport,
    pub note: String,
}

pub fn bokstedt_e2(
    f: &ClassifiedField,
    generators: &[RODegree],
    s_max: u32,
    w_max: u32,
    limit: usize,
) -> Result<E2Report, HochschildError> {
    let q = concentrated_f2(f)?;
    if q != 2 {
        return Err(HochschildError::Unsupported(format!("coefficients have order {q}, expected the field with two elements")));
    }
    if s_max > 3 {
        return Err(HochschildError::Unsupported("homological degree is limited to 3".into()));
    }
    let p = f.green.prime();
    let weights = generator_weights(p, generators)?;
    let alg = WeightAlgebra::new(f, &weights, w_max)?;
    // weight slices are independent; each runs on its own thread
    let slice = |w: u32| -> Result<Vec<RankEntry>, HochschildError> {
        let levels: Vec<_> = (0..=s_max as usize + 1).map(|s| alg.level(w, s, limit)).collect::<Result<_, _>>()?;
        let diffs: Vec<MackeyMap> =
            (1..levels.len()).map(|s| slice_differential(&alg, 1, &levels[s], &levels[s - 1])).collect::<Result<_, _>>()?;
        let c = MackeyChainComplex::new(0, levels.iter().map(|l| l.sum.clone()).collect(), diffs)?;
        Ok(homology_of_complex(&c)?
            .into_iter()
            .take(s_max as usize + 1)
            .map(|(s, h)| rank_entry(p, q, s as u32, w, &h))
            .collect())
    };
    let results: Vec<Result<Vec<RankEntry>, HochschildError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..=w_max).map(|w| scope.spawn(move || slice(w))).collect();
        handles.into_iter().map(|h| h.join().expect("slice thread panicked")).collect()
    });
    let mut entries = Vec::new();
    for r in results {
        entries.extend(r?);
    }
    entries.sort_by_key(|e| (e.s, e.weight));
    let computed = BigradedRankTable { p, s_max, weight_max: w_max, entries };
    let counts = koszul_ranks(&weights, s_max, w_max);
    let oracle = BigradedRankTable {
        p,
        s_max,
        weight_max: w_max,
        entries: counts
            .iter()
            .map(|(&(s, w), &rank)| RankEntry {
                s,
                weight: w,
                degree: RODegree::rho(p, w as i64).key(),
                rank,
                top: if rank == 0 { "0".into() } else if rank == 1 { "Z/2".into() } else { format!("(Z/2)^{rank}") },
                bottom: "0".into(),
            })
            .collect(),
    };
    let mismatches: Vec<(u32, u32)> = counts
        .iter()
        .filter(|(&(s, w), &r)| computed.rank(s, w) != Some(r))
        .map(|(&k, _)| k)
        .collect();
    let algebra = KoszulAlgebra { p, characteristic: q, weights: weights.clone(), s_max, weight_max: w_max };
    let collapse = leibniz_check(&algebra, &CandidateDifferential { r: 2, values: Vec::new() })?;
    Ok(E2Report {
        agree: mismatches.is_empty(),
        mismatches,
        computed,
        oracle,
        collapse,
        note: "generators sit in homological degrees 0 and 1, so every d^r with r ≥ 2 vanishes on them and hence everywhere".into(),
    })
}

/// k[b_1..b_n] ⊗ Λ(z_1..z_n) over a field of the given characteristic, |b_i| = (0, d_i ρ), |z_i| = (1, d_i ρ).
#[derive(Clone, Debug, Serialize, serde::Deserialize)]
pub struct KoszulAlgebra {
    pub p: u32,
    pub characteristic: u64,
    pub weights: Vec<u32>,
    pub s_max: u32,
    pub weight_max: u32,
}

impl KoszulAlgebra {
    pub fn generators(&self) -> Vec<(String, u32, u32)> {
        let mut out = Vec::new();
        for (i, &d) in self.weights.iter().enumerate() {
            out.push((format!("b{}", i + 1), 0, d));
        }
        for (i, &d) in self.weights.iter().enumerate() {
            out.push((format!("z{}", i + 1), 1, d));
        }
        out
    }

    /// Dimension at (s, α); zero for negative s or α off the multiples of ρ.
    pub fn rank_at(&self, s: i64, alpha: &RODegree) -> u64 {
        if s < 0 {
            return 0;
        }
        let w = alpha.a;
        if w < 0 || *alpha != RODegree::rho(self.p, w) {
            return 0;
        }
        koszul_ranks(&self.weights, s as u32, w as u32)[&(s as u32, w as u32)]
    }
}

/// The value of a candidate differential on one generator: a coefficient vector over the basis
/// of the declared target bidegree.
#[derive(Clone, Debug, Serialize, serde::Deserialize)]
pub struct DifferentialValue {
    pub generator: String,
    pub target_s: i64,
    pub target_degree: RODegree,
    pub coefficients: Vec<i64>,
}

#[derive(Clone, Debug, Serialize, serde::Deserialize)]
pub struct CandidateDifferential {
    pub r: i64,
    pub values: Vec<DifferentialValue>,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct GeneratorVerdict {
    pub generator: String,
    pub source: (i64, String),
    pub target: (i64, String),
    pub target_rank: u64,
    pub value_zero: bool,
    pub forced_zero: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Propagation {
    pub product: String,
    pub target: (i64, String),
    pub target_rank: u64,
    /// Leibniz coefficient of the propagated value, reduced mod the characteristic.
    pub leibniz_coefficient: i64,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LeibnizReport {
    pub r: i64,
    pub generators: Vec<GeneratorVerdict>,
    pub propagations: Vec<Propagation>,
    pub inconsistencies: Vec<String>,
    pub consistent: bool,
    pub collapse_certified: bool,
}

/// Checks bidegrees, values in zero groups, and Leibniz propagation to squares, cubes and pairwise products.
pub fn leibniz_check(alg: &KoszulAlgebra, d: &CandidateDifferential) -> Result<LeibnizReport, HochschildError> {
    let p = alg.p;
    let q = alg.characteristic as i64;
    let gens = alg.generators();
    let shift = RODegree::integer(p, d.r - 1);
    let target_of = |s: i64, w: u32| (s - d.r, RODegree::rho(p, w as i64).add(&shift));
    let mut values: BTreeMap<String, bool> = BTreeMap::new();
    let mut verdicts = Vec::new();
    let mut inconsistencies = Vec::new();
    for v in &d.values {
        let Some((_, s, w)) = gens.iter().find(|(n, _, _)| *n == v.generator).cloned() else {
            return Err(HochschildError::Unsupported(format!("unknown generator {}", v.generator)));
        };
        let (ts, td) = target_of(s as i64, w);
        let declared = v.target_degree.clone().with_prime(p)?;
        if v.target_s != ts || declared != td {
            return Err(HochschildError::BidegreeMismatch(format!(
                "d{} on {} must land in ({}, {}), got ({}, {})",
                d.r,
                v.generator,
                ts,
                td.key(),
                v.target_s,
                declared.key()
            )));
        }
        let rank = alg.rank_at(ts, &td);
        let nonzero = v.coefficients.iter().any(|c| c.rem_euclid(q) != 0);
        if rank > 0 && v.coefficients.len() as u64 != rank {
            return Err(HochschildError::BidegreeMismatch(format!(
                "value on {} has {} coefficients, target has rank {rank}",
                v.generator,
                v.coefficients.len()
            )));
        }
        if nonzero && rank == 0 {
            inconsistencies.push(format!("d{}({}) is nonzero but E({}, {}) = 0", d.r, v.generator, ts, td.key()));
        }
        values.insert(v.generator.clone(), nonzero);
    }
    for (name, s, w) in &gens {
        let (ts, td) = target_of(*s as i64, *w);
        let rank = alg.rank_at(ts, &td);
        let nonzero = values.get(name).copied().unwrap_or(false);
        verdicts.push(GeneratorVerdict {
            generator: name.clone(),
            source: (*s as i64, RODegree::rho(p, *w as i64).key()),
            target: (ts, td.key()),
            target_rank: rank,
            value_zero: !nonzero,
            forced_zero: rank == 0,
        });
    }
    // sign (−1)^{s + dim α^{C_p}} of each generator
    let eps = |s: u32, w: u32| if (s as i64 + RODegree::rho(p, w as i64).fixed_dim()).rem_euclid(2) == 0 { 1i64 } else { -1 };
    let mut propagations = Vec::new();
    for (i, (gi, si, wi)) in gens.iter().enumerate() {
        let di = values.get(gi).copied().unwrap_or(false);
        // powers g^n: d(g^n) = (1 + ε + … + ε^{n−1}) g^{n−1} d(g)
        if *si == 0 && di {
            for n in 2..=3u32 {
                let e = eps(*si, *wi);
                let coef: i64 = (0..n).map(|j| e.pow(j)).sum::<i64>().rem_euclid(q);
                let (ts, td) = target_of(0, wi * n);
                let rank = alg.rank_at(ts, &td);
                let consistent = coef == 0 || rank > 0;
                if !consistent {
                    inconsistencies.push(format!("d{}({gi}^{n}) = {coef}·{gi}^{} d{}({gi}) ≠ 0 but E({ts}, {}) = 0", d.r, n - 1, d.r, td.key()));
                }
                propagations.push(Propagation {
                    product: format!("{gi}^{n}"),
                    target: (ts, td.key()),
                    target_rank: rank,
                    leibniz_coefficient: coef,
                    consistent,
                });
            }
        }
        for (gj, sj, wj) in gens.iter().skip(i + 1) {
            let dj = values.get(gj).copied().unwrap_or(false);
            if !(di || dj) {
                continue;
            }
            let (ts, td) = target_of((si + sj) as i64, wi + wj);
            let rank = alg.rank_at(ts, &td);
            let consistent = rank > 0;
            if !consistent {
                inconsistencies.push(format!("d{}({gi}·{gj}) has a nonzero Leibniz term but E({ts}, {}) = 0", d.r, td.key()));
            }
            propagations.push(Propagation {
                product: format!("{gi}·{gj}"),
                target: (ts, td.key()),
                target_rank: rank,
                leibniz_coefficient: 1,
                consistent,
            });
        }
    }
    let consistent = inconsistencies.is_empty();
    let collapse_certified = consistent && verdicts.iter().all(|v| v.forced_zero && v.value_zero);
    Ok(LeibnizReport { r: d.r, generators: verdicts, propagations, inconsistencies, consistent, collapse_certified })
}

/// Reduced top-level description of a functor for comparisons that ignore presentations.
pub fn same_homology(a: &[HomologyEntry], b: &[HomologyEntry]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.s == y.s && x.canonical == y.canonical)
}

/// Order of the top level as a u64 (0 if infinite).
pub fn top_order(h: &HomologyEntry) -> u64 {
    h.functor.top().order_u64().unwrap_or(0)
}
