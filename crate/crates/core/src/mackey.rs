//! C_p-Mackey functors in two-level form, maps between them, subfunctor
//! enumeration, and levelwise homology of chain complexes.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::exactlin::{
    hermite_rows, hom_cokernel, hom_kernel, minimized, subgroup, AbHom, ExactError, FGAb, Int, Matrix,
    MembershipSolver,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MackeyError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the given action does not have order dividing {p}")]
    NotAnAction { p: u32 },
    #[error("level {level} is infinite (free rank > 0)")]
    InfiniteGroup { level: &'static str },
    #[error("primes differ: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("not a map of Mackey functors: {condition} fails at generator {generator}")]
    NotAMap { condition: &'static str, generator: usize },
    #[error("not a complex: d∘d ≠ 0 at degree {degree}")]
    NotAComplex { degree: i64 },
    #[error("Mackey axiom {axiom} fails at bottom generator {generator}")]
    AxiomFailure { axiom: &'static str, generator: usize },
    #[error("group too large to enumerate ({0} elements allowed)")]
    TooLarge(usize),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u32) -> Result<(), MackeyError> {
    if is_prime(p as u64) {
        Ok(())
    } else {
        Err(MackeyError::NotPrime(p as u64))
    }
}

/// A C_p-Mackey functor: values at C_p/C_p (top) and C_p/e (bottom) with
/// transfer, restriction and the action of the generator γ on the bottom.
#[derive(Clone)]
pub struct MackeyFunctor {
    p: u32,
    top: FGAb,
    bottom: FGAb,
    tr: AbHom,
    res: AbHom,
    weyl: AbHom,
}

impl fmt::Debug for MackeyFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mackey(p={}, top={}, bottom={})", self.p, self.top.describe(), self.bottom.describe())
    }
}

/// Invariant factors of both levels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MackeyCanonical {
    pub top_free_rank: usize,
    pub top_torsion: Vec<String>,
    pub bottom_free_rank: usize,
    pub bottom_torsion: Vec<String>,
}

impl MackeyCanonical {
    pub fn is_zero(&self) -> bool {
        self.top_free_rank == 0
            && self.top_torsion.is_empty()
            && self.bottom_free_rank == 0
            && self.bottom_torsion.is_empty()
    }

    pub fn describe(&self) -> String {
        fn level(r: usize, t: &[String]) -> String {
            let mut parts: Vec<String> = t.iter().map(|d| format!("Z/{d}")).collect();
            for _ in 0..r {
                parts.push("Z".into());
            }
            if parts.is_empty() {
                "0".into()
            } else {
                parts.join("+")
            }
        }
        format!(
            "[{} | {}]",
            level(self.top_free_rank, &self.top_torsion),
            level(self.bottom_free_rank, &self.bottom_torsion)
        )
    }
}

impl MackeyFunctor {
    /// Builds a functor; homomorphisms are checked for well-definedness, axioms are not.
    pub fn new(p: u32, top: FGAb, bottom: FGAb, tr: Matrix, res: Matrix, weyl: Matrix) -> Result<Self, MackeyError> {
        let tr = AbHom::new(bottom.clone(), top.clone(), tr)?;
        let res = AbHom::new(top.clone(), bottom.clone(), res)?;
        let weyl = AbHom::new(bottom.clone(), bottom.clone(), weyl)?;
        Ok(MackeyFunctor { p, top, bottom, tr, res, weyl })
    }

    /// Builds a functor and rejects it unless every axiom holds.
    pub fn new_validated(
        p: u32,
        top: FGAb,
        bottom: FGAb,
        tr: Matrix,
        res: Matrix,
        weyl: Matrix,
    ) -> Result<Self, MackeyError> {
        let m = Self::new(p, top, bottom, tr, res, weyl)?;
        m.check_axioms()?;
        Ok(m)
    }

    pub(crate) fn from_homs(p: u32, tr: AbHom, res: AbHom, weyl: AbHom) -> Self {
        MackeyFunctor { p, top: tr.target().clone(), bottom: tr.source().clone(), tr, res, weyl }
    }

    pub fn prime(&self) -> u32 {
        self.p
    }
    pub fn top(&self) -> &FGAb {
        &self.top
    }
    pub fn bottom(&self) -> &FGAb {
        &self.bottom
    }
    pub fn tr(&self) -> &AbHom {
        &self.tr
    }
    pub fn res(&self) -> &AbHom {
        &self.res
    }
    pub fn weyl(&self) -> &AbHom {
        &self.weyl
    }

    /// weyl^k as a matrix (k taken modulo p).
    pub fn weyl_power(&self, k: u32) -> Matrix {
        self.weyl.matrix().pow((k % self.p) as usize)
    }

    /// Σ_{i<p} weyl^i as a matrix.
    pub fn norm_matrix(&self) -> Matrix {
        let n = self.bottom.ngens();
        let mut acc = Matrix::zeros(n, n);
        let mut pw = Matrix::identity(n);
        for _ in 0..self.p {
            acc = acc.add(&pw);
            pw = pw.mul(self.weyl.matrix());
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.top.is_trivial() && self.bottom.is_trivial()
    }

    pub fn canonical(&self) -> MackeyCanonical {
        let (tr, tt) = self.top.canonical();
        let (br, bt) = self.bottom.canonical();
        MackeyCanonical {
            top_free_rank: tr,
            top_torsion: tt.iter().map(|d| d.to_string()).collect(),
            bottom_free_rank: br,
            bottom_torsion: bt.iter().map(|d| d.to_string()).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.top.is_finite() && self.bottom.is_finite()
    }

    /// Same data with extra relations on each level.
    pub fn quotient(&self, top_rel: &Matrix, bot_rel: &Matrix) -> Result<MackeyFunctor, MackeyError> {
        let top = self.top.with_relations(top_rel);
        let bottom = self.bottom.with_relations(bot_rel);
        Self::new(
            self.p,
            top,
            bottom,
            self.tr.matrix().clone(),
            self.res.matrix().clone(),
            self.weyl.matrix().clone(),
        )
    }

    fn check_axioms(&self) -> Result<(), MackeyError> {
        let r = validate_mackey(self);
        for c in &r.checks {
            if !c.passed {
                return Err(MackeyError::AxiomFailure { axiom: c.name, generator: c.witness.unwrap_or(0) });
            }
        }
        Ok(())
    }
}

/// One named check with an optional witness generator index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn hom_check(name: &'static str, a: &AbHom, b: &AbHom) -> Check {
    let w = a.first_difference(b);
    Check { name, passed: w.is_none(), witness: w }
}

/// Checks the four C_p axioms as hom equalities on the bottom level.
pub fn validate_mackey(m: &MackeyFunctor) -> ValidationReport {
    let b = m.bottom();
    let wp = AbHom::new_unchecked(b.clone(), b.clone(), m.weyl_power(m.p));
    let norm = AbHom::new_unchecked(b.clone(), b.clone(), m.norm_matrix());
    let mut checks = vec![Check {
        name: "well-defined",
        passed: m.tr.is_well_defined() && m.res.is_well_defined() && m.weyl.is_well_defined(),
        witness: None,
    }];
    checks.push(hom_check("weyl^p = id", &wp, &AbHom::identity(b)));
    checks.push(hom_check("res∘tr = Σ weyl^i", &m.res.after(&m.tr), &norm));
    checks.push(hom_check("tr∘weyl = tr", &m.tr.after(&m.weyl), &m.tr));
    let wr = m.weyl.after(&m.res);
    let wc = wr.first_difference(&m.res);
    checks.push(Check { name: "weyl∘res = res", passed: wc.is_none(), witness: wc });
    ValidationReport { checks }
}

/// The Burnside functor: top ℤ² on [C_p/C_p], [C_p/e]; bottom ℤ.
pub fn burnside(p: u32) -> Result<MackeyFunctor, MackeyError> {
    check_prime(p)?;
    MackeyFunctor::new(
        p,
        FGAb::free(2),
        FGAb::free(1),
        Matrix::from_i64(2, 1, &[0, 1]),
        Matrix::from_i64(1, 2, &[1, p as i64]),
        Matrix::identity(1),
    )
}

/// Constant functor on ℤ (n = 0) or ℤ/n: res = id, tr = p.
pub fn constant(p: u32, n: u64) -> Result<MackeyFunctor, MackeyError> {
    check_prime(p)?;
    let g = FGAb::cyclic(n);
    MackeyFunctor::new(
        p,
        g.clone(),
        g,
        Matrix::from_i64(1, 1, &[p as i64]),
        Matrix::identity(1),
        Matrix::identity(1),
    )
}

/// J_{C_p/C_p}(V): top V, bottom 0.
pub fn j_top(p: u32, v: &FGAb) -> Result<MackeyFunctor, MackeyError> {
    check_prime(p)?;
    let z = FGAb::zero();
    MackeyFunctor::new(
        p,
        v.clone(),
        z,
        Matrix::zeros(v.ngens(), 0),
        Matrix::zeros(0, v.ngens()),
        Matrix::zeros(0, 0),
    )
}

pub fn zero_functor(p: u32) -> Result<MackeyFunctor, MackeyError> {
    j_top(p, &FGAb::zero())
}

/// J_{C_p/e}(V): bottom V with γ, top the fixed points, res the inclusion, tr the norm.
pub fn j_bottom(p: u32, v: &FGAb, gamma: &Matrix) -> Result<MackeyFunctor, MackeyError> {
    check_prime(p)?;
    let g = AbHom::new(v.clone(), v.clone(), gamma.clone())?;
    let gp = AbHom::new_unchecked(v.clone(), v.clone(), gamma.pow(p as usize));
    if !gp.equals(&AbHom::identity(v)) {
        return Err(MackeyError::NotAnAction { p });
    }
    let diff = g.sub(&AbHom::identity(v));
    let (_, incl) = hom_kernel(&diff)?;
    let (fixed, into, _) = minimized(incl.source());
    let res = incl.after(&into);
    let n = v.ngens();
    let mut norm = Matrix::zeros(n, n);
    let mut pw = Matrix::identity(n);
    for _ in 0..p {
        norm = norm.add(&pw);
        pw = pw.mul(gamma);
    }
    let solver = MembershipSolver::new(v, res.matrix());
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let c = solver.solve(&norm.column(j)).expect("norm lands in the fixed points");
        cols.push(c);
    }
    let tr = Matrix::from_columns(fixed.ngens(), &cols);
    MackeyFunctor::new(p, fixed, v.clone(), tr, res.matrix().clone(), gamma.clone())
}

/// A map of Mackey functors.
#[derive(Clone, Debug)]
pub struct MackeyMap {
    source: MackeyFunctor,
    target: MackeyFunctor,
    f_top: AbHom,
    f_bot: AbHom,
}

impl MackeyMap {
    /// Checked constructor: well-defined levels commuting with tr, res and weyl.
    pub fn new(source: &MackeyFunctor, target: &MackeyFunctor, f_top: Matrix, f_bot: Matrix) -> Result<Self, MackeyError> {
        if source.p != target.p {
            return Err(MackeyError::PrimeMismatch(source.p, target.p));
        }
        let f_top = AbHom::new(source.top.clone(), target.top.clone(), f_top)?;
        let f_bot = AbHom::new(source.bottom.clone(), target.bottom.clone(), f_bot)?;
        let m = MackeyMap { source: source.clone(), target: target.clone(), f_top, f_bot };
        m.check_commutes()?;
        Ok(m)
    }

    pub(crate) fn new_unchecked(source: &MackeyFunctor, target: &MackeyFunctor, f_top: Matrix, f_bot: Matrix) -> Self {
        let f_top = AbHom::new_unchecked(source.top.clone(), target.top.clone(), f_top);
        let f_bot = AbHom::new_unchecked(source.bottom.clone(), target.bottom.clone(), f_bot);
        MackeyMap { source: source.clone(), target: target.clone(), f_top, f_bot }
    }

    fn check_commutes(&self) -> Result<(), MackeyError> {
        let (s, t) = (&self.source, &self.target);
        if let Some(g) = self.f_top.after(&s.tr).first_difference(&t.tr.after(&self.f_bot)) {
            return Err(MackeyError::NotAMap { condition: "f∘tr = tr∘f", generator: g });
        }
        if let Some(g) = self.f_bot.after(&s.res).first_difference(&t.res.after(&self.f_top)) {
            return Err(MackeyError::NotAMap { condition: "f∘res = res∘f", generator: g });
        }
        if let Some(g) = self.f_bot.after(&s.weyl).first_difference(&t.weyl.after(&self.f_bot)) {
            return Err(MackeyError::NotAMap { condition: "f∘γ = γ∘f", generator: g });
        }
        Ok(())
    }

    pub fn identity(m: &MackeyFunctor) -> Self {
        Self::new_unchecked(m, m, Matrix::identity(m.top.ngens()), Matrix::identity(m.bottom.ngens()))
    }

    pub fn zero(source: &MackeyFunctor, target: &MackeyFunctor) -> Self {
        Self::new_unchecked(
            source,
            target,
            Matrix::zeros(target.top.ngens(), source.top.ngens()),
            Matrix::zeros(target.bottom.ngens(), source.bottom.ngens()),
        )
    }

    /// The weyl action of m as an endomorphism (identity on top).
    pub fn weyl_endomorphism(m: &MackeyFunctor, k: u32) -> Self {
        Self::new_unchecked(m, m, Matrix::identity(m.top.ngens()), m.weyl_power(k))
    }

    pub fn source(&self) -> &MackeyFunctor {
        &self.source
    }
    pub fn target(&self) -> &MackeyFunctor {
        &self.target
    }
    pub fn f_top(&self) -> &AbHom {
        &self.f_top
    }
    pub fn f_bot(&self) -> &AbHom {
        &self.f_bot
    }

    /// self ∘ other
    pub fn after(&self, other: &MackeyMap) -> MackeyMap {
        MackeyMap {
            source: other.source.clone(),
            target: self.target.clone(),
            f_top: self.f_top.after(&other.f_top),
            f_bot: self.f_bot.after(&other.f_bot),
        }
    }

    pub fn add(&self, other: &MackeyMap) -> MackeyMap {
        MackeyMap {
            source: self.source.clone(),
            target: self.target.clone(),
            f_top: self.f_top.add(&other.f_top),
            f_bot: self.f_bot.add(&other.f_bot),
        }
    }

    pub fn sub(&self, other: &MackeyMap) -> MackeyMap {
        MackeyMap {
            source: self.source.clone(),
            target: self.target.clone(),
            f_top: self.f_top.sub(&other.f_top),
            f_bot: self.f_bot.sub(&other.f_bot),
        }
    }

    pub fn scale(&self, c: &Int) -> MackeyMap {
        MackeyMap {
            source: self.source.clone(),
            target: self.target.clone(),
            f_top: self.f_top.scale(c),
            f_bot: self.f_bot.scale(c),
        }
    }

    /// Equality up to relations; returns the first differing (level, generator).
    pub fn first_difference(&self, other: &MackeyMap) -> Option<(&'static str, usize)> {
        if let Some(g) = self.f_top.first_difference(&other.f_top) {
            return Some(("top", g));
        }
        self.f_bot.first_difference(&other.f_bot).map(|g| ("bottom", g))
    }

    pub fn equals(&self, other: &MackeyMap) -> bool {
        self.first_difference(other).is_none()
    }

    /// Bit-for-bit equality of matrices (stronger than equality up to relations).
    pub fn identical(&self, other: &MackeyMap) -> bool {
        self.f_top.matrix() == other.f_top.matrix() && self.f_bot.matrix() == other.f_bot.matrix()
    }

    pub fn is_zero(&self) -> bool {
        self.f_top.is_zero_map() && self.f_bot.is_zero_map()
    }

    pub fn is_iso(&self) -> bool {
        self.f_top.is_iso() && self.f_bot.is_iso()
    }

    /// Reinterprets the same matrices between quotient presentations.
    pub fn reinterpret(&self, source: &MackeyFunctor, target: &MackeyFunctor) -> Result<MackeyMap, MackeyError> {
        MackeyMap::new(source, target, self.f_top.matrix().clone(), self.f_bot.matrix().clone())
    }
}

/// A subfunctor together with its inclusion.
#[derive(Clone, Debug)]
pub struct Subfunctor {
    pub functor: MackeyFunctor,
    pub inclusion: MackeyMap,
    /// Canonical coordinates of the elements at each level (sorted).
    pub top_elements: BTreeSet<Vec<u64>>,
    pub bottom_elements: BTreeSet<Vec<u64>>,
}

impl Subfunctor {
    pub fn is_zero(&self) -> bool {
        self.top_elements.len() <= 1 && self.bottom_elements.len() <= 1
    }

    pub fn top_order(&self) -> usize {
        self.top_elements.len()
    }

    pub fn bottom_order(&self) -> usize {
        self.bottom_elements.len()
    }
}

/// Elements of a finite group addressed by canonical coordinates.
pub(crate) struct FiniteView {
    pub group: FGAb,
    pub orders: Vec<u64>,
    pub elements: Vec<Vec<u64>>,
}

pub(crate) const ENUMERATION_LIMIT: usize = 1 << 14;

impl FiniteView {
    pub fn new(g: &FGAb, level: &'static str) -> Result<Self, MackeyError> {
        if !g.is_finite() {
            return Err(MackeyError::InfiniteGroup { level });
        }
        let elements = g.enumerate_canonical(ENUMERATION_LIMIT).ok_or(MackeyError::TooLarge(ENUMERATION_LIMIT))?;
        let orders = g.canonical_orders().iter().map(|o| o.to_u64().unwrap()).collect();
        Ok(FiniteView { group: g.clone(), orders, elements })
    }

    pub fn to_canonical(&self, x: &[Int]) -> Vec<u64> {
        self.group.reduce(x).iter().map(|v| v.to_u64().unwrap()).collect()
    }

    pub fn to_generators(&self, y: &[u64]) -> Vec<Int> {
        let c: Vec<Int> = y.iter().map(|&v| Int::from(v)).collect();
        self.group.lift(&c)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).zip(&self.orders).map(|((x, y), o)| (x + y) % o).collect()
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.orders.len()]
    }

    /// All subgroups, each as a sorted element set, ordered by Hermite key.
    pub fn subgroups(&self) -> Vec<BTreeSet<Vec<u64>>> {
        let mut seen: BTreeSet<Vec<Vec<u64>>> = BTreeSet::new();
        let mut found: Vec<BTreeSet<Vec<u64>>> = Vec::new();
        let zero: BTreeSet<Vec<u64>> = [self.zero()].into_iter().collect();
        let mut queue = vec![zero];
        while let Some(h) = queue.pop() {
            let key: Vec<Vec<u64>> = h.iter().cloned().collect();
            if !seen.insert(key) {
                continue;
            }
            for g in &self.elements {
                if h.contains(g) {
                    continue;
                }
                queue.push(self.join(&h, g));
            }
            found.push(h);
        }
        let mut keyed: Vec<(Vec<Vec<Int>>, BTreeSet<Vec<u64>>)> =
            found.into_iter().map(|h| (self.hermite_key(&h), h)).collect();
        keyed.sort();
        keyed.into_iter().map(|(_, h)| h).collect()
    }

    fn join(&self, h: &BTreeSet<Vec<u64>>, g: &[u64]) -> BTreeSet<Vec<u64>> {
        let mut out = h.clone();
        let mut mult = g.to_vec();
        while mult != self.zero() {
            for x in h {
                out.insert(self.add(x, &mult));
            }
            mult = self.add(&mult, g);
        }
        out
    }

    /// Hermite basis of the lattice {x ∈ ℤ^k : x mod orders ∈ H}.
    pub fn hermite_key(&self, h: &BTreeSet<Vec<u64>>) -> Vec<Vec<Int>> {
        let k = self.orders.len();
        let mut rows: Vec<Vec<Int>> = h.iter().map(|e| e.iter().map(|&v| Int::from(v)).collect()).collect();
        for (i, &o) in self.orders.iter().enumerate() {
            let mut r = vec![Int::zero(); k];
            r[i] = Int::from(o);
            rows.push(r);
        }
        hermite_rows(&Matrix::from_rows(rows, k)).to_rows()
    }

    /// A small generating set: the Hermite basis rows reduced into range.
    pub fn generators(&self, h: &BTreeSet<Vec<u64>>) -> Vec<Vec<u64>> {
        self.hermite_key(h)
            .into_iter()
            .map(|r| {
                r.iter()
                    .zip(&self.orders)
                    .map(|(v, &o)| {
                        let o = Int::from(o);
                        ((v % &o + &o) % &o).to_u64().unwrap()
                    })
                    .collect::<Vec<u64>>()
            })
            .filter(|r| r.iter().any(|&v| v != 0))
            .collect()
    }
}

fn image_in(hom: &AbHom, src: &FiniteView, dst: &FiniteView, y: &[u64]) -> Vec<u64> {
    dst.to_canonical(&hom.apply(&src.to_generators(y)))
}

/// Every subfunctor of a finite Mackey functor, in Hermite order (top outer, bottom inner).
pub fn enumerate_subfunctors(m: &MackeyFunctor) -> Result<Vec<Subfunctor>, MackeyError> {
    let tv = FiniteView::new(m.top(), "top")?;
    let bv = FiniteView::new(m.bottom(), "bottom")?;
    let tops = tv.subgroups();
    let bots = bv.subgroups();
    let top_gens: Vec<Vec<Vec<u64>>> = tops.iter().map(|h| tv.generators(h)).collect();
    let bot_gens: Vec<Vec<Vec<u64>>> = bots.iter().map(|h| bv.generators(h)).collect();
    let mut out = Vec::new();
    for (ti, st) in tops.iter().enumerate() {
        let res_imgs: Vec<Vec<u64>> = top_gens[ti].iter().map(|g| image_in(m.res(), &tv, &bv, g)).collect();
        for (bi, sb) in bots.iter().enumerate() {
            if !res_imgs.iter().all(|x| sb.contains(x)) {
                continue;
            }
            let ok = bot_gens[bi].iter().all(|g| {
                st.contains(&image_in(m.tr(), &bv, &tv, g)) && sb.contains(&image_in(m.weyl(), &bv, &bv, g))
            });
            if !ok {
                continue;
            }
            out.push(build_subfunctor(m, &tv, &bv, st, sb, &top_gens[ti], &bot_gens[bi])?);
        }
    }
    Ok(out)
}

fn build_subfunctor(
    m: &MackeyFunctor,
    tv: &FiniteView,
    bv: &FiniteView,
    st: &BTreeSet<Vec<u64>>,
    sb: &BTreeSet<Vec<u64>>,
    tg: &[Vec<u64>],
    bg: &[Vec<u64>],
) -> Result<Subfunctor, MackeyError> {
    let tcols: Vec<Vec<Int>> = tg.iter().map(|g| tv.to_generators(g)).collect();
    let bcols: Vec<Vec<Int>> = bg.iter().map(|g| bv.to_generators(g)).collect();
    let tmat = Matrix::from_columns(m.top().ngens(), &tcols);
    let bmat = Matrix::from_columns(m.bottom().ngens(), &bcols);
    let (top, tincl) = subgroup(m.top(), &tmat);
    let (bottom, bincl) = subgroup(m.bottom(), &bmat);
    let functor = induced_subfunctor(m, &top, &tincl, &bottom, &bincl)?;
    let inclusion = MackeyMap::new(&functor, m, tincl.matrix().clone(), bincl.matrix().clone())?;
    Ok(Subfunctor { functor, inclusion, top_elements: st.clone(), bottom_elements: sb.clone() })
}

/// Structure maps on sub-presentations (given by inclusions) induced from m.
pub(crate) fn induced_subfunctor(
    m: &MackeyFunctor,
    top: &FGAb,
    tincl: &AbHom,
    bottom: &FGAb,
    bincl: &AbHom,
) -> Result<MackeyFunctor, MackeyError> {
    let tsolve = MembershipSolver::new(m.top(), tincl.matrix());
    let bsolve = MembershipSolver::new(m.bottom(), bincl.matrix());
    let lift = |solver: &MembershipSolver, hom: &AbHom, incl: &AbHom, n: usize| -> Matrix {
        let cols: Vec<Vec<Int>> = (0..incl.source().ngens())
            .map(|j| solver.solve(&hom.apply(&incl.matrix().column(j))).expect("structure map preserves the subfunctor"))
            .collect();
        Matrix::from_columns(n, &cols)
    };
    let tr = lift(&tsolve, m.tr(), bincl, top.ngens());
    let res = lift(&bsolve, m.res(), tincl, bottom.ngens());
    let weyl = lift(&bsolve, m.weyl(), bincl, bottom.ngens());
    MackeyFunctor::new(m.prime(), top.clone(), bottom.clone(), tr, res, weyl)
}

/// A bounded chain complex of Mackey functors; diffs[i] : objects[i+1] → objects[i].
#[derive(Clone, Debug)]
pub struct MackeyChainComplex {
    pub lowest_degree: i64,
    pub objects: Vec<MackeyFunctor>,
    pub differentials: Vec<MackeyMap>,
}

impl MackeyChainComplex {
    pub fn new(lowest_degree: i64, objects: Vec<MackeyFunctor>, differentials: Vec<MackeyMap>) -> Result<Self, MackeyError> {
        assert_eq!(differentials.len() + 1, objects.len().max(1), "one differential between consecutive objects");
        let c = MackeyChainComplex { lowest_degree, objects, differentials };
        for i in 1..c.differentials.len() {
            let dd = c.differentials[i - 1].after(&c.differentials[i]);
            if !dd.is_zero() {
                return Err(MackeyError::NotAComplex { degree: c.lowest_degree + i as i64 + 1 });
            }
        }
        Ok(c)
    }

    pub fn highest_degree(&self) -> i64 {
        self.lowest_degree + self.objects.len() as i64 - 1
    }

    pub fn shifted(&self, by: i64) -> MackeyChainComplex {
        MackeyChainComplex {
            lowest_degree: self.lowest_degree + by,
            objects: self.objects.clone(),
            differentials: self.differentials.clone(),
        }
    }
}

/// Homology of one level: kernel of `out` modulo the image of `inc`, with the kernel inclusion.
fn level_homology(group: &FGAb, out: Option<&AbHom>, inc: Option<&AbHom>) -> Result<(FGAb, AbHom), MackeyError> {
    let (k, incl) = match out {
        Some(d) => hom_kernel(d)?,
        None => (group.clone(), AbHom::identity(group)),
    };
    let h = match inc {
        Some(d) => {
            let solver = MembershipSolver::new(group, incl.matrix());
            let mut rows = Vec::new();
            for j in 0..d.source().ngens() {
                let x = d.matrix().column(j);
                let c = solver.solve(&x).expect("d∘d = 0 puts boundaries inside cycles");
                rows.push(c);
            }
            k.with_relations(&Matrix::from_rows(rows, k.ngens()))
        }
        None => k,
    };
    let incl = AbHom::new_unchecked(h.clone(), group.clone(), incl.matrix().clone());
    Ok((h, incl))
}

/// Homology at every degree, with induced tr, res and weyl.
pub fn homology_of_complex(c: &MackeyChainComplex) -> Result<Vec<(i64, MackeyFunctor)>, MackeyError> {
    let n = c.objects.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let obj = &c.objects[i];
        let d_out = if i > 0 { Some(&c.differentials[i - 1]) } else { None };
        let d_in = if i + 1 < n { Some(&c.differentials[i]) } else { None };
        let (top, tincl) = level_homology(obj.top(), d_out.map(|d| d.f_top()), d_in.map(|d| d.f_top()))?;
        let (bottom, bincl) = level_homology(obj.bottom(), d_out.map(|d| d.f_bot()), d_in.map(|d| d.f_bot()))?;
        let h = induced_on_homology(obj, &top, &tincl, &bottom, &bincl)?;
        out.push((c.lowest_degree + i as i64, h));
    }
    Ok(out)
}

fn induced_on_homology(
    m: &MackeyFunctor,
    top: &FGAb,
    tincl: &AbHom,
    bottom: &FGAb,
    bincl: &AbHom,
) -> Result<MackeyFunctor, MackeyError> {
    // cycles are preserved by tr/res/weyl, so solve inside the cycle generators
    let tsolve = MembershipSolver::new(m.top(), tincl.matrix());
    let bsolve = MembershipSolver::new(m.bottom(), bincl.matrix());
    let lift = |solver: &MembershipSolver, hom: &AbHom, incl: &AbHom, n: usize| -> Matrix {
        let cols: Vec<Vec<Int>> = (0..incl.source().ngens())
            .map(|j| solver.solve(&hom.apply(&incl.matrix().column(j))).expect("structure maps preserve cycles"))
            .collect();
        Matrix::from_columns(n, &cols)
    };
    let tr = lift(&tsolve, m.tr(), bincl, top.ngens());
    let res = lift(&bsolve, m.res(), tincl, bottom.ngens());
    let weyl = lift(&bsolve, m.weyl(), bincl, bottom.ngens());
    MackeyFunctor::new(m.prime(), top.clone(), bottom.clone(), tr, res, weyl)
}

/// Cokernel of a Mackey map, presented on the target generators.
pub fn cokernel(f: &MackeyMap) -> Result<MackeyFunctor, MackeyError> {
    let (top, _) = hom_cokernel(f.f_top());
    let (bottom, _) = hom_cokernel(f.f_bot());
    let t = f.target();
    MackeyFunctor::new(
        t.prime(),
        top,
        bottom,
        t.tr().matrix().clone(),
        t.res().matrix().clone(),
        t.weyl().matrix().clone(),
    )
}

/// Acts on m by the Burnside element y·[C_p/C_p] + z·[C_p/e].
pub fn burnside_scalar(m: &MackeyFunctor, y: &Int, z: &Int) -> MackeyMap {
    let nt = m.top().ngens();
    let trres = m.tr().matrix().mul(m.res().matrix());
    let top = Matrix::scalar(nt, y).add(&trres.scale(z));
    let bot_scalar = y + z * Int::from(m.prime());
    let bot = Matrix::scalar(m.bottom().ngens(), &bot_scalar);
    MackeyMap::new_unchecked(m, m, top, bot)
}

/// Direct sum with block-diagonal structure maps; returns offsets of each summand's generators.
pub fn direct_sum(parts: &[MackeyFunctor], p: u32) -> (MackeyFunctor, Vec<(usize, usize)>) {
    let tops: Vec<FGAb> = parts.iter().map(|m| m.top().clone()).collect();
    let bots: Vec<FGAb> = parts.iter().map(|m| m.bottom().clone()).collect();
    let (top, _, _) = crate::exactlin::direct_sum(&tops);
    let (bottom, _, _) = crate::exactlin::direct_sum(&bots);
    let mut tr = Matrix::zeros(top.ngens(), bottom.ngens());
    let mut res = Matrix::zeros(bottom.ngens(), top.ngens());
    let mut weyl = Matrix::zeros(bottom.ngens(), bottom.ngens());
    let mut offsets = Vec::with_capacity(parts.len());
    let (mut ot, mut ob) = (0, 0);
    for m in parts {
        offsets.push((ot, ob));
        let (nt, nb) = (m.top().ngens(), m.bottom().ngens());
        for i in 0..nt {
            for j in 0..nb {
                tr.set(ot + i, ob + j, m.tr().matrix().get(i, j).clone());
                res.set(ob + j, ot + i, m.res().matrix().get(j, i).clone());
            }
        }
        for i in 0..nb {
            for j in 0..nb {
                weyl.set(ob + i, ob + j, m.weyl().matrix().get(i, j).clone());
            }
        }
        ot += nt;
        ob += nb;
    }
    let tr = AbHom::new_unchecked(bottom.clone(), top.clone(), tr);
    let res = AbHom::new_unchecked(top, bottom.clone(), res);
    let weyl = AbHom::new_unchecked(bottom.clone(), bottom, weyl);
    (MackeyFunctor::from_homs(p, tr, res, weyl), offsets)
}
