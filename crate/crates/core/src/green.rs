//! Green functors, modules over them, ideals, and Mackey fields.

use std::fmt;

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::boxtensor::{
    relative_flat_box, tree_map, unitor, Balancing, BoxError, Factor, FlatBox, Pairing, DEFAULT_GENERATOR_LIMIT,
};
use crate::exactlin::{AbHom, FGAb, Int, Matrix, MembershipSolver};
use crate::mackey::{
    burnside, enumerate_subfunctors, j_bottom, validate_mackey, Check, MackeyError, MackeyFunctor, MackeyMap,
    Subfunctor, ENUMERATION_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GreenError {
    #[error("level {0} is infinite")]
    InfiniteGroup(&'static str),
    #[error("Green functor is not commutative")]
    NotCommutative,
    #[error("Green functor is zero")]
    ZeroFunctor,
    #[error("not a valid Green functor: {0}")]
    Invalid(String),
    #[error("not a module: {0}")]
    NotAModule(String),
    #[error("not an algebra: {0}")]
    NotAnAlgebra(String),
    #[error("unclassifiable field shape: {0}")]
    UnclassifiableShape(String),
    #[error("group too large to enumerate")]
    TooLarge,
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error(transparent)]
    Mackey(#[from] MackeyError),
}

/// A Green functor: a Mackey functor with a unit and an associative multiplication.
#[derive(Clone)]
pub struct GreenFunctor {
    underlying: MackeyFunctor,
    unit_top: Vec<Int>,
    mult: Pairing,
}

impl fmt::Debug for GreenFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Green({:?})", self.underlying)
    }
}

impl GreenFunctor {
    /// `unit_top` is the image of [C_p/C_p]; mult is given on generator pairs.
    pub fn new(underlying: MackeyFunctor, unit_top: Vec<Int>, mult_top: Matrix, mult_bot: Matrix) -> Result<Self, GreenError> {
        if unit_top.len() != underlying.top().ngens() {
            return Err(GreenError::Invalid("unit has wrong length".into()));
        }
        let mult = Pairing::new(&underlying, &underlying, &underlying, mult_top, mult_bot)?;
        Ok(GreenFunctor { underlying, unit_top, mult })
    }

    /// Builds from a unit map A → M (its first top column is the unit).
    pub fn from_unit_map(underlying: MackeyFunctor, unit: &MackeyMap, mult_top: Matrix, mult_bot: Matrix) -> Result<Self, GreenError> {
        let expected = Self::new(underlying, unit.f_top().matrix().column(0), mult_top, mult_bot)?;
        if !expected.unit_map().equals(unit) {
            return Err(GreenError::Invalid("unit map is not determined by the image of 1".into()));
        }
        Ok(expected)
    }

    pub fn underlying(&self) -> &MackeyFunctor {
        &self.underlying
    }
    pub fn prime(&self) -> u32 {
        self.underlying.prime()
    }
    pub fn mult(&self) -> &Pairing {
        &self.mult
    }
    pub fn unit_top(&self) -> &[Int] {
        &self.unit_top
    }

    pub fn unit_bot(&self) -> Vec<Int> {
        self.underlying.res().apply(&self.unit_top)
    }

    /// The unit η: A → M.
    pub fn unit_map(&self) -> MackeyMap {
        let a = burnside(self.prime()).expect("prime already checked");
        let m = &self.underlying;
        let ub = self.unit_bot();
        let t = m.tr().apply(&ub);
        let top = Matrix::from_columns(m.top().ngens(), &[self.unit_top.clone(), t]);
        let bot = Matrix::from_columns(m.bottom().ngens(), &[ub]);
        MackeyMap::new_unchecked(&a, m, top, bot)
    }

    pub fn unit_factor(&self) -> Factor {
        Factor::unit(&self.underlying, self.unit_top.clone())
    }

    pub fn mul_top(&self, a: &[Int], b: &[Int]) -> Vec<Int> {
        self.mult.apply_top(a, b)
    }

    pub fn mul_bot(&self, x: &[Int], y: &[Int]) -> Vec<Int> {
        self.mult.apply_bot(x, y)
    }

    pub fn is_zero(&self) -> bool {
        self.underlying.is_zero()
    }

    pub fn is_commutative(&self) -> bool {
        commutativity_check(self).map(|c| c.passed).unwrap_or(false)
    }

    /// Right and left actions of R on this functor through a ring map φ: R → self.
    pub fn actions_through(&self, phi: &RingMap) -> Result<(Pairing, Pairing), GreenError> {
        let r = phi.map.source();
        let m = &self.underlying;
        let (rt, rb) = (r.top().ngens(), r.bottom().ngens());
        let (mt, mb) = (m.top().ngens(), m.bottom().ngens());
        let pt = phi.map.f_top().matrix();
        let pb = phi.map.f_bot().matrix();
        let mut right_top = Matrix::zeros(mt, mt * rt);
        let mut left_top = Matrix::zeros(mt, rt * mt);
        for i in 0..mt {
            let a = unit(mt, i);
            for j in 0..rt {
                let b = pt.column(j);
                set_col(&mut right_top, i * rt + j, &self.mul_top(&a, &b));
                set_col(&mut left_top, j * mt + i, &self.mul_top(&b, &a));
            }
        }
        let mut right_bot = Matrix::zeros(mb, mb * rb);
        let mut left_bot = Matrix::zeros(mb, rb * mb);
        for i in 0..mb {
            let x = unit(mb, i);
            for j in 0..rb {
                let y = pb.column(j);
                set_col(&mut right_bot, i * rb + j, &self.mul_bot(&x, &y));
                set_col(&mut left_bot, j * mb + i, &self.mul_bot(&y, &x));
            }
        }
        let right = Pairing::new(m, r, m, right_top, right_bot)?;
        let left = Pairing::new(r, m, m, left_top, left_bot)?;
        Ok((right, left))
    }
}

fn unit(n: usize, i: usize) -> Vec<Int> {
    let mut v = vec![Int::zero(); n];
    v[i] = Int::one();
    v
}

fn set_col(m: &mut Matrix, j: usize, v: &[Int]) {
    for (i, x) in v.iter().enumerate() {
        m.set(i, j, x.clone());
    }
}

/// A map of Green functors (a Mackey map preserving unit and product).
#[derive(Clone, Debug)]
pub struct RingMap {
    pub map: MackeyMap,
}

/// Result of [`validate_green`].
#[derive(Clone, Debug, Serialize)]
pub struct GreenReport {
    pub checks: Vec<Check>,
    pub commutative: bool,
}

impl GreenReport {
    /// All checks except commutativity passed.
    pub fn valid(&self) -> bool {
        self.checks.iter().filter(|c| c.name != "commutativity").all(|c| c.passed)
    }
}

fn map_check(name: &'static str, a: &MackeyMap, b: &MackeyMap) -> Check {
    let w = a.first_difference(b);
    Check { name, passed: w.is_none(), witness: w.map(|(_, g)| g) }
}

fn commutativity_check(g: &GreenFunctor) -> Result<Check, GreenError> {
    let m = g.underlying();
    let b = FlatBox::new(g.prime(), &[m.clone(), m.clone()], DEFAULT_GENERATOR_LIMIT)?;
    let ab = tree_map(&b, &Factor::slot(0).times(Factor::slot(1), g.mult()))?;
    let ba = tree_map(&b, &Factor::slot(1).times(Factor::slot(0), g.mult()))?;
    Ok(map_check("commutativity", &ab, &ba))
}

/// Checks Mackey axioms, pairing conditions, associativity, unitality and commutativity.
pub fn validate_green(g: &GreenFunctor) -> Result<GreenReport, GreenError> {
    let m = g.underlying();
    let p = g.prime();
    let mut checks = Vec::new();
    let mr = validate_mackey(m);
    checks.push(Check { name: "mackey axioms", passed: mr.all_passed(), witness: None });
    for c in g.mult().conditions() {
        checks.push(c);
    }
    if !checks.iter().all(|c| c.passed) {
        return Ok(GreenReport { checks, commutative: false });
    }
    let b3 = FlatBox::new(p, &[m.clone(), m.clone(), m.clone()], DEFAULT_GENERATOR_LIMIT)?;
    let left = Factor::slot(0).times(Factor::slot(1), g.mult()).times(Factor::slot(2), g.mult());
    let right = Factor::slot(0).times(Factor::slot(1).times(Factor::slot(2), g.mult()), g.mult());
    checks.push(map_check("associativity", &tree_map(&b3, &left)?, &tree_map(&b3, &right)?));
    let a = burnside(p)?;
    let eta = g.unit_map();
    let al = FlatBox::new(p, &[a.clone(), m.clone()], DEFAULT_GENERATOR_LIMIT)?;
    let lu = tree_map(&al, &Factor::slot(0).mapped(&eta).times(Factor::slot(1), g.mult()))?;
    checks.push(map_check("left unit", &lu, &unitor(m)?));
    let ar = FlatBox::new(p, &[m.clone(), a], DEFAULT_GENERATOR_LIMIT)?;
    let ru = tree_map(&ar, &Factor::slot(0).times(Factor::slot(1).mapped(&eta), g.mult()))?;
    checks.push(map_check("right unit", &ru, &crate::boxtensor::right_unitor(m)?));
    let comm = commutativity_check(g)?;
    let commutative = comm.passed;
    checks.push(comm);
    Ok(GreenReport { checks, commutative })
}

/// Which side an action or ideal is on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
    TwoSided,
}

/// A module over a Green functor; a left module acts by R × M → M, a right one by M × R → M.
#[derive(Clone, Debug)]
pub struct GreenModule {
    pub ring: GreenFunctor,
    pub carrier: MackeyFunctor,
    pub action: Pairing,
    pub side: Side,
}

impl GreenModule {
    pub fn new(ring: &GreenFunctor, carrier: &MackeyFunctor, action: Pairing, side: Side) -> Result<Self, GreenError> {
        let m = GreenModule { ring: ring.clone(), carrier: carrier.clone(), action, side };
        m.validate()?;
        Ok(m)
    }

    /// R acting on itself by multiplication.
    pub fn regular(ring: &GreenFunctor, side: Side) -> GreenModule {
        GreenModule { ring: ring.clone(), carrier: ring.underlying().clone(), action: ring.mult().clone(), side }
    }

    pub fn validate(&self) -> Result<(), GreenError> {
        if self.side == Side::TwoSided {
            return Err(GreenError::NotAModule("a module action must be left or right".into()));
        }
        self.action.check().map_err(|e| GreenError::NotAModule(e.to_string()))?;
        let r = &self.ring;
        let (rt, rb) = (r.underlying().top().ngens(), r.underlying().bottom().ngens());
        let (mt, mb) = (self.carrier.top().ngens(), self.carrier.bottom().ngens());
        let act_t = |a: &[Int], x: &[Int]| match self.side {
            Side::Left => self.action.apply_top(a, x),
            _ => self.action.apply_top(x, a),
        };
        let act_b = |a: &[Int], x: &[Int]| match self.side {
            Side::Left => self.action.apply_bot(a, x),
            _ => self.action.apply_bot(x, a),
        };
        let top = self.carrier.top();
        let bot = self.carrier.bottom();
        let ub = r.unit_bot();
        for i in 0..mt {
            let x = unit(mt, i);
            if !top.elems_equal(&act_t(r.unit_top(), &x), &x) {
                return Err(GreenError::NotAModule(format!("unit does not act as identity on top generator {i}")));
            }
        }
        for i in 0..mb {
            let x = unit(mb, i);
            if !bot.elems_equal(&act_b(&ub, &x), &x) {
                return Err(GreenError::NotAModule(format!("unit does not act as identity on bottom generator {i}")));
            }
        }
        // (ab)x = a(bx) for a left module, x(ab) = (xa)b for a right one
        for a in 0..rt {
            for b in 0..rt {
                let (ea, eb) = (unit(rt, a), unit(rt, b));
                for i in 0..mt {
                    let x = unit(mt, i);
                    let (lhs, rhs) = match self.side {
                        Side::Left => (act_t(&r.mul_top(&ea, &eb), &x), act_t(&ea, &act_t(&eb, &x))),
                        _ => (act_t(&r.mul_top(&ea, &eb), &x), act_t(&eb, &act_t(&ea, &x))),
                    };
                    if !top.elems_equal(&lhs, &rhs) {
                        return Err(GreenError::NotAModule(format!("associativity fails at top ({a}, {b}, {i})")));
                    }
                }
            }
        }
        for a in 0..rb {
            for b in 0..rb {
                let (ea, eb) = (unit(rb, a), unit(rb, b));
                for i in 0..mb {
                    let x = unit(mb, i);
                    let (lhs, rhs) = match self.side {
                        Side::Left => (act_b(&r.mul_bot(&ea, &eb), &x), act_b(&ea, &act_b(&eb, &x))),
                        _ => (act_b(&r.mul_bot(&ea, &eb), &x), act_b(&eb, &act_b(&ea, &x))),
                    };
                    if !bot.elems_equal(&lhs, &rhs) {
                        return Err(GreenError::NotAModule(format!("associativity fails at bottom ({a}, {b}, {i})")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A left module with the action precomposed with weyl^t on the ring factor.
#[derive(Clone, Debug)]
pub struct TwistedModule {
    pub base: GreenModule,
    pub twist: u32,
    pub module: GreenModule,
}

impl TwistedModule {
    pub fn new(base: &GreenModule, twist: u32) -> Result<Self, GreenError> {
        if base.side != Side::Left {
            return Err(GreenError::NotAModule("twisting applies to left modules".into()));
        }
        let r = base.ring.underlying();
        let w = r.weyl_power(twist);
        let mb = base.carrier.bottom().ngens();
        let shift = Matrix::kron(&w, &Matrix::identity(mb));
        let bot = base.action.bot_matrix().mul(&shift);
        let action = Pairing::new(r, &base.carrier, &base.carrier, base.action.top_matrix().clone(), bot)?;
        let module = GreenModule::new(&base.ring, &base.carrier, action, Side::Left)?;
        Ok(TwistedModule { base: base.clone(), twist, module })
    }
}

/// The box of a right and a left R-module, balanced over R, with the projection from the absolute box.
pub fn relative_box(m: &GreenModule, n: &GreenModule) -> Result<(FlatBox, MackeyMap), GreenError> {
    if m.side != Side::Right || n.side != Side::Left {
        return Err(GreenError::NotAModule("expected a right module and a left module".into()));
    }
    m.validate()?;
    n.validate()?;
    let bal = Balancing { ring: m.ring.underlying().clone(), right: vec![m.action.clone()], left: vec![n.action.clone()], wrap: None };
    Ok(relative_flat_box(m.ring.prime(), &[m.carrier.clone(), n.carrier.clone()], &bal, DEFAULT_GENERATOR_LIMIT)?)
}

/// Verdict of [`is_ideal`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdealVerdict {
    pub is_ideal: bool,
    pub witness: Option<String>,
}

fn in_subfunctor(g: &FGAb, elems: &std::collections::BTreeSet<Vec<u64>>, v: &[Int]) -> bool {
    let c: Vec<u64> = g.reduce(v).iter().map(|x| x.to_u64().unwrap()).collect();
    elems.contains(&c)
}

/// Whether a subfunctor is closed under multiplication by the ring on the given side.
pub fn is_ideal(g: &GreenFunctor, s: &Subfunctor, side: Side) -> IdealVerdict {
    let m = g.underlying();
    let inc = &s.inclusion;
    let (nt, nb) = (m.top().ngens(), m.bottom().ngens());
    let st: Vec<Vec<Int>> = inc.f_top().matrix().columns();
    let sb: Vec<Vec<Int>> = inc.f_bot().matrix().columns();
    let left = matches!(side, Side::Left | Side::TwoSided);
    let right = matches!(side, Side::Right | Side::TwoSided);
    for a in 0..nt {
        let ea = unit(nt, a);
        for (j, x) in st.iter().enumerate() {
            if left && !in_subfunctor(m.top(), &s.top_elements, &g.mul_top(&ea, x)) {
                return IdealVerdict { is_ideal: false, witness: Some(format!("top: generator {a} times sub-generator {j}")) };
            }
            if right && !in_subfunctor(m.top(), &s.top_elements, &g.mul_top(x, &ea)) {
                return IdealVerdict { is_ideal: false, witness: Some(format!("top: sub-generator {j} times generator {a}")) };
            }
        }
    }
    for a in 0..nb {
        let ea = unit(nb, a);
        for (j, x) in sb.iter().enumerate() {
            if left && !in_subfunctor(m.bottom(), &s.bottom_elements, &g.mul_bot(&ea, x)) {
                return IdealVerdict { is_ideal: false, witness: Some(format!("bottom: generator {a} times sub-generator {j}")) };
            }
            if right && !in_subfunctor(m.bottom(), &s.bottom_elements, &g.mul_bot(x, &ea)) {
                return IdealVerdict { is_ideal: false, witness: Some(format!("bottom: sub-generator {j} times generator {a}")) };
            }
        }
    }
    IdealVerdict { is_ideal: true, witness: None }
}

/// Verdict of [`is_mackey_field`].
#[derive(Clone, Debug)]
pub enum FieldVerdict {
    Field,
    NotField(Subfunctor),
}

impl FieldVerdict {
    pub fn is_field(&self) -> bool {
        matches!(self, FieldVerdict::Field)
    }
}

fn require_finite(m: &MackeyFunctor) -> Result<(), GreenError> {
    if !m.top().is_finite() {
        return Err(GreenError::InfiniteGroup("top"));
    }
    if !m.bottom().is_finite() {
        return Err(GreenError::InfiniteGroup("bottom"));
    }
    Ok(())
}

fn is_full(m: &MackeyFunctor, s: &Subfunctor) -> bool {
    Some(s.top_order() as u64) == m.top().order_u64() && Some(s.bottom_order() as u64) == m.bottom().order_u64()
}

/// Brute force over all subfunctors: a field has no ideal other than 0 and itself.
pub fn is_mackey_field(g: &GreenFunctor) -> Result<FieldVerdict, GreenError> {
    let m = g.underlying();
    require_finite(m)?;
    if g.is_zero() {
        return Err(GreenError::ZeroFunctor);
    }
    let report = validate_green(g)?;
    if !report.valid() {
        return Err(GreenError::Invalid("Green functor axioms fail".into()));
    }
    if !report.commutative {
        return Err(GreenError::NotCommutative);
    }
    for s in enumerate_subfunctors(m).map_err(|e| match e {
        MackeyError::TooLarge(_) => GreenError::TooLarge,
        e => GreenError::Mackey(e),
    })? {
        if s.is_zero() || is_full(m, &s) {
            continue;
        }
        if is_ideal(g, &s, Side::TwoSided).is_ideal {
            return Ok(FieldVerdict::NotField(s));
        }
    }
    Ok(FieldVerdict::Field)
}

/// Whether the top-level ring is a field, by enumeration.
pub fn top_level_is_field(g: &GreenFunctor) -> Result<bool, GreenError> {
    let top = g.underlying().top();
    if !top.is_finite() {
        return Err(GreenError::InfiniteGroup("top"));
    }
    let elems = top.enumerate_canonical(ENUMERATION_LIMIT).ok_or(GreenError::TooLarge)?;
    if elems.len() < 2 {
        return Ok(false);
    }
    let lift = |e: &Vec<u64>| top.lift(&e.iter().map(|&v| Int::from(v)).collect::<Vec<_>>());
    let lifted: Vec<Vec<Int>> = elems.iter().map(lift).collect();
    let one = top.reduce(g.unit_top());
    for x in lifted.iter().skip(1) {
        let mut invertible = false;
        for y in lifted.iter().skip(1) {
            let xy = g.mul_top(x, y);
            if top.is_zero_elem(&xy) {
                return Ok(false);
            }
            if top.reduce(&xy) == one {
                invertible = true;
            }
        }
        if !invertible {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The two normal forms of a Mackey field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FieldShape {
    /// Bottom level zero; top level a field with `order` elements.
    ConcentratedAtTop { order: u64 },
    /// Top level the fixed points of a ring with C_p-action, res the inclusion, tr the norm.
    FixedPointShape { ring_order: u64, fixed_order: u64, action_trivial: bool },
}

/// A Green functor together with its verified field shape.
#[derive(Clone, Debug)]
pub struct ClassifiedField {
    pub green: GreenFunctor,
    pub shape: FieldShape,
}

fn fixed_subgroup_order(m: &MackeyFunctor) -> Result<u64, GreenError> {
    let b = m.bottom();
    let diff = m.weyl().sub(&AbHom::identity(b));
    let (k, _) = crate::exactlin::hom_kernel(&diff).map_err(MackeyError::from)?;
    k.order_u64().ok_or(GreenError::InfiniteGroup("bottom"))
}

/// Matches a detected field against the two normal forms.
pub fn classify_field_shape(g: &GreenFunctor) -> Result<ClassifiedField, GreenError> {
    match is_mackey_field(g)? {
        FieldVerdict::Field => {}
        FieldVerdict::NotField(_) => return Err(GreenError::UnclassifiableShape("not a Mackey field".into())),
    }
    let m = g.underlying();
    if m.bottom().is_trivial() {
        if !top_level_is_field(g)? {
            return Err(GreenError::UnclassifiableShape("bottom is zero but top is not a field".into()));
        }
        let order = m.top().order_u64().ok_or(GreenError::InfiniteGroup("top"))?;
        return Ok(ClassifiedField { green: g.clone(), shape: FieldShape::ConcentratedAtTop { order } });
    }
    if !m.res().is_injective() {
        return Err(GreenError::UnclassifiableShape("res is not injective".into()));
    }
    let fixed = fixed_subgroup_order(m)?;
    let top = m.top().order_u64().ok_or(GreenError::InfiniteGroup("top"))?;
    if top != fixed {
        return Err(GreenError::UnclassifiableShape("res is not onto the fixed points".into()));
    }
    if m.tr().is_zero_map() {
        return Err(GreenError::UnclassifiableShape("transfer vanishes".into()));
    }
    let ring_order = m.bottom().order_u64().ok_or(GreenError::InfiniteGroup("bottom"))?;
    let action_trivial = m.weyl().equals(&AbHom::identity(m.bottom()));
    Ok(ClassifiedField {
        green: g.clone(),
        shape: FieldShape::FixedPointShape { ring_order, fixed_order: fixed, action_trivial },
    })
}

/// The Burnside Green functor with [C_p/e]·[C_p/e] = p[C_p/e].
pub fn burnside_green(p: u32) -> Result<GreenFunctor, GreenError> {
    let a = burnside(p)?;
    let mt = Matrix::from_i64(2, 4, &[1, 0, 0, 0, 0, 1, 1, p as i64]);
    GreenFunctor::new(a, vec![Int::one(), Int::zero()], mt, Matrix::identity(1))
}

/// Constant Green functor on ℤ or ℤ/n.
pub fn constant_green(p: u32, n: u64) -> Result<GreenFunctor, GreenError> {
    let m = crate::mackey::constant(p, n)?;
    GreenFunctor::new(m, vec![Int::one()], Matrix::identity(1), Matrix::identity(1))
}

/// j_top(p, ℤ/q) with ring structure ℤ/q.
pub fn concentrated_green(p: u32, q: u64) -> Result<GreenFunctor, GreenError> {
    let m = crate::mackey::j_top(p, &FGAb::cyclic(q))?;
    GreenFunctor::new(m, vec![Int::one()], Matrix::identity(1), Matrix::zeros(0, 0))
}

/// The fixed-point Green functor of a ring V with action γ (ring structure given at the bottom).
pub fn fixed_point_green(p: u32, v: &FGAb, gamma: &Matrix, mult_bot: Matrix, unit_bot: Vec<Int>) -> Result<GreenFunctor, GreenError> {
    let m = j_bottom(p, v, gamma)?;
    let res = m.res().matrix().clone();
    let solver = MembershipSolver::new(m.bottom(), &res);
    let nt = m.top().ngens();
    let bot_mult = Pairing::new(&m, &m, &m, Matrix::zeros(nt, nt * nt), mult_bot.clone())?;
    let pre = |x: &[Int]| solver.solve(x).ok_or_else(|| GreenError::Invalid("product of fixed elements is not fixed".into()));
    let unit_top = pre(&unit_bot)?;
    let mut mult_top = Matrix::zeros(nt, nt * nt);
    for i in 0..nt {
        for j in 0..nt {
            let prod = bot_mult.apply_bot(&res.column(i), &res.column(j));
            set_col(&mut mult_top, i * nt + j, &pre(&prod)?);
        }
    }
    GreenFunctor::new(m, unit_top, mult_top, mult_bot)
}

/// 𝔽₄ = 𝔽₂[ω]/(ω² + ω + 1) on the basis {1, ω}, with Frobenius ω ↦ ω + 1, over C₂.
pub fn f4_frobenius() -> Result<GreenFunctor, GreenError> {
    let v = FGAb::product_of_cyclics(&[2, 2]);
    let gamma = Matrix::from_i64(2, 2, &[1, 1, 0, 1]);
    // columns (1,1) (1,ω) (ω,1) (ω,ω)
    let mult = Matrix::from_i64(2, 4, &[1, 0, 0, 1, 0, 1, 1, 1]);
    fixed_point_green(2, &v, &gamma, mult, vec![Int::one(), Int::zero()])
}

/// 𝔽₈ = 𝔽₂[x]/(x³ + x + 1) on the basis {1, x, x²}, with Frobenius over C₃.
pub fn f8_frobenius() -> Result<GreenFunctor, GreenError> {
    let v = FGAb::product_of_cyclics(&[2, 2, 2]);
    // x ↦ x², x² ↦ x⁴ = x² + x
    let gamma = Matrix::from_i64(3, 3, &[1, 0, 0, 0, 0, 1, 0, 1, 1]);
    let basis_product = |i: usize, j: usize| -> [i64; 3] {
        match i + j {
            0 => [1, 0, 0],
            1 => [0, 1, 0],
            2 => [0, 0, 1],
            3 => [1, 1, 0],
            _ => [0, 1, 1],
        }
    };
    let mut entries = vec![0i64; 27];
    for i in 0..3 {
        for j in 0..3 {
            let c = basis_product(i, j);
            for r in 0..3 {
                entries[r * 9 + i * 3 + j] = c[r];
            }
        }
    }
    fixed_point_green(3, &v, &gamma, Matrix::from_i64(3, 9, &entries), vec![Int::one(), Int::zero(), Int::zero()])
}

/// Smallest subfunctor-ideal containing a top element: used for infinite levels where enumeration is impossible.
pub fn principal_ideal(g: &GreenFunctor, x: &[Int]) -> (Matrix, Matrix) {
    let m = g.underlying();
    let (nt, nb) = (m.top().ngens(), m.bottom().ngens());
    let rx = m.res().apply(x);
    let mut bot_cols = Vec::new();
    for b in 0..nb {
        let eb = unit(nb, b);
        let y = g.mul_bot(&eb, &rx);
        let mut w = y.clone();
        for _ in 0..g.prime() {
            bot_cols.push(w.clone());
            w = m.weyl().apply(&w);
        }
    }
    let mut top_cols = Vec::new();
    for a in 0..nt {
        top_cols.push(g.mul_top(&unit(nt, a), x));
    }
    for y in &bot_cols {
        top_cols.push(m.tr().apply(y));
    }
    (Matrix::from_columns(nt, &top_cols), Matrix::from_columns(nb, &bot_cols))
}

/// Whether a subgroup (given by generating columns) contains the unit.
pub fn contains_unit(g: &GreenFunctor, top_gens: &Matrix) -> bool {
    MembershipSolver::new(g.underlying().top(), top_gens).solve(g.unit_top()).is_some()
}
