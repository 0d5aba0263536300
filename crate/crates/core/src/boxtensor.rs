//! Box products of C_p-Mackey functors.
//!
//! Everything is built on [`FlatBox`], the n-fold box product presented on
//! labelled generators: the top level has one generator per pure tuple of top
//! generators followed by one per transfer class of a bottom tuple; the bottom
//! level is the tensor product of the bottoms. Maps between flat boxes are
//! given on labels by [`Factor`] trees and validated against all relations.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::exactlin::{tensor, tensor_homs, AbHom, ExactError, FGAb, Int, Matrix};
use crate::mackey::{Check, MackeyError, MackeyFunctor, MackeyMap};

pub const DEFAULT_GENERATOR_LIMIT: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BoxError {
    #[error("primes differ: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("presentation needs {needed} generators, limit is {limit}")]
    SizeLimit { needed: usize, limit: usize },
    #[error("incompatible pairing: condition {condition} fails at generator {generator}")]
    IncompatiblePairing { condition: &'static str, generator: usize },
    #[error("not a module: {axiom}")]
    NotAModule { axiom: String },
    #[error("malformed slot map: {0}")]
    SlotMap(String),
    #[error(transparent)]
    Mackey(#[from] MackeyError),
}

impl From<ExactError> for BoxError {
    fn from(e: ExactError) -> Self {
        BoxError::Mackey(MackeyError::Exact(e))
    }
}

/// A bilinear pairing M × N → L given on generator pairs at each level.
///
/// `top` has L.top rows and one column per pair (i, j) at index i·|N.top| + j;
/// `bot` likewise on the bottoms.
#[derive(Clone, Debug)]
pub struct Pairing {
    left: MackeyFunctor,
    right: MackeyFunctor,
    out: MackeyFunctor,
    top: Matrix,
    bot: Matrix,
}

fn bilinear(m: &Matrix, nb: usize, a: &[Int], b: &[Int]) -> Vec<Int> {
    let mut out = vec![Int::zero(); m.nrows()];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let c = x * y;
            let col = i * nb + j;
            for (r, o) in out.iter_mut().enumerate() {
                let e = m.get(r, col);
                if !e.is_zero() {
                    *o += e * &c;
                }
            }
        }
    }
    out
}

impl Pairing {
    /// Checks shapes and that both levels are well defined on the tensor presentations.
    pub fn new(
        left: &MackeyFunctor,
        right: &MackeyFunctor,
        out: &MackeyFunctor,
        top: Matrix,
        bot: Matrix,
    ) -> Result<Self, BoxError> {
        let (tt, _) = tensor(left.top(), right.top());
        let (tb, _) = tensor(left.bottom(), right.bottom());
        AbHom::new(tt, out.top().clone(), top.clone())?;
        AbHom::new(tb, out.bottom().clone(), bot.clone())?;
        Ok(Pairing { left: left.clone(), right: right.clone(), out: out.clone(), top, bot })
    }

    pub fn left(&self) -> &MackeyFunctor {
        &self.left
    }
    pub fn right(&self) -> &MackeyFunctor {
        &self.right
    }
    pub fn out(&self) -> &MackeyFunctor {
        &self.out
    }
    pub fn top_matrix(&self) -> &Matrix {
        &self.top
    }
    pub fn bot_matrix(&self) -> &Matrix {
        &self.bot
    }

    pub fn apply_top(&self, a: &[Int], b: &[Int]) -> Vec<Int> {
        bilinear(&self.top, self.right.top().ngens(), a, b)
    }

    pub fn apply_bot(&self, x: &[Int], y: &[Int]) -> Vec<Int> {
        bilinear(&self.bot, self.right.bottom().ngens(), x, y)
    }

    fn f_top(&self) -> AbHom {
        let (tt, _) = tensor(self.left.top(), self.right.top());
        AbHom::new_unchecked(tt, self.out.top().clone(), self.top.clone())
    }

    fn f_bot(&self) -> AbHom {
        let (tb, _) = tensor(self.left.bottom(), self.right.bottom());
        AbHom::new_unchecked(tb, self.out.bottom().clone(), self.bot.clone())
    }

    /// The four compatibility conditions, each with a witness generator of the relevant tensor group.
    pub fn conditions(&self) -> Vec<Check> {
        let (l, r, o) = (&self.left, &self.right, &self.out);
        let ft = self.f_top();
        let fb = self.f_bot();
        let check = |name: &'static str, a: AbHom, b: AbHom| {
            let w = a.first_difference(&b);
            Check { name, passed: w.is_none(), witness: w }
        };
        let c1 = check("res∘f = f∘(res⊗res)", o.res().after(&ft), fb.after(&tensor_homs(l.res(), r.res())));
        let c2 = check(
            "f∘(tr⊗id) = tr∘f∘(id⊗res)",
            ft.after(&tensor_homs(l.tr(), &AbHom::identity(r.top()))),
            o.tr().after(&fb).after(&tensor_homs(&AbHom::identity(l.bottom()), r.res())),
        );
        let c3 = check(
            "f∘(id⊗tr) = tr∘f∘(res⊗id)",
            ft.after(&tensor_homs(&AbHom::identity(l.top()), r.tr())),
            o.tr().after(&fb).after(&tensor_homs(l.res(), &AbHom::identity(r.bottom()))),
        );
        let c4 = check(
            "f∘(γ⊗γ) = γ∘f",
            fb.after(&tensor_homs(l.weyl(), r.weyl())),
            o.weyl().after(&fb),
        );
        vec![c1, c2, c3, c4]
    }

    /// The pairing followed by a map out of its target.
    pub fn then(&self, f: &MackeyMap) -> Result<Pairing, BoxError> {
        Pairing::new(
            &self.left,
            &self.right,
            f.target(),
            f.f_top().matrix().mul(&self.top),
            f.f_bot().matrix().mul(&self.bot),
        )
    }

    pub fn check(&self) -> Result<(), BoxError> {
        for c in self.conditions() {
            if !c.passed {
                return Err(BoxError::IncompatiblePairing { condition: c.name, generator: c.witness.unwrap_or(0) });
            }
        }
        Ok(())
    }
}

/// Left action of the Burnside functor on m.
pub fn burnside_action(m: &MackeyFunctor) -> Result<Pairing, BoxError> {
    let a = crate::mackey::burnside(m.prime())?;
    let (nt, nb) = (m.top().ngens(), m.bottom().ngens());
    let trres = m.tr().matrix().mul(m.res().matrix());
    let mut top = Matrix::zeros(nt, 2 * nt);
    for j in 0..nt {
        for i in 0..nt {
            top.set(i, j, if i == j { Int::one() } else { Int::zero() });
            top.set(i, nt + j, trres.get(i, j).clone());
        }
    }
    let bot = Matrix::identity(nb);
    Pairing::new(&a, m, m, top, bot)
}

/// Right action of the Burnside functor on m.
pub fn burnside_right_action(m: &MackeyFunctor) -> Result<Pairing, BoxError> {
    let a = crate::mackey::burnside(m.prime())?;
    let (nt, nb) = (m.top().ngens(), m.bottom().ngens());
    let trres = m.tr().matrix().mul(m.res().matrix());
    let mut top = Matrix::zeros(nt, 2 * nt);
    for j in 0..nt {
        for i in 0..nt {
            top.set(i, 2 * j, if i == j { Int::one() } else { Int::zero() });
            top.set(i, 2 * j + 1, trres.get(i, j).clone());
        }
    }
    let bot = Matrix::identity(nb);
    Pairing::new(m, &a, m, top, bot)
}

/// How an output slot of a slot map is computed from the source slots.
#[derive(Clone, Debug)]
pub enum Factor {
    /// Source slot `index`, acted on by weyl^twist at the bottom.
    Slot { index: usize, twist: u32 },
    /// The image of 1 under a unit map: `top` is the image of the top unit, the bottom image is res(top).
    Unit { functor: MackeyFunctor, top: Vec<Int> },
    Map(Box<Factor>, MackeyMap),
    Product(Box<Factor>, Box<Factor>, Pairing),
}

impl Factor {
    pub fn slot(index: usize) -> Factor {
        Factor::Slot { index, twist: 0 }
    }

    pub fn twisted(index: usize, twist: u32) -> Factor {
        Factor::Slot { index, twist }
    }

    pub fn unit(functor: &MackeyFunctor, top: Vec<Int>) -> Factor {
        Factor::Unit { functor: functor.clone(), top }
    }

    pub fn mapped(self, f: &MackeyMap) -> Factor {
        Factor::Map(Box::new(self), f.clone())
    }

    pub fn times(self, other: Factor, pairing: &Pairing) -> Factor {
        Factor::Product(Box::new(self), Box::new(other), pairing.clone())
    }

    fn collect_slots(&self, out: &mut Vec<usize>) {
        match self {
            Factor::Slot { index, .. } => out.push(*index),
            Factor::Unit { .. } => {}
            Factor::Map(f, _) => f.collect_slots(out),
            Factor::Product(a, b, _) => {
                a.collect_slots(out);
                b.collect_slots(out);
            }
        }
    }

    fn output(&self, src: &FlatBox) -> MackeyFunctor {
        match self {
            Factor::Slot { index, .. } => src.factors[*index].clone(),
            Factor::Unit { functor, .. } => functor.clone(),
            Factor::Map(_, f) => f.target().clone(),
            Factor::Product(_, _, p) => p.out.clone(),
        }
    }
}

struct Evaluator<'a> {
    src: &'a FlatBox,
    powers: HashMap<(usize, u32), Matrix>,
}

impl<'a> Evaluator<'a> {
    fn new(src: &'a FlatBox) -> Self {
        Evaluator { src, powers: HashMap::new() }
    }

    fn top(&mut self, f: &Factor, tuple: &[usize]) -> Vec<Int> {
        match f {
            Factor::Slot { index, .. } => unit_vec(self.src.tdims[*index], tuple[*index]),
            Factor::Unit { top, .. } => top.clone(),
            Factor::Map(inner, m) => {
                let v = self.top(inner, tuple);
                m.f_top().apply(&v)
            }
            Factor::Product(a, b, p) => {
                let x = self.top(a, tuple);
                let y = self.top(b, tuple);
                p.apply_top(&x, &y)
            }
        }
    }

    fn bot(&mut self, f: &Factor, tuple: &[usize]) -> Vec<Int> {
        match f {
            Factor::Slot { index, twist } => {
                let m = &self.src.factors[*index];
                let t = twist % m.prime();
                if t == 0 {
                    return unit_vec(self.src.bdims[*index], tuple[*index]);
                }
                let w = self.powers.entry((*index, t)).or_insert_with(|| m.weyl_power(t));
                w.column(tuple[*index])
            }
            Factor::Unit { functor, top } => functor.res().apply(top),
            Factor::Map(inner, m) => {
                let v = self.bot(inner, tuple);
                m.f_bot().apply(&v)
            }
            Factor::Product(a, b, p) => {
                let x = self.bot(a, tuple);
                let y = self.bot(b, tuple);
                p.apply_bot(&x, &y)
            }
        }
    }
}

fn unit_vec(n: usize, i: usize) -> Vec<Int> {
    let mut v = vec![Int::zero(); n];
    v[i] = Int::one();
    v
}

/// Multilinear expansion of per-slot vectors into mixed-radix tuple coordinates.
fn expand(dims: &[usize], vecs: &[Vec<Int>]) -> Vec<(usize, Int)> {
    let mut acc = vec![(0usize, Int::one())];
    for (d, v) in dims.iter().zip(vecs) {
        let mut next = Vec::new();
        for (i, c) in &acc {
            for (j, e) in v.iter().enumerate() {
                if !e.is_zero() {
                    next.push((i * d + j, c * e));
                }
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    acc
}

fn tuple_of(dims: &[usize], mut idx: usize) -> Vec<usize> {
    let mut t = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        t[k] = idx % dims[k];
        idx /= dims[k];
    }
    t
}

fn index_of(dims: &[usize], tuple: &[usize]) -> usize {
    tuple.iter().zip(dims).fold(0, |acc, (t, d)| acc * d + t)
}

fn count(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Tuples over `dims` with slot `skip` pinned to 0.
fn tuples_except(dims: &[usize], skip: usize) -> Vec<Vec<usize>> {
    let mut d = dims.to_vec();
    d[skip] = 1;
    (0..count(&d)).map(|i| tuple_of(&d, i)).collect()
}

/// Provenance of a top-level generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    /// Pure tensor of top-level generators, one per factor.
    Pure(Vec<usize>),
    /// Transfer class of a tensor of bottom-level generators.
    Transfer(Vec<usize>),
}

/// The box product of a list of Mackey functors with labelled generators.
#[derive(Clone, Debug)]
pub struct FlatBox {
    p: u32,
    factors: Vec<MackeyFunctor>,
    functor: MackeyFunctor,
    tdims: Vec<usize>,
    bdims: Vec<usize>,
    npure: usize,
    nbot: usize,
}

impl FlatBox {
    /// The box product of `factors` (the Burnside functor when empty).
    pub fn new(p: u32, factors: &[MackeyFunctor], limit: usize) -> Result<FlatBox, BoxError> {
        for m in factors {
            if m.prime() != p {
                return Err(BoxError::PrimeMismatch(p, m.prime()));
            }
        }
        let tdims: Vec<usize> = factors.iter().map(|m| m.top().ngens()).collect();
        let bdims: Vec<usize> = factors.iter().map(|m| m.bottom().ngens()).collect();
        let npure = tdims.iter().try_fold(1usize, |a, &d| a.checked_mul(d));
        let nbot = bdims.iter().try_fold(1usize, |a, &d| a.checked_mul(d));
        let (npure, nbot) = match (npure, nbot) {
            (Some(a), Some(b)) if a.saturating_add(b) <= limit => (a, b),
            (a, b) => {
                return Err(BoxError::SizeLimit {
                    needed: a.unwrap_or(usize::MAX).saturating_add(b.unwrap_or(usize::MAX)),
                    limit,
                })
            }
        };
        let n = factors.len();
        let ntop = npure + nbot;
        let bweyl = weyl_columns(factors, &bdims);

        let mut brel: Vec<Vec<Int>> = Vec::new();
        let mut trel: Vec<Vec<Int>> = Vec::new();
        for i in 0..n {
            let basis = factors[i].top().relation_basis();
            for others in tuples_except(&tdims, i) {
                for r in 0..basis.nrows() {
                    let mut row = vec![Int::zero(); ntop];
                    let mut t = others.clone();
                    for j in 0..tdims[i] {
                        let c = basis.get(r, j);
                        if !c.is_zero() {
                            t[i] = j;
                            row[index_of(&tdims, &t)] = c.clone();
                        }
                    }
                    trel.push(row);
                }
            }
            let basis = factors[i].bottom().relation_basis();
            for others in tuples_except(&bdims, i) {
                for r in 0..basis.nrows() {
                    let mut row = vec![Int::zero(); nbot];
                    let mut t = others.clone();
                    for j in 0..bdims[i] {
                        let c = basis.get(r, j);
                        if !c.is_zero() {
                            t[i] = j;
                            row[index_of(&bdims, &t)] = c.clone();
                        }
                    }
                    let mut top_row = vec![Int::zero(); npure];
                    top_row.extend(row.iter().cloned());
                    trel.push(top_row);
                    brel.push(row);
                }
            }
        }
        // transfer classes are coinvariants
        for (z, w) in bweyl.iter().enumerate() {
            let mut row = vec![Int::zero(); ntop];
            row[npure + z] += Int::one();
            for (idx, c) in w {
                row[npure + idx] -= c;
            }
            if row.iter().any(|x| !x.is_zero()) {
                trel.push(row);
            }
        }
        // Frobenius reciprocity in each slot
        for i in 0..n {
            let tr_i = factors[i].tr().matrix();
            for others in tuples_except(&tdims, i) {
                let res_vecs: Vec<Vec<Int>> =
                    (0..n).map(|k| if k == i { Vec::new() } else { factors[k].res().matrix().column(others[k]) }).collect();
                for x in 0..bdims[i] {
                    let mut row = vec![Int::zero(); ntop];
                    let pv: Vec<Vec<Int>> =
                        (0..n).map(|k| if k == i { tr_i.column(x) } else { unit_vec(tdims[k], others[k]) }).collect();
                    for (idx, c) in expand(&tdims, &pv) {
                        row[idx] += c;
                    }
                    let mut bv = res_vecs.clone();
                    bv[i] = unit_vec(bdims[i], x);
                    for (idx, c) in expand(&bdims, &bv) {
                        row[npure + idx] -= c;
                    }
                    if row.iter().any(|x| !x.is_zero()) {
                        trel.push(row);
                    }
                }
            }
        }

        let top = FGAb::new(ntop, Matrix::from_rows(trel, ntop));
        let bottom = FGAb::new(nbot, Matrix::from_rows(brel, nbot));

        let mut tr = Matrix::zeros(ntop, nbot);
        for z in 0..nbot {
            tr.set(npure + z, z, Int::one());
        }
        let mut weyl = Matrix::zeros(nbot, nbot);
        for (z, w) in bweyl.iter().enumerate() {
            for (idx, c) in w {
                weyl.set(*idx, z, c.clone());
            }
        }
        let mut res = Matrix::zeros(nbot, ntop);
        for a in 0..npure {
            let t = tuple_of(&tdims, a);
            let vecs: Vec<Vec<Int>> = (0..n).map(|k| factors[k].res().matrix().column(t[k])).collect();
            for (idx, c) in expand(&bdims, &vecs) {
                res.set(idx, a, c);
            }
        }
        for z in 0..nbot {
            let mut w = unit_vec(nbot, z);
            let mut acc = vec![Int::zero(); nbot];
            for _ in 0..p {
                for (a, b) in acc.iter_mut().zip(&w) {
                    *a += b;
                }
                w = weyl.mul_vec(&w);
            }
            for (idx, c) in acc.into_iter().enumerate() {
                if !c.is_zero() {
                    res.set(idx, npure + z, c);
                }
            }
        }
        let functor = MackeyFunctor::new(p, top, bottom, tr, res, weyl)?;
        Ok(FlatBox { p, factors: factors.to_vec(), functor, tdims, bdims, npure, nbot })
    }

    /// Same labels with extra relations on each level.
    pub fn with_relations(&self, top: &Matrix, bottom: &Matrix) -> Result<FlatBox, BoxError> {
        let functor = self.functor.quotient(top, bottom)?;
        Ok(FlatBox { functor, ..self.clone() })
    }

    pub fn prime(&self) -> u32 {
        self.p
    }
    pub fn functor(&self) -> &MackeyFunctor {
        &self.functor
    }
    pub fn factors(&self) -> &[MackeyFunctor] {
        &self.factors
    }
    pub fn arity(&self) -> usize {
        self.factors.len()
    }
    pub fn pure_count(&self) -> usize {
        self.npure
    }
    pub fn transfer_count(&self) -> usize {
        self.nbot
    }

    pub fn top_label(&self, i: usize) -> Label {
        if i < self.npure {
            Label::Pure(tuple_of(&self.tdims, i))
        } else {
            Label::Transfer(tuple_of(&self.bdims, i - self.npure))
        }
    }

    pub fn bottom_label(&self, i: usize) -> Vec<usize> {
        tuple_of(&self.bdims, i)
    }

    pub fn pure_index(&self, tuple: &[usize]) -> usize {
        index_of(&self.tdims, tuple)
    }

    pub fn transfer_index(&self, tuple: &[usize]) -> usize {
        self.npure + index_of(&self.bdims, tuple)
    }

    pub fn bottom_index(&self, tuple: &[usize]) -> usize {
        index_of(&self.bdims, tuple)
    }

    /// Top element from per-factor top vectors (a pure tensor).
    pub fn pure_element(&self, vecs: &[Vec<Int>]) -> Vec<Int> {
        let mut out = vec![Int::zero(); self.npure + self.nbot];
        for (idx, c) in expand(&self.tdims, vecs) {
            out[idx] += c;
        }
        out
    }

    /// Transfer of the tensor of per-factor bottom vectors.
    pub fn transfer_element(&self, vecs: &[Vec<Int>]) -> Vec<Int> {
        let mut out = vec![Int::zero(); self.npure + self.nbot];
        for (idx, c) in expand(&self.bdims, vecs) {
            out[self.npure + idx] += c;
        }
        out
    }

    pub fn bottom_element(&self, vecs: &[Vec<Int>]) -> Vec<Int> {
        let mut out = vec![Int::zero(); self.nbot];
        for (idx, c) in expand(&self.bdims, vecs) {
            out[idx] += c;
        }
        out
    }
}

fn weyl_columns(factors: &[MackeyFunctor], bdims: &[usize]) -> Vec<Vec<(usize, Int)>> {
    let nbot = count(bdims);
    (0..nbot)
        .map(|z| {
            let t = tuple_of(bdims, z);
            let vecs: Vec<Vec<Int>> = factors.iter().zip(&t).map(|(m, &j)| m.weyl().matrix().column(j)).collect();
            expand(bdims, &vecs)
        })
        .collect()
}

fn check_slot_usage(src: &FlatBox, trees: &[Factor]) -> Result<(), BoxError> {
    let mut used = Vec::new();
    for t in trees {
        t.collect_slots(&mut used);
    }
    used.sort_unstable();
    if used != (0..src.arity()).collect::<Vec<_>>() {
        return Err(BoxError::SlotMap(format!("slots used {used:?}, expected each of 0..{} once", src.arity())));
    }
    Ok(())
}

/// The map of flat boxes whose output slot s is computed by `trees[s]`.
pub fn slot_map(src: &FlatBox, trees: &[Factor], tgt: &FlatBox) -> Result<MackeyMap, BoxError> {
    check_slot_usage(src, trees)?;
    if trees.len() != tgt.arity() {
        return Err(BoxError::SlotMap(format!("{} trees for {} target slots", trees.len(), tgt.arity())));
    }
    for (s, t) in trees.iter().enumerate() {
        let o = t.output(src);
        if o.top().ngens() != tgt.tdims[s] || o.bottom().ngens() != tgt.bdims[s] {
            return Err(BoxError::SlotMap(format!("output of tree {s} does not match target factor")));
        }
    }
    let mut ev = Evaluator::new(src);
    let ntop_s = src.npure + src.nbot;
    let ntop_t = tgt.npure + tgt.nbot;
    let mut f_top = Matrix::zeros(ntop_t, ntop_s);
    let mut f_bot = Matrix::zeros(tgt.nbot, src.nbot);
    for a in 0..src.npure {
        let tuple = tuple_of(&src.tdims, a);
        let vecs: Vec<Vec<Int>> = trees.iter().map(|t| ev.top(t, &tuple)).collect();
        for (idx, c) in expand(&tgt.tdims, &vecs) {
            f_top.add_at(idx, a, &c);
        }
    }
    for z in 0..src.nbot {
        let tuple = tuple_of(&src.bdims, z);
        let vecs: Vec<Vec<Int>> = trees.iter().map(|t| ev.bot(t, &tuple)).collect();
        for (idx, c) in expand(&tgt.bdims, &vecs) {
            f_top.add_at(tgt.npure + idx, src.npure + z, &c);
            f_bot.add_at(idx, z, &c);
        }
    }
    Ok(MackeyMap::new(src.functor(), tgt.functor(), f_top, f_bot)?)
}

/// The map from a flat box to the single functor computed by `tree`.
pub fn tree_map(src: &FlatBox, tree: &Factor) -> Result<MackeyMap, BoxError> {
    check_slot_usage(src, std::slice::from_ref(tree))?;
    let out = tree.output(src);
    let mut ev = Evaluator::new(src);
    let mut f_top = Matrix::zeros(out.top().ngens(), src.npure + src.nbot);
    let mut f_bot = Matrix::zeros(out.bottom().ngens(), src.nbot);
    for a in 0..src.npure {
        let v = ev.top(tree, &tuple_of(&src.tdims, a));
        for (i, c) in v.into_iter().enumerate() {
            f_top.set(i, a, c);
        }
    }
    for z in 0..src.nbot {
        let v = ev.bot(tree, &tuple_of(&src.bdims, z));
        let t = out.tr().apply(&v);
        for (i, c) in t.into_iter().enumerate() {
            f_top.set(i, src.npure + z, c);
        }
        for (i, c) in v.into_iter().enumerate() {
            f_bot.set(i, z, c);
        }
    }
    Ok(MackeyMap::new(src.functor(), &out, f_top, f_bot)?)
}

pub fn box_product(m: &MackeyFunctor, n: &MackeyFunctor) -> Result<FlatBox, BoxError> {
    if m.prime() != n.prime() {
        return Err(BoxError::PrimeMismatch(m.prime(), n.prime()));
    }
    FlatBox::new(m.prime(), &[m.clone(), n.clone()], DEFAULT_GENERATOR_LIMIT)
}

/// The k-fold box power of m.
pub fn box_power(m: &MackeyFunctor, k: usize, limit: usize) -> Result<FlatBox, BoxError> {
    FlatBox::new(m.prime(), &vec![m.clone(); k], limit)
}

/// The canonical map A □ M → M from the Burnside action.
pub fn unitor(m: &MackeyFunctor) -> Result<MackeyMap, BoxError> {
    let a = crate::mackey::burnside(m.prime())?;
    let src = FlatBox::new(m.prime(), &[a, m.clone()], DEFAULT_GENERATOR_LIMIT)?;
    tree_map(&src, &Factor::slot(0).times(Factor::slot(1), &burnside_action(m)?))
}

/// The canonical map M □ A → M.
pub fn right_unitor(m: &MackeyFunctor) -> Result<MackeyMap, BoxError> {
    let a = crate::mackey::burnside(m.prime())?;
    let src = FlatBox::new(m.prime(), &[m.clone(), a], DEFAULT_GENERATOR_LIMIT)?;
    tree_map(&src, &Factor::slot(0).times(Factor::slot(1), &burnside_right_action(m)?))
}

/// Reorders factors: output slot s is source slot perm[s].
pub fn permute(src: &FlatBox, perm: &[usize], tgt: &FlatBox) -> Result<MackeyMap, BoxError> {
    let trees: Vec<Factor> = perm.iter().map(|&i| Factor::slot(i)).collect();
    slot_map(src, &trees, tgt)
}

/// The symmetry M □ N → N □ M.
pub fn swap_map(m: &MackeyFunctor, n: &MackeyFunctor) -> Result<MackeyMap, BoxError> {
    let src = box_product(m, n)?;
    let tgt = box_product(n, m)?;
    permute(&src, &[1, 0], &tgt)
}

/// Rotation of a box power: the last factor moves to the front, acted on by weyl^twist.
pub fn rotation(power: &FlatBox, twist: u32) -> Result<MackeyMap, BoxError> {
    let k = power.arity();
    let mut trees = vec![Factor::twisted(k - 1, twist)];
    trees.extend((0..k - 1).map(Factor::slot));
    slot_map(power, &trees, power)
}

/// The box of maps f_1 □ ... □ f_n between flat boxes.
pub fn box_of_maps(src: &FlatBox, maps: &[MackeyMap], tgt: &FlatBox) -> Result<MackeyMap, BoxError> {
    let trees: Vec<Factor> = maps.iter().enumerate().map(|(i, f)| Factor::slot(i).mapped(f)).collect();
    slot_map(src, &trees, tgt)
}

/// The map out of a box product determined by a pairing, after checking its conditions.
pub fn map_from_pairing(pairing: &Pairing) -> Result<MackeyMap, BoxError> {
    pairing.check()?;
    let src = box_product(pairing.left(), pairing.right())?;
    tree_map(&src, &Factor::slot(0).times(Factor::slot(1), pairing))
}

/// A group of consecutive slots in a nested box.
#[derive(Clone, Debug)]
pub enum Nesting {
    Single(MackeyFunctor),
    Boxed(FlatBox),
}

impl Nesting {
    fn functor(&self) -> &MackeyFunctor {
        match self {
            Nesting::Single(m) => m,
            Nesting::Boxed(b) => b.functor(),
        }
    }

    fn arity(&self) -> usize {
        match self {
            Nesting::Single(_) => 1,
            Nesting::Boxed(b) => b.arity(),
        }
    }
}

fn check_nesting(outer: &FlatBox, groups: &[Nesting], flat: &FlatBox) -> Result<(), BoxError> {
    let total: usize = groups.iter().map(Nesting::arity).sum();
    if groups.len() != outer.arity() || total != flat.arity() {
        return Err(BoxError::SlotMap("nesting does not match the boxes".into()));
    }
    for (g, m) in groups.iter().zip(outer.factors()) {
        if g.functor().top().ngens() != m.top().ngens() || g.functor().bottom().ngens() != m.bottom().ngens() {
            return Err(BoxError::SlotMap("outer factor is not the given inner box".into()));
        }
    }
    Ok(())
}

/// The canonical map from a nested box (outer over `groups`) to the flat box over all slots.
pub fn flatten_map(outer: &FlatBox, groups: &[Nesting], flat: &FlatBox) -> Result<MackeyMap, BoxError> {
    check_nesting(outer, groups, flat)?;
    let m = groups.len();
    let ntop_o = outer.npure + outer.nbot;
    let ntop_f = flat.npure + flat.nbot;
    let mut f_top = Matrix::zeros(ntop_f, ntop_o);
    for a in 0..outer.npure {
        let u = tuple_of(&outer.tdims, a);
        // per group: Ok(pure flat sub-tuple index) or Err(bottom sub-index of a transfer class)
        let kinds: Vec<Result<usize, usize>> = groups
            .iter()
            .zip(&u)
            .map(|(g, &ug)| match g {
                Nesting::Single(_) => Ok(ug),
                Nesting::Boxed(b) if ug < b.npure => Ok(ug),
                Nesting::Boxed(b) => Err(ug - b.npure),
            })
            .collect();
        match kinds.iter().position(|k| k.is_err()) {
            None => {
                let idx = kinds.iter().zip(groups).fold(0, |acc, (k, g)| {
                    let size = match g {
                        Nesting::Single(f) => f.top().ngens(),
                        Nesting::Boxed(b) => b.npure,
                    };
                    acc * size + k.unwrap()
                });
                f_top.add_at(idx, a, &Int::one());
            }
            Some(g0) => {
                // pure(..., tr z, ...) = tr(res ... ⊗ z ⊗ res ...)
                let vecs: Vec<Vec<Int>> = (0..m)
                    .map(|g| {
                        let bf = groups[g].functor();
                        let nb = bf.bottom().ngens();
                        match kinds[g] {
                            Err(z) if g == g0 => unit_vec(nb, z),
                            _ => bf.res().matrix().column(u[g]),
                        }
                    })
                    .collect();
                let dims: Vec<usize> = groups.iter().map(|g| g.functor().bottom().ngens()).collect();
                for (idx, c) in expand(&dims, &vecs) {
                    f_top.add_at(flat.npure + idx, a, &c);
                }
            }
        }
    }
    for z in 0..outer.nbot {
        f_top.add_at(flat.npure + z, outer.npure + z, &Int::one());
    }
    let f_bot = Matrix::identity(outer.nbot);
    Ok(MackeyMap::new(outer.functor(), flat.functor(), f_top, f_bot)?)
}

/// The canonical map from the flat box to a nested box (inverse of [`flatten_map`]).
pub fn nest_map(flat: &FlatBox, outer: &FlatBox, groups: &[Nesting]) -> Result<MackeyMap, BoxError> {
    check_nesting(outer, groups, flat)?;
    let ntop_o = outer.npure + outer.nbot;
    let ntop_f = flat.npure + flat.nbot;
    let mut f_top = Matrix::zeros(ntop_o, ntop_f);
    for a in 0..flat.npure {
        let t = tuple_of(&flat.tdims, a);
        let mut off = 0;
        let mut u = Vec::with_capacity(groups.len());
        for g in groups {
            let k = g.arity();
            u.push(match g {
                Nesting::Single(_) => t[off],
                Nesting::Boxed(b) => b.pure_index(&t[off..off + k]),
            });
            off += k;
        }
        f_top.add_at(outer.pure_index(&u), a, &Int::one());
    }
    for z in 0..flat.nbot {
        f_top.add_at(outer.npure + z, flat.npure + z, &Int::one());
    }
    let f_bot = Matrix::identity(flat.nbot);
    Ok(MackeyMap::new(flat.functor(), outer.functor(), f_top, f_bot)?)
}

/// The rebracketing (M □ N) □ L → M □ (N □ L), built from provenance.
pub fn rebracket(m: &MackeyFunctor, n: &MackeyFunctor, l: &MackeyFunctor) -> Result<MackeyMap, BoxError> {
    let p = m.prime();
    let lim = DEFAULT_GENERATOR_LIMIT;
    let mn = FlatBox::new(p, &[m.clone(), n.clone()], lim)?;
    let nl = FlatBox::new(p, &[n.clone(), l.clone()], lim)?;
    let left = FlatBox::new(p, &[mn.functor().clone(), l.clone()], lim)?;
    let right = FlatBox::new(p, &[m.clone(), nl.functor().clone()], lim)?;
    let flat = FlatBox::new(p, &[m.clone(), n.clone(), l.clone()], lim)?;
    let f = flatten_map(&left, &[Nesting::Boxed(mn), Nesting::Single(l.clone())], &flat)?;
    let g = nest_map(&flat, &right, &[Nesting::Single(m.clone()), Nesting::Boxed(nl)])?;
    Ok(g.after(&f))
}

/// The top-level element (a ⊗ tr y) − tr(res a ⊗ y) of M □ N, for top generator a of M and bottom generator y of N.
pub fn frobenius_defect(b: &FlatBox, a: usize, y: usize) -> Vec<Int> {
    let (m, n) = (&b.factors[0], &b.factors[1]);
    let pure = b.pure_element(&[unit_vec(m.top().ngens(), a), n.tr().matrix().column(y)]);
    let trc = b.transfer_element(&[m.res().matrix().column(a), unit_vec(n.bottom().ngens(), y)]);
    pure.iter().zip(&trc).map(|(x, z)| x - z).collect()
}

/// Outcome of the box-product law checks on a corpus; failures name corpus indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct BoxLawReport {
    pub functors: usize,
    pub unitors_checked: usize,
    pub swaps_checked: usize,
    pub rebrackets_checked: usize,
    pub frobenius_checked: usize,
    pub failures: Vec<String>,
}

impl BoxLawReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Unitors on every functor, swaps on every ordered pair, rebracketing on the triples (i, i, i)
/// and (i, i+1, i+2) cyclically, and vanishing of the Frobenius defects on every pair.
pub fn box_laws(corpus: &[MackeyFunctor]) -> Result<BoxLawReport, BoxError> {
    let n = corpus.len();
    let mut r = BoxLawReport { functors: n, ..Default::default() };
    for (i, m) in corpus.iter().enumerate() {
        r.unitors_checked += 1;
        if !unitor(m)?.is_iso() || !right_unitor(m)?.is_iso() {
            r.failures.push(format!("unitor {i}"));
        }
    }
    for (i, m) in corpus.iter().enumerate() {
        for (j, k) in corpus.iter().enumerate() {
            if m.prime() != k.prime() {
                continue;
            }
            r.swaps_checked += 1;
            if !swap_map(m, k)?.is_iso() {
                r.failures.push(format!("swap {i} {j}"));
            }
            let b = box_product(m, k)?;
            for a in 0..m.top().ngens() {
                for y in 0..k.bottom().ngens() {
                    r.frobenius_checked += 1;
                    if !b.functor().top().is_zero_elem(&frobenius_defect(&b, a, y)) {
                        r.failures.push(format!("frobenius {i} {j} ({a}, {y})"));
                    }
                }
            }
        }
    }
    for i in 0..n {
        for (a, b, c) in [(i, i, i), (i, (i + 1) % n, (i + 2) % n)] {
            let (x, y, z) = (&corpus[a], &corpus[b], &corpus[c]);
            if x.prime() != y.prime() || y.prime() != z.prime() {
                continue;
            }
            r.rebrackets_checked += 1;
            if !rebracket(x, y, z)?.is_iso() {
                r.failures.push(format!("rebracket {a} {b} {c}"));
            }
        }
    }
    Ok(r)
}

/// The pairing (group of slots) × (group of slots) → flat box, through the canonical flattening.
pub fn concat_pairing(left: &Nesting, right: &Nesting, flat: &FlatBox, limit: usize) -> Result<Pairing, BoxError> {
    let (l, r) = (left.functor(), right.functor());
    let outer = FlatBox::new(flat.prime(), &[l.clone(), r.clone()], limit)?;
    let f = flatten_map(&outer, &[left.clone(), right.clone()], flat)?;
    let (lt, rt) = (l.top().ngens(), r.top().ngens());
    let (lb, rb) = (l.bottom().ngens(), r.bottom().ngens());
    let out = flat.functor();
    let mut top = Matrix::zeros(out.top().ngens(), lt * rt);
    for i in 0..lt {
        for j in 0..rt {
            let v = f.f_top().matrix().mul_vec(&outer.pure_element(&[unit_vec(lt, i), unit_vec(rt, j)]));
            for (k, x) in v.into_iter().enumerate() {
                top.set(k, i * rt + j, x);
            }
        }
    }
    let mut bot = Matrix::zeros(out.bottom().ngens(), lb * rb);
    for i in 0..lb {
        for j in 0..rb {
            let v = f.f_bot().matrix().mul_vec(&outer.bottom_element(&[unit_vec(lb, i), unit_vec(rb, j)]));
            for (k, x) in v.into_iter().enumerate() {
                bot.set(k, i * rb + j, x);
            }
        }
    }
    Pairing::new(l, r, out, top, bot)
}

/// Presentation-level data of a relative box over a ring R: for each adjacent pair of slots,
/// the right action of R on the left slot and the left action of R on the right slot.
#[derive(Clone, Debug)]
pub struct Balancing {
    pub ring: MackeyFunctor,
    pub right: Vec<Pairing>,
    pub left: Vec<Pairing>,
    /// Closes the chain cyclically: x_{n−1}·r against γ^t(r)·x_0, as (right action, left action, t).
    pub wrap: Option<(Pairing, Pairing, u32)>,
}

fn push_relations(d: &MackeyMap, top_rows: &mut Vec<Vec<Int>>, bot_rows: &mut Vec<Vec<Int>>) {
    for (m, rows) in [(d.f_top().matrix(), top_rows), (d.f_bot().matrix(), bot_rows)] {
        for j in 0..m.ncols() {
            let c = m.column(j);
            if c.iter().any(|x| !x.is_zero()) {
                rows.push(c);
            }
        }
    }
}

/// The box of `factors` balanced over R at each adjacent pair, with the projection from the absolute box.
pub fn relative_flat_box(
    p: u32,
    factors: &[MackeyFunctor],
    bal: &Balancing,
    limit: usize,
) -> Result<(FlatBox, MackeyMap), BoxError> {
    let abs = FlatBox::new(p, factors, limit)?;
    let n = factors.len();
    let mut top_rows: Vec<Vec<Int>> = Vec::new();
    let mut bot_rows: Vec<Vec<Int>> = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut ext = factors.to_vec();
        ext.insert(i + 1, bal.ring.clone());
        let src = FlatBox::new(p, &ext, limit)?;
        let mut rho: Vec<Factor> = Vec::with_capacity(n);
        let mut lam: Vec<Factor> = Vec::with_capacity(n);
        for s in 0..n {
            let shifted = if s > i { s + 1 } else { s };
            if s == i {
                rho.push(Factor::slot(i).times(Factor::slot(i + 1), &bal.right[i]));
                lam.push(Factor::slot(i));
            } else if s == i + 1 {
                rho.push(Factor::slot(i + 2));
                lam.push(Factor::slot(i + 1).times(Factor::slot(i + 2), &bal.left[i]));
            } else {
                rho.push(Factor::slot(shifted));
                lam.push(Factor::slot(shifted));
            }
        }
        let a = slot_map(&src, &rho, &abs)?;
        let b = slot_map(&src, &lam, &abs)?;
        let d = a.sub(&b);
        push_relations(&d, &mut top_rows, &mut bot_rows);
    }
    if let Some((right, left, t)) = &bal.wrap {
        let mut ext = factors.to_vec();
        ext.push(bal.ring.clone());
        let src = FlatBox::new(p, &ext, limit)?;
        let last = n - 1;
        let mut rho: Vec<Factor> = (0..n).map(Factor::slot).collect();
        let mut lam = rho.clone();
        rho[last] = Factor::slot(last).times(Factor::slot(n), right);
        lam[0] = Factor::twisted(n, *t).times(Factor::slot(0), left);
        let d = slot_map(&src, &rho, &abs)?.sub(&slot_map(&src, &lam, &abs)?);
        push_relations(&d, &mut top_rows, &mut bot_rows);
    }
    let ntop = abs.npure + abs.nbot;
    let rel = abs.with_relations(&Matrix::from_rows(top_rows, ntop), &Matrix::from_rows(bot_rows, abs.nbot))?;
    let proj = MackeyMap::new(
        abs.functor(),
        rel.functor(),
        Matrix::identity(ntop),
        Matrix::identity(abs.nbot),
    )?;
    Ok((rel, proj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mackey::{burnside, constant, j_top};

    #[test]
    fn empty_box_is_burnside() {
        let b = FlatBox::new(3, &[], 100).unwrap();
        let a = burnside(3).unwrap();
        assert_eq!(b.functor().canonical(), a.canonical());
        assert_eq!(b.functor().res().matrix(), a.res().matrix());
    }

    #[test]
    fn single_box_is_iso_to_factor() {
        let m = constant(2, 4).unwrap();
        let b = FlatBox::new(2, &[m], 100).unwrap();
        let f = tree_map(&b, &Factor::slot(0)).unwrap();
        assert!(f.is_iso());
    }

    #[test]
    fn concentrated_box_has_zero_bottom() {
        let k = j_top(2, &FGAb::cyclic(2)).unwrap();
        let b = box_product(&k, &k).unwrap();
        assert!(b.functor().bottom().is_trivial());
        assert_eq!(b.functor().top().describe(), "Z/2");
    }
}
