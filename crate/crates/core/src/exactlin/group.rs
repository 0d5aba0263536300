use std::fmt;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::matrix::{Int, Matrix};
use super::snf::{hermite_rows, snf_work};

/// A finitely generated abelian group ℤ^n / (row span of the relation matrix).
///
/// Elements are integer column vectors of length `num_generators`. Cloning is cheap.
#[derive(Clone)]
pub struct FGAb(Arc<GroupData>);

struct GroupData {
    ngens: usize,
    relations: Matrix,
    canon: OnceLock<Canonical>,
}

/// Canonical coordinates y = coord·x; coordinate i is read modulo factors[i] (0 = free).
struct Canonical {
    basis: Matrix,
    factors: Vec<Int>,
    coord: Matrix,
    lift: Matrix,
    kept: Vec<usize>,
}

impl fmt::Debug for FGAb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FGAb(gens={}, {})", self.ngens(), self.describe())
    }
}

impl PartialEq for FGAb {
    /// Equality of presentations (same generator count and identical relation lattice).
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.ngens() == other.ngens() && self.relation_basis() == other.relation_basis())
    }
}

impl Eq for FGAb {}

impl FGAb {
    pub fn new(ngens: usize, relations: Matrix) -> Self {
        assert_eq!(relations.ncols(), ngens, "relation matrix width must equal generator count");
        FGAb(Arc::new(GroupData { ngens, relations, canon: OnceLock::new() }))
    }

    pub fn free(n: usize) -> Self {
        Self::new(n, Matrix::zeros(0, n))
    }

    pub fn zero() -> Self {
        Self::free(0)
    }

    /// ℤ if n = 0, else ℤ/n, on one generator.
    pub fn cyclic(n: u64) -> Self {
        if n == 0 {
            Self::free(1)
        } else {
            Self::new(1, Matrix::from_rows(vec![vec![BigInt::from(n)]], 1))
        }
    }

    /// ⊕ ℤ/n_i on one generator each (n_i = 0 meaning ℤ).
    pub fn product_of_cyclics(orders: &[u64]) -> Self {
        let n = orders.len();
        let mut rel = Matrix::zeros(0, n);
        for (i, &o) in orders.iter().enumerate() {
            if o != 0 {
                let mut row = vec![Int::zero(); n];
                row[i] = BigInt::from(o);
                rel.push_row(row);
            }
        }
        Self::new(n, rel)
    }

    pub fn ngens(&self) -> usize {
        self.0.ngens
    }

    pub fn relations(&self) -> &Matrix {
        &self.0.relations
    }

    /// Returns a presentation with the same generators and extra relations appended.
    pub fn with_relations(&self, extra: &Matrix) -> FGAb {
        if extra.nrows() == 0 {
            return self.clone();
        }
        FGAb::new(self.ngens(), Matrix::vstack(&[self.relations(), extra], self.ngens()))
    }

    fn canon(&self) -> &Canonical {
        self.0.canon.get_or_init(|| {
            let n = self.ngens();
            let basis = hermite_rows(self.relations());
            let w = snf_work(&basis, false, true, true);
            let v = w.v.unwrap();
            let vinv = w.vinv.unwrap();
            let mut factors = vec![Int::zero(); n];
            for (i, f) in factors.iter_mut().enumerate().take(basis.nrows().min(n)) {
                *f = w.d.get(i, i).clone();
            }
            let coord = v.transpose();
            let lift = vinv.transpose();
            let kept = (0..n).filter(|&i| !factors[i].is_one()).collect();
            Canonical { basis, factors, coord, lift, kept }
        })
    }

    /// Hermite basis of the relation lattice.
    pub fn relation_basis(&self) -> &Matrix {
        &self.canon().basis
    }

    /// Invariant factors (each > 1, dividing chain) of the torsion part.
    pub fn invariant_factors(&self) -> Vec<Int> {
        let c = self.canon();
        c.factors.iter().filter(|d| !d.is_zero() && !d.is_one()).cloned().collect()
    }

    pub fn free_rank(&self) -> usize {
        self.canon().factors.iter().filter(|d| d.is_zero()).count()
    }

    pub fn is_trivial(&self) -> bool {
        self.canon().kept.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank() == 0
    }

    /// Group order, if finite.
    pub fn order(&self) -> Option<Int> {
        if !self.is_finite() {
            return None;
        }
        Some(self.invariant_factors().iter().fold(Int::one(), |a, b| a * b))
    }

    /// Canonical-form summary: (free rank, invariant factors).
    pub fn canonical(&self) -> (usize, Vec<Int>) {
        (self.free_rank(), self.invariant_factors())
    }

    pub fn describe(&self) -> String {
        let (r, f) = self.canonical();
        let mut parts: Vec<String> = f.iter().map(|d| format!("Z/{d}")).collect();
        for _ in 0..r {
            parts.push("Z".to_string());
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }

    /// Number of canonical cyclic coordinates (nontrivial ones only).
    pub fn canonical_len(&self) -> usize {
        self.canon().kept.len()
    }

    /// Orders of the canonical coordinates (0 = free), in canonical order.
    pub fn canonical_orders(&self) -> Vec<Int> {
        let c = self.canon();
        c.kept.iter().map(|&i| c.factors[i].clone()).collect()
    }

    /// Reduced canonical coordinates of an element.
    pub fn reduce(&self, x: &[Int]) -> Vec<Int> {
        assert_eq!(x.len(), self.ngens(), "element has wrong length");
        let c = self.canon();
        c.kept
            .iter()
            .map(|&i| {
                let mut acc = Int::zero();
                for (j, xj) in x.iter().enumerate() {
                    if !xj.is_zero() {
                        let a = c.coord.get(i, j);
                        if !a.is_zero() {
                            acc += a * xj;
                        }
                    }
                }
                let d = &c.factors[i];
                if d.is_zero() {
                    acc
                } else {
                    acc.mod_floor(d)
                }
            })
            .collect()
    }

    pub fn is_zero_elem(&self, x: &[Int]) -> bool {
        self.reduce(x).iter().all(|v| v.is_zero())
    }

    pub fn elems_equal(&self, x: &[Int], y: &[Int]) -> bool {
        let d: Vec<Int> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.is_zero_elem(&d)
    }

    /// Element in generator coordinates with the given canonical coordinates.
    pub fn lift(&self, canonical: &[Int]) -> Vec<Int> {
        let c = self.canon();
        assert_eq!(canonical.len(), c.kept.len());
        let n = self.ngens();
        let mut out = vec![Int::zero(); n];
        for (k, &i) in c.kept.iter().enumerate() {
            if canonical[k].is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let a = c.lift.get(j, i);
                if !a.is_zero() {
                    *o += a * &canonical[k];
                }
            }
        }
        out
    }

    /// Canonical generators expressed in the original generators (one per canonical coordinate).
    pub fn canonical_generators(&self) -> Vec<Vec<Int>> {
        let k = self.canonical_len();
        (0..k)
            .map(|i| {
                let mut e = vec![Int::zero(); k];
                e[i] = Int::one();
                self.lift(&e)
            })
            .collect()
    }

    /// All elements of a finite group as canonical coordinate vectors, in lexicographic order.
    pub fn enumerate_canonical(&self, limit: usize) -> Option<Vec<Vec<u64>>> {
        let orders = self.canonical_orders();
        let mut sizes = Vec::with_capacity(orders.len());
        let mut total: u128 = 1;
        for o in &orders {
            if o.is_zero() {
                return None;
            }
            let v = o.to_u64()?;
            sizes.push(v);
            total = total.checked_mul(v as u128)?;
            if total > limit as u128 {
                return None;
            }
        }
        let mut out = Vec::with_capacity(total as usize);
        let mut cur = vec![0u64; sizes.len()];
        loop {
            out.push(cur.clone());
            let mut i = sizes.len();
            loop {
                if i == 0 {
                    return Some(out);
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < sizes[i] {
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    pub fn order_u64(&self) -> Option<u64> {
        self.order().and_then(|o| o.to_u64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_of_z4_plus_z6() {
        let g = FGAb::product_of_cyclics(&[4, 6]);
        assert_eq!(g.invariant_factors(), vec![BigInt::from(2), BigInt::from(12)]);
        assert_eq!(g.free_rank(), 0);
    }

    #[test]
    fn zero_group_is_trivial() {
        assert!(FGAb::zero().is_trivial());
        assert!(FGAb::cyclic(1).is_trivial());
        assert!(!FGAb::cyclic(0).is_trivial());
    }

    #[test]
    fn lift_inverts_reduce() {
        let g = FGAb::new(2, Matrix::from_i64(1, 2, &[2, 4]));
        let x = vec![BigInt::from(3), BigInt::from(-5)];
        let y = g.reduce(&x);
        assert!(g.elems_equal(&g.lift(&y), &x));
    }
}
