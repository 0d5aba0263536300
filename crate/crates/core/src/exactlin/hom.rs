use std::sync::Arc;

use num_traits::Zero;

use super::group::FGAb;
use super::matrix::{Int, Matrix};
use super::snf::{hermite_rows, integer_kernel, IntegerSolver};
use super::ExactError;

/// A homomorphism of presented groups; the matrix has target rows and source columns.
#[derive(Clone, Debug)]
pub struct AbHom {
    source: FGAb,
    target: FGAb,
    matrix: Arc<Matrix>,
}

impl AbHom {
    /// Checked constructor: every source relation must map into the target relations.
    pub fn new(source: FGAb, target: FGAb, matrix: Matrix) -> Result<Self, ExactError> {
        check_shape(&source, &target, &matrix)?;
        let h = AbHom { source, target, matrix: Arc::new(matrix) };
        if let Some(r) = h.first_bad_relation() {
            return Err(ExactError::IllFormedHom { relation: r });
        }
        Ok(h)
    }

    /// Constructor without the well-definedness check (shape is still checked).
    pub fn new_unchecked(source: FGAb, target: FGAb, matrix: Matrix) -> Self {
        check_shape(&source, &target, &matrix).expect("hom shape");
        AbHom { source, target, matrix: Arc::new(matrix) }
    }

    pub fn identity(g: &FGAb) -> Self {
        Self::new_unchecked(g.clone(), g.clone(), Matrix::identity(g.ngens()))
    }

    pub fn zero(source: &FGAb, target: &FGAb) -> Self {
        Self::new_unchecked(source.clone(), target.clone(), Matrix::zeros(target.ngens(), source.ngens()))
    }

    pub fn source(&self) -> &FGAb {
        &self.source
    }

    pub fn target(&self) -> &FGAb {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[Int]) -> Vec<Int> {
        self.matrix.mul_vec(x)
    }

    /// Index of the first source relation whose image is nonzero in the target.
    pub fn first_bad_relation(&self) -> Option<usize> {
        let rel = self.source.relations();
        (0..rel.nrows()).find(|&i| !self.target.is_zero_elem(&self.matrix.mul_vec(rel.row(i))))
    }

    pub fn is_well_defined(&self) -> bool {
        self.first_bad_relation().is_none()
    }

    /// self ∘ other (other first).
    pub fn after(&self, other: &AbHom) -> AbHom {
        assert_eq!(other.target.ngens(), self.source.ngens(), "composition shape mismatch");
        AbHom::new_unchecked(other.source.clone(), self.target.clone(), self.matrix.mul(&other.matrix))
    }

    pub fn add(&self, other: &AbHom) -> AbHom {
        AbHom::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.add(&other.matrix))
    }

    pub fn sub(&self, other: &AbHom) -> AbHom {
        AbHom::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.sub(&other.matrix))
    }

    pub fn scale(&self, c: &Int) -> AbHom {
        AbHom::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.scale(c))
    }

    /// First source generator on which the two maps differ in the target, if any.
    pub fn first_difference(&self, other: &AbHom) -> Option<usize> {
        let n = self.source.ngens();
        (0..n).find(|&j| {
            let d: Vec<Int> =
                (0..self.target.ngens()).map(|i| self.matrix.get(i, j) - other.matrix.get(i, j)).collect();
            !self.target.is_zero_elem(&d)
        })
    }

    pub fn equals(&self, other: &AbHom) -> bool {
        self.first_difference(other).is_none()
    }

    pub fn is_zero_map(&self) -> bool {
        (0..self.source.ngens()).all(|j| self.target.is_zero_elem(&self.matrix.column(j)))
    }

    /// Same matrix viewed between other presentations (used after adding relations).
    pub fn reinterpret(&self, source: &FGAb, target: &FGAb) -> Result<AbHom, ExactError> {
        AbHom::new(source.clone(), target.clone(), (*self.matrix).clone())
    }

    pub fn is_injective(&self) -> bool {
        hom_kernel(self).map(|(k, _)| k.is_trivial()).unwrap_or(false)
    }

    pub fn is_surjective(&self) -> bool {
        hom_cokernel(self).0.is_trivial()
    }

    pub fn is_iso(&self) -> bool {
        self.is_surjective() && self.is_injective()
    }
}

fn check_shape(source: &FGAb, target: &FGAb, m: &Matrix) -> Result<(), ExactError> {
    if m.nrows() != target.ngens() || m.ncols() != source.ngens() {
        return Err(ExactError::Shape(format!(
            "matrix is {}x{}, expected {}x{}",
            m.nrows(),
            m.ncols(),
            target.ngens(),
            source.ngens()
        )));
    }
    Ok(())
}

/// Preimage lattice {x ∈ ℤ^a : F x ∈ relations(B)} as a Hermite row basis.
fn preimage_lattice(f: &Matrix, target: &FGAb) -> Matrix {
    let a = f.ncols();
    let rb = target.relation_basis().transpose();
    let m = Matrix::hstack(&[f, &rb], target.ngens());
    let z = integer_kernel(&m);
    let gens = z.row_range(0, a);
    hermite_rows(&gens.transpose())
}

/// Kernel of f with its inclusion into the source.
pub fn hom_kernel(f: &AbHom) -> Result<(FGAb, AbHom), ExactError> {
    if let Some(r) = f.first_bad_relation() {
        return Err(ExactError::IllFormedHom { relation: r });
    }
    let a = f.source().ngens();
    let basis = preimage_lattice(f.matrix(), f.target());
    let gens = basis.transpose();
    let k = gens.ncols();
    let ra = f.source().relation_basis().transpose();
    let m = Matrix::hstack(&[&gens, &ra], a);
    let z = integer_kernel(&m);
    let rel = hermite_rows(&z.row_range(0, k).transpose());
    let kgroup = FGAb::new(k, rel);
    let incl = AbHom::new_unchecked(kgroup.clone(), f.source().clone(), gens);
    Ok((kgroup, incl))
}

/// Cokernel of f with the projection from the target.
pub fn hom_cokernel(f: &AbHom) -> (FGAb, AbHom) {
    let t = f.target();
    let c = t.with_relations(&f.matrix().transpose());
    let proj = AbHom::new_unchecked(t.clone(), c.clone(), Matrix::identity(t.ngens()));
    (c, proj)
}

/// Image of f presented on the source generators, with its inclusion into the target.
pub fn hom_image(f: &AbHom) -> (FGAb, AbHom) {
    let a = f.source().ngens();
    let basis = preimage_lattice(f.matrix(), f.target());
    let im = FGAb::new(a, basis);
    let incl = AbHom::new_unchecked(im.clone(), f.target().clone(), f.matrix().clone());
    (im, incl)
}

/// Tensor product with generator pairs (i, j) at index i * B.ngens() + j.
pub fn tensor(a: &FGAb, b: &FGAb) -> (FGAb, TensorIndex) {
    let (na, nb) = (a.ngens(), b.ngens());
    let n = na * nb;
    let ra = a.relation_basis();
    let rb = b.relation_basis();
    let mut rel = Matrix::zeros(0, n);
    for r in 0..ra.nrows() {
        for j in 0..nb {
            let mut row = vec![Int::zero(); n];
            for i in 0..na {
                row[i * nb + j] = ra.get(r, i).clone();
            }
            rel.push_row(row);
        }
    }
    for r in 0..rb.nrows() {
        for i in 0..na {
            let mut row = vec![Int::zero(); n];
            for j in 0..nb {
                row[i * nb + j] = rb.get(r, j).clone();
            }
            rel.push_row(row);
        }
    }
    (FGAb::new(n, rel), TensorIndex { left: na, right: nb })
}

/// Bijection between generator pairs and tensor generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorIndex {
    pub left: usize,
    pub right: usize,
}

impl TensorIndex {
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.right + j
    }

    pub fn pair(&self, k: usize) -> (usize, usize) {
        (k / self.right, k % self.right)
    }
}

/// Tensor product of homs f ⊗ g between tensor presentations built by `tensor`.
pub fn tensor_homs(f: &AbHom, g: &AbHom) -> AbHom {
    let (s, _) = tensor(f.source(), g.source());
    let (t, _) = tensor(f.target(), g.target());
    AbHom::new_unchecked(s, t, Matrix::kron(f.matrix(), g.matrix()))
}

/// Direct sum with injections and projections.
pub fn direct_sum(groups: &[FGAb]) -> (FGAb, Vec<AbHom>, Vec<AbHom>) {
    let n: usize = groups.iter().map(|g| g.ngens()).sum();
    let mut rel = Matrix::zeros(0, n);
    let mut off = 0;
    let mut offsets = Vec::new();
    for g in groups {
        offsets.push(off);
        let r = g.relation_basis();
        for i in 0..r.nrows() {
            let mut row = vec![Int::zero(); n];
            for j in 0..g.ngens() {
                row[off + j] = r.get(i, j).clone();
            }
            rel.push_row(row);
        }
        off += g.ngens();
    }
    let sum = FGAb::new(n, rel);
    let mut inj = Vec::new();
    let mut proj = Vec::new();
    for (g, &o) in groups.iter().zip(&offsets) {
        let mut mi = Matrix::zeros(n, g.ngens());
        let mut mp = Matrix::zeros(g.ngens(), n);
        for j in 0..g.ngens() {
            mi.set(o + j, j, Int::from(1));
            mp.set(j, o + j, Int::from(1));
        }
        inj.push(AbHom::new_unchecked(g.clone(), sum.clone(), mi));
        proj.push(AbHom::new_unchecked(sum.clone(), g.clone(), mp));
    }
    (sum, inj, proj)
}

/// Quotient of g by the subgroup generated by the given columns.
pub fn quotient_by_subgroup(g: &FGAb, gens: &Matrix) -> (FGAb, AbHom) {
    assert_eq!(gens.nrows(), g.ngens());
    let q = g.with_relations(&gens.transpose());
    let proj = AbHom::new_unchecked(g.clone(), q.clone(), Matrix::identity(g.ngens()));
    (q, proj)
}

/// Solves S·c ≡ x in g for the subgroup generated by the columns of S.
pub struct MembershipSolver {
    nsub: usize,
    solver: IntegerSolver,
}

impl MembershipSolver {
    pub fn new(g: &FGAb, gens: &Matrix) -> Self {
        assert_eq!(gens.nrows(), g.ngens());
        let rb = g.relation_basis().transpose();
        let m = Matrix::hstack(&[gens, &rb], g.ngens());
        MembershipSolver { nsub: gens.ncols(), solver: IntegerSolver::new(&m) }
    }

    pub fn solve(&self, x: &[Int]) -> Option<Vec<Int>> {
        self.solver.solve(x).map(|z| z[..self.nsub].to_vec())
    }
}

pub fn solve_membership(g: &FGAb, gens: &Matrix, x: &[Int]) -> Option<Vec<Int>> {
    MembershipSolver::new(g, gens).solve(x)
}

/// g ∘ f
pub fn compose(f: &AbHom, g: &AbHom) -> AbHom {
    g.after(f)
}

pub fn homs_equal(f: &AbHom, g: &AbHom) -> bool {
    f.equals(g)
}

/// Subgroup generated by columns, presented on those columns.
pub fn subgroup(g: &FGAb, gens: &Matrix) -> (FGAb, AbHom) {
    let src = FGAb::free(gens.ncols());
    let h = AbHom::new_unchecked(src, g.clone(), gens.clone());
    hom_image(&h)
}

/// Whether every column of `gens` is zero in g.
pub fn columns_vanish(g: &FGAb, gens: &Matrix) -> bool {
    (0..gens.ncols()).all(|j| g.is_zero_elem(&gens.column(j)))
}

/// Minimal presentation on canonical generators with isomorphisms to and from g.
pub fn minimized(g: &FGAb) -> (FGAb, AbHom, AbHom) {
    let orders = g.canonical_orders();
    let k = orders.len();
    let mut rel = Matrix::zeros(0, k);
    for (i, o) in orders.iter().enumerate() {
        if !o.is_zero() {
            let mut row = vec![Int::zero(); k];
            row[i] = o.clone();
            rel.push_row(row);
        }
    }
    let m = FGAb::new(k, rel);
    let to_g = Matrix::from_columns(g.ngens(), &g.canonical_generators());
    let mut from_g = Matrix::zeros(k, g.ngens());
    for j in 0..g.ngens() {
        let mut e = vec![Int::zero(); g.ngens()];
        e[j] = Int::from(1);
        for (i, v) in g.reduce(&e).into_iter().enumerate() {
            from_g.set(i, j, v);
        }
    }
    let into = AbHom::new_unchecked(m.clone(), g.clone(), to_g);
    let back = AbHom::new_unchecked(g.clone(), m.clone(), from_g);
    (m, into, back)
}
