use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{Int, Matrix};

/// Returns (g, s, t) with g = s*a + t*b and g >= 0.
pub fn egcd(a: &Int, b: &Int) -> (Int, Int, Int) {
    let (mut old_r, mut r) = (a.clone(), b.clone());
    let (mut old_s, mut s) = (Int::one(), Int::zero());
    let (mut old_t, mut t) = (Int::zero(), Int::one());
    while !r.is_zero() {
        let q = &old_r / &r;
        let nr = &old_r - &q * &r;
        old_r = std::mem::replace(&mut r, nr);
        let ns = &old_s - &q * &s;
        old_s = std::mem::replace(&mut s, ns);
        let nt = &old_t - &q * &t;
        old_t = std::mem::replace(&mut t, nt);
    }
    if old_r.is_negative() {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// U·m·V = D with U, V unimodular and D diagonal, d_1 | d_2 | ...
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: Matrix,
    pub d: Matrix,
    pub v: Matrix,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<Int> {
        (0..self.d.nrows().min(self.d.ncols())).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

pub(crate) struct SnfWork {
    pub d: Matrix,
    pub u: Option<Matrix>,
    pub v: Option<Matrix>,
    pub vinv: Option<Matrix>,
}

pub fn smith_normal_form(m: &Matrix) -> SmithForm {
    let w = snf_work(m, true, true, false);
    SmithForm { u: w.u.unwrap(), d: w.d, v: w.v.unwrap() }
}

pub(crate) fn snf_work(m: &Matrix, want_u: bool, want_v: bool, want_vinv: bool) -> SnfWork {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut a = m.clone();
    let mut u = want_u.then(|| Matrix::identity(rows));
    let mut v = want_v.then(|| Matrix::identity(cols));
    let mut vinv = want_vinv.then(|| Matrix::identity(cols));
    let one = Int::one();
    let zero = Int::zero();
    for t in 0..rows.min(cols) {
        // smallest nonzero entry in the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                let x = a.get(i, j);
                if !x.is_zero() {
                    match best {
                        Some((bi, bj)) if a.get(bi, bj).magnitude() <= x.magnitude() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        if let Some(u) = u.as_mut() {
            u.swap_rows(t, pi);
        }
        a.swap_cols(t, pj);
        if let Some(v) = v.as_mut() {
            v.swap_cols(t, pj);
        }
        if let Some(vi) = vinv.as_mut() {
            vi.swap_rows(t, pj);
        }
        loop {
            for i in t + 1..rows {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let p = a.get(t, t).clone();
                let b = a.get(i, t).clone();
                if (&b % &p).is_zero() {
                    let q = &b / &p;
                    a.row_axpy(i, t, &q);
                    if let Some(u) = u.as_mut() {
                        u.row_axpy(i, t, &q);
                    }
                    continue;
                }
                let (g, s, c) = egcd(&p, &b);
                let x = &p / &g;
                let y = &b / &g;
                let ny = -&y;
                a.combine_rows(t, i, &s, &c, &ny, &x);
                if let Some(u) = u.as_mut() {
                    u.combine_rows(t, i, &s, &c, &ny, &x);
                }
            }
            let mut row_dirty = false;
            for j in t + 1..cols {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let p = a.get(t, t).clone();
                let b = a.get(t, j).clone();
                let (s, c, x, y) = if (&b % &p).is_zero() {
                    (one.clone(), zero.clone(), -(&b / &p), one.clone())
                } else {
                    let (g, s, c) = egcd(&p, &b);
                    let x = &p / &g;
                    let y = &b / &g;
                    (s, c, -y, x)
                };
                // columns (t, j) <- (s*t + c*j, x*t + y*j); inverse applied to vinv rows
                a.combine_cols(t, j, &s, &c, &x, &y);
                if let Some(v) = v.as_mut() {
                    v.combine_cols(t, j, &s, &c, &x, &y);
                }
                if let Some(vi) = vinv.as_mut() {
                    // E = [[s, x], [c, y]] acting on (t, j); det = s*y - x*c = 1
                    let ni = -&x;
                    let nc = -&c;
                    vi.combine_rows(t, j, &y, &ni, &nc, &s);
                }
                row_dirty = true;
            }
            let col_clean = (t + 1..rows).all(|i| a.get(i, t).is_zero());
            if row_dirty && !col_clean {
                continue;
            }
            if !col_clean {
                continue;
            }
            let p = a.get(t, t).clone();
            let mut bad = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(a.get(i, j) % &p).is_zero() {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    let q = -Int::one();
                    a.row_axpy(t, i, &q);
                    if let Some(u) = u.as_mut() {
                        u.row_axpy(t, i, &q);
                    }
                }
                None => break,
            }
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            if let Some(u) = u.as_mut() {
                u.negate_row(t);
            }
        }
    }
    SnfWork { d: a, u, v, vinv }
}

/// Row echelon form by unimodular row operations, with optional transform T (T·m = H).
/// Pivots are positive and entries above a pivot are reduced into [0, pivot).
pub(crate) struct Echelon {
    pub h: Matrix,
    pub t: Option<Matrix>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub(crate) fn echelon(m: &Matrix, track: bool) -> Echelon {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut h = m.clone();
    let mut t = track.then(|| Matrix::identity(rows));
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        if r == rows {
            break;
        }
        let Some(first) = (r..rows).find(|&i| !h.get(i, col).is_zero()) else { continue };
        h.swap_rows(r, first);
        if let Some(t) = t.as_mut() {
            t.swap_rows(r, first);
        }
        for i in r + 1..rows {
            if h.get(i, col).is_zero() {
                continue;
            }
            let p = h.get(r, col).clone();
            let b = h.get(i, col).clone();
            if (&b % &p).is_zero() {
                let q = &b / &p;
                h.row_axpy(i, r, &q);
                if let Some(t) = t.as_mut() {
                    t.row_axpy(i, r, &q);
                }
                continue;
            }
            let (g, s, c) = egcd(&p, &b);
            let x = &p / &g;
            let y = -(&b / &g);
            h.combine_rows(r, i, &s, &c, &y, &x);
            if let Some(t) = t.as_mut() {
                t.combine_rows(r, i, &s, &c, &y, &x);
            }
        }
        if h.get(r, col).is_negative() {
            h.negate_row(r);
            if let Some(t) = t.as_mut() {
                t.negate_row(r);
            }
        }
        let p = h.get(r, col).clone();
        for i in 0..r {
            let q = h.get(i, col).div_floor(&p);
            if !q.is_zero() {
                h.row_axpy(i, r, &q);
                if let Some(t) = t.as_mut() {
                    t.row_axpy(i, r, &q);
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    Echelon { h, t, rank: r, pivots }
}

/// Hermite normal form basis (nonzero rows) of the row lattice of `m`.
pub fn hermite_rows(m: &Matrix) -> Matrix {
    let e = echelon(m, false);
    e.h.row_range(0, e.rank)
}

/// Basis (as columns) of the integer kernel {z : m·z = 0}.
pub fn integer_kernel(m: &Matrix) -> Matrix {
    let e = echelon(&m.transpose(), true);
    let t = e.t.unwrap();
    let n = m.ncols();
    let k = n - e.rank;
    let mut out = Matrix::zeros(n, k);
    for (c, i) in (e.rank..n).enumerate() {
        for j in 0..n {
            out.set(j, c, t.get(i, j).clone());
        }
    }
    out
}

/// Solves m·z = x over the integers for many right-hand sides with one factorization.
pub struct IntegerSolver {
    rows: usize,
    e: Matrix,
    t: Matrix,
    rank: usize,
    pivots: Vec<usize>,
}

impl IntegerSolver {
    pub fn new(m: &Matrix) -> Self {
        let ech = echelon(&m.transpose(), true);
        IntegerSolver { rows: m.nrows(), e: ech.h, t: ech.t.unwrap(), rank: ech.rank, pivots: ech.pivots }
    }

    pub fn solve(&self, x: &[Int]) -> Option<Vec<Int>> {
        assert_eq!(x.len(), self.rows);
        let mut resid = x.to_vec();
        let mut w = vec![Int::zero(); self.e.nrows()];
        for k in 0..self.rank {
            let pc = self.pivots[k];
            let piv = self.e.get(k, pc);
            let val = &resid[pc];
            if val.is_zero() {
                continue;
            }
            let (q, r) = val.div_rem(piv);
            if !r.is_zero() {
                return None;
            }
            for (j, rj) in resid.iter_mut().enumerate() {
                let c = self.e.get(k, j);
                if !c.is_zero() {
                    *rj -= &q * c;
                }
            }
            w[k] = q;
        }
        if resid.iter().any(|v| !v.is_zero()) {
            return None;
        }
        // z = T^T w
        let n = self.t.ncols();
        let mut z = vec![Int::zero(); n];
        for (k, wk) in w.iter().enumerate() {
            if wk.is_zero() {
                continue;
            }
            for (j, zj) in z.iter_mut().enumerate() {
                let c = self.t.get(k, j);
                if !c.is_zero() {
                    *zj += wk * c;
                }
            }
        }
        Some(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn egcd_signs() {
        let (g, s, t) = egcd(&Int::from(-4), &Int::from(6));
        assert_eq!(g, Int::from(2));
        assert_eq!(s * Int::from(-4) + t * Int::from(6), g);
    }

    #[test]
    fn kernel_of_row() {
        let m = Matrix::from_i64(1, 3, &[1, 2, 3]);
        let k = integer_kernel(&m);
        assert_eq!(k.ncols(), 2);
        assert!(m.mul(&k).is_zero());
    }

    #[test]
    fn solver_detects_non_divisible() {
        let m = Matrix::from_i64(1, 1, &[2]);
        let s = IntegerSolver::new(&m);
        assert!(s.solve(&[Int::from(3)]).is_none());
        assert_eq!(s.solve(&[Int::from(4)]), Some(vec![Int::from(2)]));
    }
}
