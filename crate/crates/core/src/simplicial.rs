//! Finite truncated simplicial sets with a cyclic group action: the circle, its
//! edgewise subdivisions, wedges along a free orbit, and the tensor of a Green
//! functor with the subdivided circle.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::boxtensor::{slot_map, BoxError, Factor, FlatBox};
use crate::green::GreenFunctor;
use crate::mackey::{MackeyChainComplex, MackeyError, MackeyMap};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimplicialError {
    #[error("truncation {have} is too low: need level {need}")]
    InsufficientTruncation { have: usize, need: usize },
    #[error("map is not simplicial at level {level}, element {element}")]
    NotSimplicial { level: usize, element: usize },
    #[error("map is not equivariant at level {level}, element {element}")]
    NotEquivariant { level: usize, element: usize },
    #[error("map is not injective at level {level}")]
    NotInjective { level: usize },
    #[error("action is not free at level {level}")]
    NotFreeAction { level: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Box(#[from] BoxError),
    #[error(transparent)]
    Mackey(#[from] MackeyError),
}

/// A simplicial set stored up to level `top`, with a C_order action and optionally a cyclic operator.
///
/// `faces[n][i]` maps level n to n−1 (empty for n = 0); `degens[n][i]` maps level n to n+1
/// and is present for n < top.
#[derive(Clone, Debug)]
pub struct SimplicialGSet {
    order: u32,
    sizes: Vec<usize>,
    faces: Vec<Vec<Vec<usize>>>,
    degens: Vec<Vec<Vec<usize>>>,
    action: Vec<Vec<usize>>,
    cyclic: Option<Vec<Vec<usize>>>,
    labels: Vec<Vec<String>>,
}

fn power_label(j: usize) -> String {
    match j {
        0 => "1".to_string(),
        1 => "γ".to_string(),
        _ => format!("γ^{j}"),
    }
}

impl SimplicialGSet {
    pub fn top(&self) -> usize {
        self.sizes.len() - 1
    }
    pub fn order(&self) -> u32 {
        self.order
    }
    pub fn size(&self, n: usize) -> usize {
        self.sizes[n]
    }
    pub fn face(&self, n: usize, i: usize, x: usize) -> usize {
        self.faces[n][i][x]
    }
    pub fn degen(&self, n: usize, i: usize, x: usize) -> usize {
        self.degens[n][i][x]
    }
    pub fn has_degens(&self, n: usize) -> bool {
        n < self.top()
    }
    pub fn act(&self, n: usize, x: usize) -> usize {
        self.action[n][x]
    }
    pub fn cyclic(&self, n: usize, x: usize) -> Option<usize> {
        self.cyclic.as_ref().map(|c| c[n][x])
    }
    pub fn label(&self, n: usize, x: usize) -> &str {
        &self.labels[n][x]
    }
    pub fn index_of(&self, n: usize, label: &str) -> Option<usize> {
        self.labels[n].iter().position(|l| l == label)
    }

    /// Replaces one entry of a face table (for exercising the validators).
    pub fn override_face(&mut self, n: usize, i: usize, x: usize, value: usize) {
        self.faces[n][i][x] = value;
    }

    /// Keeps levels 0..=top.
    pub fn truncated(&self, top: usize) -> SimplicialGSet {
        let mut s = self.clone();
        s.sizes.truncate(top + 1);
        s.faces.truncate(top + 1);
        s.degens.truncate(top);
        s.action.truncate(top + 1);
        s.labels.truncate(top + 1);
        if let Some(c) = s.cyclic.as_mut() {
            c.truncate(top + 1);
        }
        s
    }

    /// Nondegenerate simplices per level (not in the image of any degeneracy).
    pub fn nondegenerate(&self) -> Vec<Vec<usize>> {
        (0..=self.top())
            .map(|n| {
                let mut hit = vec![false; self.sizes[n]];
                if n > 0 {
                    for table in &self.degens[n - 1] {
                        for &y in table {
                            hit[y] = true;
                        }
                    }
                }
                (0..self.sizes[n]).filter(|&x| !hit[x]).collect()
            })
            .collect()
    }

    /// Labels of the nondegenerate simplices, per level.
    pub fn census(&self) -> Vec<Vec<String>> {
        self.nondegenerate()
            .into_iter()
            .enumerate()
            .map(|(n, xs)| xs.into_iter().map(|x| self.labels[n][x].clone()).collect())
            .collect()
    }

    /// Writes x as s_{i1} s_{i2} … (root); returns (root level, root, [i1, i2, …]).
    pub fn decompose(&self, n: usize, x: usize) -> (usize, usize, Vec<usize>) {
        let mut ops = Vec::new();
        let (mut level, mut cur) = (n, x);
        'outer: while level > 0 {
            for (i, table) in self.degens[level - 1].iter().enumerate() {
                if let Some(y) = table.iter().position(|&v| v == cur) {
                    ops.push(i);
                    cur = y;
                    level -= 1;
                    continue 'outer;
                }
            }
            break;
        }
        (level, cur, ops)
    }

    fn is_free_level(&self, n: usize) -> bool {
        (0..self.sizes[n]).all(|x| {
            let mut y = x;
            for _ in 1..self.order {
                y = self.action[n][y];
                if y == x {
                    return false;
                }
            }
            true
        })
    }

    /// Orbit representatives (smallest index of each orbit), in increasing order.
    pub fn orbit_representatives(&self, n: usize) -> Vec<usize> {
        let mut seen = vec![false; self.sizes[n]];
        let mut reps = Vec::new();
        for x in 0..self.sizes[n] {
            if seen[x] {
                continue;
            }
            reps.push(x);
            let mut y = x;
            loop {
                seen[y] = true;
                y = self.action[n][y];
                if y == x {
                    break;
                }
            }
        }
        reps
    }

    /// Writes x as γ^t · reps[s]; returns (s, t).
    pub fn orbit_coordinates(&self, n: usize, x: usize) -> (usize, u32) {
        let reps = self.orbit_representatives(n);
        for (s, &r) in reps.iter().enumerate() {
            let mut y = r;
            for t in 0..self.order {
                if y == x {
                    return (s, t);
                }
                y = self.action[n][y];
            }
        }
        unreachable!("every element lies in some orbit")
    }
}

/// The simplicial circle: level n = {1, γ, …, γ^n}, trivial action, with the cyclic operator t.
pub fn standard_circle(top: usize) -> SimplicialGSet {
    let mut s = SimplicialGSet {
        order: 1,
        sizes: Vec::new(),
        faces: Vec::new(),
        degens: Vec::new(),
        action: Vec::new(),
        cyclic: Some(Vec::new()),
        labels: Vec::new(),
    };
    for n in 0..=top {
        s.sizes.push(n + 1);
        let mut faces = Vec::new();
        if n > 0 {
            for i in 0..=n {
                let f: Vec<usize> = (0..=n)
                    .map(|j| {
                        if i < n {
                            if j <= i {
                                j
                            } else {
                                j - 1
                            }
                        } else if j < n {
                            j
                        } else {
                            0
                        }
                    })
                    .collect();
                faces.push(f);
            }
        }
        s.faces.push(faces);
        if n < top {
            s.degens.push((0..=n).map(|i| (0..=n).map(|j| if j <= i { j } else { j + 1 }).collect()).collect());
        }
        s.action.push((0..=n).collect());
        s.cyclic.as_mut().unwrap().push((0..=n).map(|j| (j + 1) % (n + 1)).collect());
        s.labels.push((0..=n).map(power_label).collect());
    }
    s
}

/// The r-fold edgewise subdivision: level n is X_{(n+1)r−1}.
///
/// A trivially acted-on X with a cyclic operator gets the C_r-action t^{n+1}; otherwise X's action is kept.
pub fn edgewise_subdivision(x: &SimplicialGSet, r: usize) -> Result<SimplicialGSet, SimplicialError> {
    if r == 0 {
        return Err(SimplicialError::Shape("subdivision index must be positive".into()));
    }
    if x.top() + 1 < r {
        return Err(SimplicialError::InsufficientTruncation { have: x.top(), need: r - 1 });
    }
    let top = (x.top() + 1) / r - 1;
    let rotate = x.order == 1 && x.cyclic.is_some();
    let mut s = SimplicialGSet {
        order: if rotate { r as u32 } else { x.order },
        sizes: Vec::new(),
        faces: Vec::new(),
        degens: Vec::new(),
        action: Vec::new(),
        cyclic: x.cyclic.as_ref().map(|_| Vec::new()),
        labels: Vec::new(),
    };
    for n in 0..=top {
        let l = (n + 1) * r - 1;
        let size = x.sizes[l];
        s.sizes.push(size);
        s.labels.push(x.labels[l].clone());
        let mut faces = Vec::new();
        if n > 0 {
            for i in 0..=n {
                faces.push(
                    (0..size)
                        .map(|e| {
                            let (mut level, mut v) = (l, e);
                            for m in (0..r).rev() {
                                v = x.faces[level][i + m * (n + 1)][v];
                                level -= 1;
                            }
                            v
                        })
                        .collect(),
                );
            }
        }
        s.faces.push(faces);
        if n < top {
            let mut degens = Vec::new();
            for i in 0..=n {
                degens.push(
                    (0..size)
                        .map(|e| {
                            let (mut level, mut v) = (l, e);
                            for m in 0..r {
                                v = x.degens[level][i + m * (n + 2)][v];
                                level += 1;
                            }
                            v
                        })
                        .collect(),
                );
            }
            s.degens.push(degens);
        }
        if rotate {
            let t = &x.cyclic.as_ref().unwrap()[l];
            s.action.push(
                (0..size)
                    .map(|e| {
                        let mut v = e;
                        for _ in 0..=n {
                            v = t[v];
                        }
                        v
                    })
                    .collect(),
            );
        } else {
            s.action.push(x.action[l].clone());
        }
        if let Some(c) = s.cyclic.as_mut() {
            c.push(x.cyclic.as_ref().unwrap()[l].clone());
        }
    }
    Ok(s)
}

/// pS¹ = sd_p(S¹) up to level `top`.
pub fn p_circle(p: u32, top: usize) -> SimplicialGSet {
    let p = p as usize;
    edgewise_subdivision(&standard_circle((top + 1) * p - 1), p).expect("circle is deep enough")
}

/// The free orbit C_p as a constant simplicial set.
pub fn orbit(p: u32, top: usize) -> SimplicialGSet {
    let n = p as usize;
    let id: Vec<usize> = (0..n).collect();
    SimplicialGSet {
        order: p,
        sizes: vec![n; top + 1],
        faces: (0..=top).map(|k| vec![id.clone(); if k == 0 { 0 } else { k + 1 }]).collect(),
        degens: (0..top).map(|k| vec![id.clone(); k + 1]).collect(),
        action: vec![(0..n).map(|g| (g + 1) % n).collect(); top + 1],
        cyclic: None,
        labels: vec![(0..n).map(|g| format!("g{g}")).collect(); top + 1],
    }
}

/// One failed simplicial identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityFailure {
    pub identity: String,
    pub level: usize,
    pub element: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub levels_checked: usize,
    pub failures: Vec<IdentityFailure>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every simplicial identity, equivariance of all structure maps, and the order of the action.
pub fn identity_suite(x: &SimplicialGSet) -> IdentityReport {
    let mut failures: BTreeMap<String, IdentityFailure> = BTreeMap::new();
    let mut fail = |id: String, level: usize, e: usize, x: &SimplicialGSet| {
        failures.entry(id.clone()).or_insert(IdentityFailure { identity: id, level, element: x.labels[level][e].clone() });
    };
    let top = x.top();
    for n in 0..=top {
        for e in 0..x.sizes[n] {
            // d_i d_j = d_{j−1} d_i for i < j
            if n >= 2 {
                for j in 0..=n {
                    for i in 0..j {
                        let a = x.faces[n - 1][i][x.faces[n][j][e]];
                        let b = x.faces[n - 1][j - 1][x.faces[n][i][e]];
                        if a != b {
                            fail(format!("d{i} d{j} = d{} d{i}", j - 1), n, e, x);
                        }
                    }
                }
            }
            if n < top {
                for j in 0..=n {
                    let sj = x.degens[n][j][e];
                    for i in 0..=n + 1 {
                        let lhs = x.faces[n + 1][i][sj];
                        let rhs = if i < j {
                            x.degens[n - 1][j - 1][x.faces[n][i][e]]
                        } else if i == j || i == j + 1 {
                            e
                        } else {
                            x.degens[n - 1][j][x.faces[n][i - 1][e]]
                        };
                        if lhs != rhs {
                            fail(format!("d{i} s{j}"), n, e, x);
                        }
                    }
                }
            }
            if n + 1 < top {
                for j in 0..=n {
                    for i in 0..=j {
                        let a = x.degens[n + 1][i][x.degens[n][j][e]];
                        let b = x.degens[n + 1][j + 1][x.degens[n][i][e]];
                        if a != b {
                            fail(format!("s{i} s{j} = s{} s{i}", j + 1), n, e, x);
                        }
                    }
                }
            }
            let g = x.action[n][e];
            if n > 0 {
                for i in 0..=n {
                    if x.faces[n][i][g] != x.action[n - 1][x.faces[n][i][e]] {
                        fail(format!("γ d{i} = d{i} γ"), n, e, x);
                    }
                }
            }
            if n < top {
                for i in 0..=n {
                    if x.degens[n][i][g] != x.action[n + 1][x.degens[n][i][e]] {
                        fail(format!("γ s{i} = s{i} γ"), n, e, x);
                    }
                }
            }
            let mut v = e;
            for _ in 0..x.order {
                v = x.action[n][v];
            }
            if v != e {
                fail("γ^order = id".into(), n, e, x);
            }
        }
    }
    IdentityReport { levels_checked: top + 1, failures: failures.into_values().collect() }
}

/// Checks d_n = d_0 ∘ t on every level with faces.
pub fn verify_last_face_identity(x: &SimplicialGSet) -> IdentityReport {
    let mut failures = Vec::new();
    if x.cyclic.is_some() {
        for n in 1..=x.top() {
            if let Some(e) = (0..x.sizes[n]).find(|&e| x.faces[n][n][e] != x.faces[n][0][x.cyclic(n, e).unwrap()]) {
                failures.push(IdentityFailure { identity: format!("d{n} = d0 t"), level: n, element: x.labels[n][e].clone() });
            }
        }
    } else {
        failures.push(IdentityFailure { identity: "cyclic operator present".into(), level: 0, element: String::new() });
    }
    IdentityReport { levels_checked: x.top() + 1, failures }
}

/// A levelwise map of simplicial sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMap {
    pub maps: Vec<Vec<usize>>,
}

impl SimplicialMap {
    pub fn identity(x: &SimplicialGSet) -> Self {
        SimplicialMap { maps: x.sizes.iter().map(|&n| (0..n).collect()).collect() }
    }

    pub fn after(&self, other: &SimplicialMap) -> SimplicialMap {
        SimplicialMap {
            maps: other.maps.iter().zip(&self.maps).map(|(o, s)| o.iter().map(|&v| s[v]).collect()).collect(),
        }
    }

    pub fn apply(&self, n: usize, x: usize) -> usize {
        self.maps[n][x]
    }

    /// Commutes with faces and degeneracies.
    pub fn check_simplicial(&self, src: &SimplicialGSet, tgt: &SimplicialGSet) -> Result<(), SimplicialError> {
        if self.maps.len() != src.sizes.len() || src.top() != tgt.top() {
            return Err(SimplicialError::Shape("truncations differ".into()));
        }
        for n in 0..=src.top() {
            if self.maps[n].len() != src.sizes[n] || self.maps[n].iter().any(|&v| v >= tgt.sizes[n]) {
                return Err(SimplicialError::Shape(format!("level {n} has the wrong size")));
            }
        }
        for n in 0..=src.top() {
            for e in 0..src.sizes[n] {
                let fe = self.maps[n][e];
                if n > 0 && (0..=n).any(|i| self.maps[n - 1][src.faces[n][i][e]] != tgt.faces[n][i][fe]) {
                    return Err(SimplicialError::NotSimplicial { level: n, element: e });
                }
                if n < src.top() && (0..=n).any(|i| self.maps[n + 1][src.degens[n][i][e]] != tgt.degens[n][i][fe]) {
                    return Err(SimplicialError::NotSimplicial { level: n, element: e });
                }
            }
        }
        Ok(())
    }

    pub fn first_nonequivariant(&self, src: &SimplicialGSet, tgt: &SimplicialGSet) -> Option<(usize, usize)> {
        for n in 0..=src.top() {
            for e in 0..src.sizes[n] {
                if self.maps[n][src.action[n][e]] != tgt.action[n][self.maps[n][e]] {
                    return Some((n, e));
                }
            }
        }
        None
    }

    pub fn check(&self, src: &SimplicialGSet, tgt: &SimplicialGSet) -> Result<(), SimplicialError> {
        self.check_simplicial(src, tgt)?;
        match self.first_nonequivariant(src, tgt) {
            Some((level, element)) => Err(SimplicialError::NotEquivariant { level, element }),
            None => Ok(()),
        }
    }

    pub fn is_bijective(&self, src: &SimplicialGSet, tgt: &SimplicialGSet) -> bool {
        self.maps.iter().enumerate().all(|(n, m)| {
            let mut seen = vec![false; tgt.sizes[n]];
            m.len() == tgt.sizes[n] && m.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
        }) && src.sizes.len() == tgt.sizes.len()
    }
}

/// Extends an assignment on nondegenerate simplices to all simplices through degeneracies.
pub fn extend_from_nondegenerate(
    src: &SimplicialGSet,
    tgt: &SimplicialGSet,
    image: &dyn Fn(usize, usize) -> Option<usize>,
) -> Result<SimplicialMap, SimplicialError> {
    let mut maps = Vec::new();
    for n in 0..=src.top() {
        let mut level = Vec::with_capacity(src.sizes[n]);
        for e in 0..src.sizes[n] {
            let (m, root, ops) = src.decompose(n, e);
            let mut v = image(m, root).ok_or(SimplicialError::NotSimplicial { level: m, element: root })?;
            let mut l = m;
            for &i in ops.iter().rev() {
                v = tgt.degens[l][i][v];
                l += 1;
            }
            level.push(v);
        }
        maps.push(level);
    }
    let f = SimplicialMap { maps };
    f.check_simplicial(src, tgt)?;
    Ok(f)
}

/// The inclusion of C_p sending the generator orbit to the orbit of a vertex (total degeneracies above).
pub fn orbit_inclusion(x: &SimplicialGSet, vertex: usize) -> Result<SimplicialMap, SimplicialError> {
    let p = x.order as usize;
    let mut maps = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(p);
    let mut v = vertex;
    for _ in 0..p {
        cur.push(v);
        v = x.action[0][v];
    }
    for n in 0..=x.top() {
        if n > 0 {
            cur = cur.iter().map(|&e| x.degens[n - 1][0][e]).collect();
        }
        maps.push(cur.clone());
    }
    let f = SimplicialMap { maps };
    let o = orbit(x.order, x.top());
    f.check(&o, x)?;
    for (n, m) in f.maps.iter().enumerate() {
        let mut s = m.clone();
        s.sort();
        s.dedup();
        if s.len() != m.len() {
            return Err(SimplicialError::NotInjective { level: n });
        }
    }
    Ok(f)
}

/// X ∨_{C_p} Y: levelwise pushout along two inclusions of the free orbit.
#[derive(Clone, Debug)]
pub struct Wedge {
    pub set: SimplicialGSet,
    pub left: SimplicialMap,
    pub right: SimplicialMap,
    pub base: SimplicialMap,
    right_elems: Vec<Vec<usize>>,
    right_base: Vec<Vec<usize>>,
}

impl Wedge {
    /// The map out of the wedge determined by maps on both pieces that agree on the orbit.
    pub fn induced_map(
        &self,
        from_left: &SimplicialMap,
        from_right: &SimplicialMap,
        tgt: &SimplicialGSet,
    ) -> Result<SimplicialMap, SimplicialError> {
        let mut maps = Vec::new();
        for n in 0..=self.set.top() {
            let mut level: Vec<usize> = from_left.maps[n].clone();
            level.extend(self.right_elems[n].iter().map(|&y| from_right.maps[n][y]));
            maps.push(level);
        }
        let f = SimplicialMap { maps };
        for n in 0..=self.set.top() {
            for (g, &w) in self.base.maps[n].iter().enumerate() {
                if from_right.maps[n][self.right_base[n][g]] != from_left.maps[n][w] {
                    return Err(SimplicialError::Shape("maps disagree on the orbit".into()));
                }
            }
        }
        f.check(&self.set, tgt)?;
        Ok(f)
    }
}

pub fn wedge_over_orbit(
    x: &SimplicialGSet,
    f: &SimplicialMap,
    y: &SimplicialGSet,
    g: &SimplicialMap,
) -> Result<Wedge, SimplicialError> {
    if x.top() != y.top() || x.order != y.order {
        return Err(SimplicialError::Shape("pieces differ in truncation or group".into()));
    }
    let o = orbit(x.order, x.top());
    for (m, t) in [(f, x), (g, y)] {
        m.check(&o, t)?;
        for (n, level) in m.maps.iter().enumerate() {
            let mut s = level.clone();
            s.sort();
            s.dedup();
            if s.len() != level.len() {
                return Err(SimplicialError::NotInjective { level: n });
            }
        }
    }
    let top = x.top();
    let mut right_maps = Vec::new();
    let mut right_elems = Vec::new();
    let mut sizes = Vec::new();
    let mut labels = Vec::new();
    for n in 0..=top {
        let mut rm = vec![usize::MAX; y.sizes[n]];
        for (c, &yy) in g.maps[n].iter().enumerate() {
            rm[yy] = f.maps[n][c];
        }
        let mut extra = Vec::new();
        let mut next = x.sizes[n];
        for (yy, slot) in rm.iter_mut().enumerate() {
            if *slot == usize::MAX {
                *slot = next;
                next += 1;
                extra.push(yy);
            }
        }
        let mut lab: Vec<String> = x.labels[n].iter().map(|l| format!("ℓ:{l}")).collect();
        lab.extend(extra.iter().map(|&yy| format!("r:{}", y.labels[n][yy])));
        sizes.push(next);
        labels.push(lab);
        right_maps.push(rm);
        right_elems.push(extra);
    }
    let lift = |n: usize, from_x: bool, e: usize| if from_x { e } else { right_maps[n][e] };
    let build = |n: usize, w: usize, fx: &dyn Fn(usize) -> usize, fy: &dyn Fn(usize) -> usize, to: usize| {
        if w < x.sizes[n] {
            lift(to, true, fx(w))
        } else {
            lift(to, false, fy(right_elems[n][w - x.sizes[n]]))
        }
    };
    let mut faces = Vec::new();
    let mut degens = Vec::new();
    let mut action = Vec::new();
    for n in 0..=top {
        let mut fs = Vec::new();
        if n > 0 {
            for i in 0..=n {
                fs.push((0..sizes[n]).map(|w| build(n, w, &|e| x.faces[n][i][e], &|e| y.faces[n][i][e], n - 1)).collect());
            }
        }
        faces.push(fs);
        if n < top {
            let mut ds = Vec::new();
            for i in 0..=n {
                ds.push((0..sizes[n]).map(|w| build(n, w, &|e| x.degens[n][i][e], &|e| y.degens[n][i][e], n + 1)).collect());
            }
            degens.push(ds);
        }
        action.push((0..sizes[n]).map(|w| build(n, w, &|e| x.action[n][e], &|e| y.action[n][e], n)).collect());
    }
    let set = SimplicialGSet { order: x.order, sizes: sizes.clone(), faces, degens, action, cyclic: None, labels };
    let left = SimplicialMap { maps: x.sizes.iter().map(|&s| (0..s).collect()).collect() };
    let right = SimplicialMap { maps: right_maps };
    let base = left.after(f);
    let report = identity_suite(&set);
    if !report.passed() {
        return Err(SimplicialError::Shape(format!("pushout fails {}", report.failures[0].identity)));
    }
    left.check(x, &set)?;
    right.check(y, &set)?;
    let right_base = g.maps.clone();
    Ok(Wedge { set, left, right, base, right_elems, right_base })
}

/// Quotient by a levelwise canonical-representative map; structure maps must respect it.
pub fn quotient(x: &SimplicialGSet, canon: &[Vec<usize>]) -> Result<(SimplicialGSet, SimplicialMap), SimplicialError> {
    let top = x.top();
    let mut index = Vec::new();
    let mut reps = Vec::new();
    for n in 0..=top {
        let mut idx = vec![usize::MAX; x.sizes[n]];
        let mut r = Vec::new();
        for e in 0..x.sizes[n] {
            let c = canon[n][e];
            if canon[n][c] != c {
                return Err(SimplicialError::Shape(format!("representative map is not idempotent at level {n}")));
            }
            if idx[c] == usize::MAX {
                idx[c] = r.len();
                r.push(c);
            }
        }
        let idx: Vec<usize> = (0..x.sizes[n]).map(|e| idx[canon[n][e]]).collect();
        index.push(idx);
        reps.push(r);
    }
    let proj = SimplicialMap { maps: index.clone() };
    let respects = |n: usize, m: usize, table: &[usize]| (0..x.sizes[n]).all(|e| index[m][table[e]] == index[m][table[canon[n][e]]]);
    for n in 0..=top {
        let ok = (n == 0 || x.faces[n].iter().all(|t| respects(n, n - 1, t)))
            && (n == top || x.degens[n].iter().all(|t| respects(n, n + 1, t)))
            && respects(n, n, &x.action[n]);
        if !ok {
            return Err(SimplicialError::Shape(format!("identification is not compatible at level {n}")));
        }
    }
    let push = |n: usize, m: usize, table: &[usize]| reps[n].iter().map(|&r| index[m][table[r]]).collect::<Vec<usize>>();
    let q = SimplicialGSet {
        order: x.order,
        sizes: reps.iter().map(Vec::len).collect(),
        faces: (0..=top).map(|n| if n == 0 { Vec::new() } else { x.faces[n].iter().map(|t| push(n, n - 1, t)).collect() }).collect(),
        degens: (0..top).map(|n| x.degens[n].iter().map(|t| push(n, n + 1, t)).collect()).collect(),
        action: (0..=top).map(|n| push(n, n, &x.action[n])).collect(),
        cyclic: None,
        labels: (0..=top).map(|n| reps[n].iter().map(|&r| format!("[{}]", x.labels[n][r])).collect()).collect(),
    };
    proj.check(x, &q)?;
    Ok((q, proj))
}

/// Results of the unit, commutativity and associativity diagrams for the fold map of pS¹.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoldReport {
    pub p: u32,
    pub levels: usize,
    pub wedge_nondegenerate: Vec<usize>,
    pub wedge_associator_iso: bool,
    pub left_unit: bool,
    pub right_unit: bool,
    pub commutative: bool,
    pub associative: bool,
}

impl FoldReport {
    pub fn passed(&self) -> bool {
        self.wedge_associator_iso && self.left_unit && self.right_unit && self.commutative && self.associative
    }
}

pub fn fold_diagrams(p: u32, top: usize) -> Result<FoldReport, SimplicialError> {
    let x = p_circle(p, top);
    let o = orbit(p, top);
    let f = orbit_inclusion(&x, 0)?;
    let id_x = SimplicialMap::identity(&x);
    let id_o = SimplicialMap::identity(&o);
    let w = wedge_over_orbit(&x, &f, &x, &f)?;
    let fold = w.induced_map(&id_x, &id_x, &x)?;

    let ur = wedge_over_orbit(&x, &f, &o, &id_o)?;
    let ur_iso = ur.induced_map(&id_x, &f, &x)?;
    let id_eta = ur.induced_map(&w.left, &w.right.after(&f), &w.set)?;
    let right_unit = ur_iso.is_bijective(&ur.set, &x) && fold.after(&id_eta) == ur_iso;

    let ul = wedge_over_orbit(&o, &id_o, &x, &f)?;
    let ul_iso = ul.induced_map(&f, &id_x, &x)?;
    let eta_id = ul.induced_map(&w.left.after(&f), &w.right, &w.set)?;
    let left_unit = ul_iso.is_bijective(&ul.set, &x) && fold.after(&eta_id) == ul_iso;

    let tau = w.induced_map(&w.right, &w.left, &w.set)?;
    let commutative = fold.after(&tau) == fold;

    let t = wedge_over_orbit(&w.set, &w.base, &x, &f)?;
    let fold_id = t.induced_map(&w.left.after(&fold), &w.right, &w.set)?;
    let id_fold = t.induced_map(&SimplicialMap::identity(&w.set), &w.right, &w.set)?;
    let associative = fold.after(&fold_id) == fold.after(&id_fold);

    let t2 = wedge_over_orbit(&x, &f, &w.set, &w.base)?;
    let inner = w.induced_map(&t2.left, &t2.right.after(&w.left), &t2.set)?;
    let assoc = t.induced_map(&inner, &t2.right.after(&w.right), &t2.set)?;
    let wedge_associator_iso = assoc.is_bijective(&t.set, &t2.set);

    Ok(FoldReport {
        p,
        levels: top + 1,
        wedge_nondegenerate: w.set.nondegenerate().iter().map(Vec::len).collect(),
        wedge_associator_iso,
        left_unit,
        right_unit,
        commutative,
        associative,
    })
}

/// Counts simplicial maps pS¹ → C_p and the equivariant ones among them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounitReport {
    pub p: u32,
    pub simplicial_maps: usize,
    pub equivariant_maps: usize,
}

pub fn counit_search(p: u32, top: usize) -> CounitReport {
    let x = p_circle(p, top);
    let o = orbit(p, top);
    let vertex = |n: usize, mut e: usize| {
        for l in (1..=n).rev() {
            e = x.faces[l][0][e];
        }
        e
    };
    let nv = x.sizes[0];
    let (mut simplicial_maps, mut equivariant_maps) = (0, 0);
    let mut assign = vec![0usize; nv];
    loop {
        let f = SimplicialMap {
            maps: (0..=top).map(|n| (0..x.sizes[n]).map(|e| assign[vertex(n, e)]).collect()).collect(),
        };
        if f.check_simplicial(&x, &o).is_ok() {
            simplicial_maps += 1;
            if f.first_nonequivariant(&x, &o).is_none() {
                equivariant_maps += 1;
            }
        }
        match assign.iter().position(|&a| a + 1 < p as usize) {
            Some(i) => {
                assign[i] += 1;
                assign[..i].iter_mut().for_each(|a| *a = 0);
            }
            None => break,
        }
    }
    CounitReport { p, simplicial_maps, equivariant_maps }
}

/// Where the generator sends one nondegenerate cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CellMove {
    pub level: usize,
    pub from: String,
    pub to: String,
}

/// Verdict on collapsing the subdivided circle sd_2(pS¹) onto the wedge pS¹ ∨_{C_p} pS¹.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PinchVerdict {
    pub p: u32,
    /// The collapse is a (non-equivariant) isomorphism onto the wedge.
    pub pinch_is_isomorphism: bool,
    /// How the C_p action inherited from sd_2(pS¹) moves the nondegenerate cells of the wedge.
    pub image_action: Vec<CellMove>,
    /// The wedge's own action on the same cells.
    pub wedge_action: Vec<CellMove>,
    /// s with u_j ↦ u_{j+s} on wedge vertices, if the action is a rotation there.
    pub image_vertex_shift: Option<u32>,
    pub wedge_vertex_shift: Option<u32>,
    /// First nondegenerate cell where the two actions disagree.
    pub witness: Option<String>,
    pub equivariant: bool,
    /// Whether any simplicial isomorphism intertwines the two actions.
    pub equivariant_iso_exists: bool,
}

fn walk(x: &SimplicialGSet) -> (Vec<usize>, Vec<usize>) {
    let edges: Vec<usize> = x.nondegenerate()[1].clone();
    let mut verts = vec![0usize];
    let mut path = Vec::new();
    for _ in 0..edges.len() {
        let v = *verts.last().unwrap();
        let e = *edges.iter().find(|&&e| x.faces[1][1][e] == v && !path.contains(&e)).expect("circle has an outgoing edge");
        path.push(e);
        verts.push(x.faces[1][0][e]);
    }
    verts.pop();
    (verts, path)
}

fn vertex_shift(verts: &[usize], action: &[usize]) -> Option<u32> {
    let p = verts.len();
    (0..p).find(|&s| (0..p).all(|j| action[verts[j]] == verts[(j + s) % p])).map(|s| s as u32)
}

/// Searches the 1-skeleton automorphisms α of w with α∘a = b∘α.
fn intertwiner_exists(w: &SimplicialGSet, a: &[Vec<usize>], b: &[Vec<usize>]) -> bool {
    use itertools::Itertools;
    let nv = w.sizes[0];
    let edges = w.nondegenerate()[1].clone();
    let ends = |e: usize| (w.faces[1][1][e], w.faces[1][0][e]);
    let pos = |e: usize| edges.iter().position(|&x| x == e).expect("actions preserve nondegenerate edges");
    for perm in (0..nv).permutations(nv) {
        if (0..nv).any(|v| perm[a[0][v]] != b[0][perm[v]]) {
            continue;
        }
        let candidates: Vec<Vec<usize>> = edges
            .iter()
            .map(|&e| {
                let (s, t) = ends(e);
                (0..edges.len()).filter(|&c| ends(edges[c]) == (perm[s], perm[t])).collect()
            })
            .collect();
        if candidates.iter().any(Vec::is_empty) {
            continue;
        }
        for choice in candidates.iter().map(|c| c.iter().copied()).multi_cartesian_product() {
            if choice.iter().unique().count() == edges.len()
                && (0..edges.len()).all(|i| edges[choice[pos(a[1][edges[i]])]] == b[1][edges[choice[i]]])
            {
                return true;
            }
        }
    }
    false
}

pub fn pinch_candidate(p: u32, top: usize) -> Result<PinchVerdict, SimplicialError> {
    let pu = p as usize;
    let top = top.max(1);
    let y = p_circle(p, 2 * top + 1);
    let z = edgewise_subdivision(&y, 2)?;
    let yk = y.truncated(top);
    let f = orbit_inclusion(&yk, 0)?;
    let w = wedge_over_orbit(&yk, &f, &yk, &f)?;

    // identify the antipodal vertices of sd_2(pS¹) and their total degeneracies
    let total = |n: usize, v: usize| (0..n).fold(v, |e, l| z.degens[l][0][e]);
    let mut canon: Vec<Vec<usize>> = (0..=top).map(|n| (0..z.sizes[n]).collect()).collect();
    for n in 0..=top {
        for v in pu..2 * pu {
            canon[n][total(n, v)] = total(n, v - pu);
        }
    }
    let (q, proj) = quotient(&z, &canon)?;

    let (zv, ze) = walk(&z);
    let (yv, ye) = walk(&yk);
    let mut image: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (j, &v) in zv.iter().enumerate() {
        image.insert((0, proj.maps[0][v]), w.left.maps[0][yv[j % pu]]);
    }
    for (j, &e) in ze.iter().enumerate() {
        let target = if j < pu { w.left.maps[1][ye[j]] } else { w.right.maps[1][ye[j - pu]] };
        image.insert((1, proj.maps[1][e]), target);
    }
    let phi = extend_from_nondegenerate(&q, &w.set, &|n, e| image.get(&(n, e)).copied())?;
    let pinch_is_isomorphism = phi.is_bijective(&q, &w.set);
    if !pinch_is_isomorphism {
        return Err(SimplicialError::Shape("pinch is not a bijection onto the wedge".into()));
    }
    let inverse: Vec<Vec<usize>> = phi
        .maps
        .iter()
        .map(|m| {
            let mut inv = vec![0; m.len()];
            for (i, &v) in m.iter().enumerate() {
                inv[v] = i;
            }
            inv
        })
        .collect();
    let induced: Vec<Vec<usize>> =
        (0..=top).map(|n| (0..w.set.sizes[n]).map(|e| phi.maps[n][q.action[n][inverse[n][e]]]).collect()).collect();

    let nondeg = w.set.nondegenerate();
    let describe = |act: &[Vec<usize>]| {
        let mut out = Vec::new();
        for n in 0..=1 {
            for &e in &nondeg[n] {
                out.push(CellMove { level: n, from: w.set.labels[n][e].clone(), to: w.set.labels[n][act[n][e]].clone() });
            }
        }
        out
    };
    let witness = (0..=1)
        .flat_map(|n| nondeg[n].iter().map(move |&e| (n, e)))
        .find(|&(n, e)| induced[n][e] != w.set.action[n][e])
        .map(|(n, e)| w.set.labels[n][e].clone());
    let equivariant = (0..=top).all(|n| induced[n] == w.set.action[n]);
    // vertices in orbit order, so the wedge's own action is the unit shift
    let mut wverts = vec![w.left.maps[0][yv[0]]];
    for _ in 1..pu {
        wverts.push(w.set.action[0][*wverts.last().unwrap()]);
    }
    Ok(PinchVerdict {
        p,
        pinch_is_isomorphism,
        image_action: describe(&induced),
        wedge_action: describe(&w.set.action),
        image_vertex_shift: vertex_shift(&wverts, &induced[0]),
        wedge_vertex_shift: vertex_shift(&wverts, &w.set.action[0]),
        witness,
        equivariant,
        equivariant_iso_exists: intertwiner_exists(&w.set, &induced, &w.set.action),
    })
}

/// A truncated simplicial Mackey functor whose levels are box powers.
#[derive(Clone, Debug)]
pub struct SimplicialMackey {
    pub levels: Vec<FlatBox>,
    /// faces[k][i] : level k → level k−1
    pub faces: Vec<Vec<MackeyMap>>,
    /// degens[k][i] : level k → level k+1
    pub degens: Vec<Vec<MackeyMap>>,
}

fn maps_identical(a: &MackeyMap, b: &MackeyMap) -> bool {
    a.f_top().matrix() == b.f_top().matrix()
        && a.f_bot().matrix() == b.f_bot().matrix()
        && a.source().canonical() == b.source().canonical()
        && a.target().canonical() == b.target().canonical()
}

impl SimplicialMackey {
    pub fn top(&self) -> usize {
        self.levels.len() - 1
    }

    /// Same presentations and the same matrices, entry for entry.
    pub fn identical(&self, other: &SimplicialMackey) -> bool {
        let same = |a: &[Vec<MackeyMap>], b: &[Vec<MackeyMap>]| {
            a.len() == b.len()
                && a.iter().zip(b).all(|(x, y)| x.len() == y.len() && x.iter().zip(y).all(|(f, g)| maps_identical(f, g)))
        };
        self.levels.len() == other.levels.len() && same(&self.faces, &other.faces) && same(&self.degens, &other.degens)
    }

    /// Names of the simplicial identities that fail (up to relations).
    pub fn failed_identities(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let top = self.top();
        for n in 2..=top {
            for j in 0..=n {
                for i in 0..j {
                    if !self.faces[n - 1][i].after(&self.faces[n][j]).equals(&self.faces[n - 1][j - 1].after(&self.faces[n][i])) {
                        bad.push(format!("d{i} d{j} at level {n}"));
                    }
                }
            }
        }
        for n in 0..top {
            for j in 0..=n {
                let sj = &self.degens[n][j];
                for i in 0..=n + 1 {
                    let lhs = self.faces[n + 1][i].after(sj);
                    let ok = if i < j {
                        lhs.equals(&self.degens[n - 1][j - 1].after(&self.faces[n][i]))
                    } else if i == j || i == j + 1 {
                        lhs.equals(&MackeyMap::identity(self.levels[n].functor()))
                    } else {
                        lhs.equals(&self.degens[n - 1][j].after(&self.faces[n][i - 1]))
                    };
                    if !ok {
                        bad.push(format!("d{i} s{j} at level {n}"));
                    }
                }
            }
        }
        for n in 0..top.saturating_sub(1) {
            for j in 0..=n {
                for i in 0..=j {
                    let a = self.degens[n + 1][i].after(&self.degens[n][j]);
                    let b = self.degens[n + 1][j + 1].after(&self.degens[n][i]);
                    if !a.equals(&b) {
                        bad.push(format!("s{i} s{j} at level {n}"));
                    }
                }
            }
        }
        bad
    }

    /// Unnormalized chains: d = Σ (−1)^i d_i.
    pub fn moore_complex(&self) -> Result<MackeyChainComplex, MackeyError> {
        let objects: Vec<_> = self.levels.iter().map(|b| b.functor().clone()).collect();
        let mut diffs = Vec::new();
        for k in 1..=self.top() {
            let mut d = MackeyMap::zero(&objects[k], &objects[k - 1]);
            for (i, f) in self.faces[k].iter().enumerate() {
                d = if i % 2 == 0 { d.add(f) } else { d.sub(f) };
            }
            diffs.push(d);
        }
        MackeyChainComplex::new(0, objects, diffs)
    }
}

/// Builds the map between box powers induced by a map of free C_p-sets on orbit representatives.
fn induced_box_map(
    g: &GreenFunctor,
    src: &FlatBox,
    tgt: &FlatBox,
    src_reps: &[usize],
    coords: &[(usize, u32)],
    phi: &dyn Fn(usize) -> usize,
) -> Result<MackeyMap, SimplicialError> {
    let k1 = src_reps.len() as i64;
    let mut contributions: Vec<Vec<(i64, usize, u32)>> = vec![Vec::new(); tgt.arity()];
    for (j, &x) in src_reps.iter().enumerate() {
        let (s, t) = coords[phi(x)];
        contributions[s].push((j as i64 - t as i64 * k1, j, t));
    }
    let trees: Vec<Factor> = contributions
        .into_iter()
        .map(|mut c| {
            c.sort();
            let mut it = c.into_iter().map(|(_, j, t)| Factor::twisted(j, t));
            match it.next() {
                None => g.unit_factor(),
                Some(first) => it.fold(first, |acc, f| acc.times(f, g.mult())),
            }
        })
        .collect();
    Ok(slot_map(src, &trees, tgt)?)
}

/// R ⊗_{C_p} pS¹ through level `top`: level k is the (k+1)-fold box power, one slot per orbit.
pub fn tensor_green_with_circle(g: &GreenFunctor, top: usize, limit: usize) -> Result<SimplicialMackey, SimplicialError> {
    let p = g.prime();
    let x = p_circle(p, top);
    tensor_green_with_set(g, &x, limit)
}

/// R ⊗_{C_p} X for a finite free C_p-simplicial set X.
pub fn tensor_green_with_set(g: &GreenFunctor, x: &SimplicialGSet, limit: usize) -> Result<SimplicialMackey, SimplicialError> {
    if x.order != g.prime() {
        return Err(SimplicialError::Shape(format!("action of order {} on a C_{} functor", x.order, g.prime())));
    }
    let top = x.top();
    let mut reps = Vec::new();
    let mut coords = Vec::new();
    let mut levels = Vec::new();
    for n in 0..=top {
        if !x.is_free_level(n) {
            return Err(SimplicialError::NotFreeAction { level: n });
        }
        let r = x.orbit_representatives(n);
        let mut c = vec![(0usize, 0u32); x.sizes[n]];
        for (s, &rep) in r.iter().enumerate() {
            let mut y = rep;
            for t in 0..x.order {
                c[y] = (s, t);
                y = x.action[n][y];
            }
        }
        levels.push(FlatBox::new(g.prime(), &vec![g.underlying().clone(); r.len()], limit)?);
        reps.push(r);
        coords.push(c);
    }
    let mut faces = vec![Vec::new()];
    let mut degens = Vec::new();
    for n in 0..=top {
        if n > 0 {
            let mut fs = Vec::new();
            for i in 0..=n {
                fs.push(induced_box_map(g, &levels[n], &levels[n - 1], &reps[n], &coords[n - 1], &|e| x.faces[n][i][e])?);
            }
            faces.push(fs);
        }
        if n < top {
            let mut ds = Vec::new();
            for i in 0..=n {
                ds.push(induced_box_map(g, &levels[n], &levels[n + 1], &reps[n], &coords[n + 1], &|e| x.degens[n][i][e])?);
            }
            degens.push(ds);
        }
    }
    Ok(SimplicialMackey { levels, faces, degens })
}
