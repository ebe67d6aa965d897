//! Khovanov chain complex over F2 built from the cube of resolutions.
//!
//! Each resolution carries the exterior algebra on its circles; basis
//! monomials are bitmasks over circles (circles ordered by least arc label).
//! Generators are bigraded by the cube weight `w` and the internal quantum
//! grading `j = c - 2k + w + n_+ - 2 n_-` (minus one when reduced); the
//! differential raises `w` by one and preserves `j`. Published gradings are
//! `m = n_- - w` and `n = -j`, see [`crate::conventions`].

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conventions::{CONVENTIONS_VERSION, M_SIGN, N_SIGN, ONE_SMOOTHING, ZERO_SMOOTHING};
use crate::diagram::{Arc, LinkDiagram};
use crate::linalg::{MatF2, SparseF2};
use crate::poly::Laurent;

/// Environment variable holding the memory budget in MiB.
pub const BUDGET_ENV: &str = "KHCOVER_BUDGET_MB";
pub const DEFAULT_BUDGET_MB: u64 = 4096;
/// Hard cap on cube dimension (states are `u64` bitmasks enumerated eagerly).
pub const MAX_CROSSINGS: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KhovanovError {
    #[error("reduced homology needs a marked arc")]
    NoMark,
    #[error("state {to:#b} is not an immediate successor of {from:#b}")]
    NotSuccessor { from: u64, to: u64 },
    #[error("cube needs about {needed_mb} MiB, budget is {budget_mb} MiB")]
    BudgetExceeded { needed_mb: u64, budget_mb: u64 },
    #[error("differential squares to a nonzero map at weight {w}, grading {j}")]
    NotAComplex { w: usize, j: i64 },
}

/// Budget from [`BUDGET_ENV`], or the default.
pub fn budget_from_env() -> u64 {
    std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET_MB)
}

/// The vector space at one vertex of the cube.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexSpace {
    pub state: u64,
    pub circles: usize,
    /// Circle of each arc (index `arc - 1`).
    pub circle_of_arc: Vec<u16>,
    pub reduced: bool,
    pub marked: Option<usize>,
}

impl VertexSpace {
    pub fn dim(&self) -> usize {
        if self.reduced {
            1 << (self.circles - 1)
        } else {
            1 << self.circles
        }
    }

    /// Basis monomials in increasing bitmask order.
    pub fn basis(&self) -> Vec<u64> {
        (0..self.dim() as u64).map(|i| self.expand(i)).collect()
    }

    /// Basis position of a monomial (which must avoid the marked circle).
    pub fn index_of(&self, mask: u64) -> usize {
        match self.marked {
            Some(m) if self.reduced => {
                let low = mask & ((1 << m) - 1);
                let high = mask >> (m + 1);
                (low | high << m) as usize
            }
            _ => mask as usize,
        }
    }

    fn expand(&self, i: u64) -> u64 {
        match self.marked {
            Some(m) if self.reduced => {
                let low = i & ((1 << m) - 1);
                let high = i >> m;
                low | high << (m + 1)
            }
            _ => i,
        }
    }
}

pub fn vertex_space(d: &LinkDiagram, state: u64, reduced: bool) -> Result<VertexSpace, KhovanovError> {
    let mark = if reduced { Some(d.mark().ok_or(KhovanovError::NoMark)?) } else { None };
    Ok(vertex_with_mark(d, state, reduced, mark))
}

fn vertex_with_mark(d: &LinkDiagram, state: u64, reduced: bool, mark: Option<Arc>) -> VertexSpace {
    let (circle_of_arc, circles) = d.circles_of_state(state);
    let marked = mark.map(|m| circle_of_arc[m as usize - 1] as usize);
    VertexSpace { state, circles, circle_of_arc, reduced, marked }
}

/// Images of a source monomial under the edge map flipping crossing `x`.
fn edge_images(d: &LinkDiagram, src: &VertexSpace, tgt: &VertexSpace, x: usize, mask: u64) -> Vec<u64> {
    let arcs = d.crossings()[x].arcs();
    let arc_circle = |v: &VertexSpace, slot: usize| v.circle_of_arc[arcs[slot] as usize - 1] as usize;
    let mut sigma = vec![0usize; src.circles];
    for (a, &c) in src.circle_of_arc.iter().enumerate() {
        sigma[c as usize] = tgt.circle_of_arc[a] as usize;
    }
    let push = |m: u64| -> u64 {
        let mut out = 0u64;
        let mut rest = m;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            out |= 1 << sigma[i];
            rest &= rest - 1;
        }
        out
    };
    let s01 = arc_circle(src, ZERO_SMOOTHING[0][0]);
    let s23 = arc_circle(src, ZERO_SMOOTHING[1][0]);
    let mut images = Vec::with_capacity(2);
    if s01 != s23 {
        // Merge: S_a S_b -> 0, otherwise identify the two circles.
        if mask >> s01 & 1 == 0 || mask >> s23 & 1 == 0 {
            images.push(push(mask));
        }
    } else {
        let ta = arc_circle(tgt, ONE_SMOOTHING[0][0]);
        let tb = arc_circle(tgt, ONE_SMOOTHING[1][0]);
        let rest = push(mask & !(1 << s01));
        if mask >> s01 & 1 == 1 {
            images.push(rest | 1 << ta | 1 << tb);
        } else {
            images.push(rest | 1 << ta);
            images.push(rest | 1 << tb);
        }
    }
    if let (true, Some(m)) = (tgt.reduced, tgt.marked) {
        images.retain(|im| im >> m & 1 == 0);
    }
    images
}

/// Matrix of the edge map `V(from) -> V(to)`; columns indexed by the source basis.
pub fn edge_map(d: &LinkDiagram, from: u64, to: u64, reduced: bool) -> Result<MatF2, KhovanovError> {
    let flipped = to ^ from;
    if from & to != from || flipped.count_ones() != 1 || to >> d.crossing_count() != 0 {
        return Err(KhovanovError::NotSuccessor { from, to });
    }
    let x = flipped.trailing_zeros() as usize;
    let src = vertex_space(d, from, reduced)?;
    let tgt = vertex_space(d, to, reduced)?;
    let mut m = MatF2::zeros(tgt.dim(), src.dim());
    for (c, mask) in src.basis().into_iter().enumerate() {
        for im in edge_images(d, &src, &tgt, x, mask) {
            m.flip(tgt.index_of(im), c);
        }
    }
    Ok(m)
}

/// Chain complex with blocks indexed by `(w, j)`.
#[derive(Clone, Debug)]
pub struct BigradedComplex {
    pub crossings: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    pub reduced: bool,
    /// Generators `(state, monomial)` of each block, in basis order.
    generators: BTreeMap<(usize, i64), Vec<(u64, u64)>>,
    /// Differential from block `(w, j)` to `(w + 1, j)`.
    differentials: BTreeMap<(usize, i64), SparseF2>,
}

impl BigradedComplex {
    pub fn blocks(&self) -> impl Iterator<Item = ((usize, i64), usize)> + '_ {
        self.generators.iter().map(|(&k, g)| (k, g.len()))
    }

    pub fn dim(&self, w: usize, j: i64) -> usize {
        self.generators.get(&(w, j)).map_or(0, Vec::len)
    }

    pub fn generators(&self, w: usize, j: i64) -> &[(u64, u64)] {
        self.generators.get(&(w, j)).map_or(&[], Vec::as_slice)
    }

    pub fn total_dim(&self) -> usize {
        self.generators.values().map(Vec::len).sum()
    }

    /// Dimension of each cube level `w = 0..=crossings`.
    pub fn level_dims(&self) -> Vec<usize> {
        let mut dims = vec![0; self.crossings + 1];
        for (&(w, _), g) in &self.generators {
            dims[w] += g.len();
        }
        dims
    }

    /// Differential out of block `(w, j)`; a zero matrix when the target is empty.
    pub fn differential(&self, w: usize, j: i64) -> SparseF2 {
        self.differentials
            .get(&(w, j))
            .cloned()
            .unwrap_or_else(|| SparseF2::zeros(self.dim(w + 1, j), self.dim(w, j)))
    }

    pub fn quantum_gradings(&self) -> Vec<i64> {
        let mut js: Vec<i64> = self.generators.keys().map(|&(_, j)| j).collect();
        js.sort();
        js.dedup();
        js
    }

    /// Published `(m, n)` of block `(w, j)`.
    pub fn published(&self, w: usize, j: i64) -> (i64, i64) {
        (M_SIGN * w as i64 + self.n_minus as i64, N_SIGN * j)
    }

    /// Checks `d ∘ d = 0` on every block.
    pub fn check_d_squared(&self) -> Result<(), KhovanovError> {
        self.differentials.par_iter().try_for_each(|(&(w, j), d0)| match self.differentials.get(&(w + 1, j)) {
            Some(d1) if !d1.mul(d0).expect("compatible blocks").is_zero() => Err(KhovanovError::NotAComplex { w, j }),
            _ => Ok(()),
        })
    }
}

/// Assemble using the budget from the environment.
pub fn assemble(d: &LinkDiagram, reduced: bool) -> Result<BigradedComplex, KhovanovError> {
    assemble_with_budget(d, reduced, budget_from_env())
}

pub fn assemble_with_budget(d: &LinkDiagram, reduced: bool, budget_mb: u64) -> Result<BigradedComplex, KhovanovError> {
    let mark = if reduced { Some(d.mark().ok_or(KhovanovError::NoMark)?) } else { None };
    let l = d.crossing_count();
    if l > MAX_CROSSINGS {
        return Err(KhovanovError::BudgetExceeded { needed_mb: u64::MAX, budget_mb });
    }
    let states: Vec<u64> = (0..1u64 << l).collect();
    let vertices: Vec<VertexSpace> = states.par_iter().map(|&s| vertex_with_mark(d, s, reduced, mark)).collect();

    let total: u64 = vertices.iter().map(|v| v.dim() as u64).sum();
    let bytes = total * (16 + 8 * l as u64 + 8);
    let needed_mb = bytes.div_ceil(1 << 20);
    if needed_mb > budget_mb {
        return Err(KhovanovError::BudgetExceeded { needed_mb, budget_mb });
    }

    let (n_plus, n_minus) = d.crossing_signs();
    let offset = n_plus as i64 - 2 * n_minus as i64 - reduced as i64;
    let j_of = |v: &VertexSpace, mask: u64| -> i64 {
        let w = v.state.count_ones() as i64;
        v.circles as i64 - 2 * mask.count_ones() as i64 + w + offset
    };

    // Generators and their positions within blocks.
    let mut generators: BTreeMap<(usize, i64), Vec<(u64, u64)>> = BTreeMap::new();
    let mut position: Vec<Vec<u32>> = Vec::with_capacity(vertices.len());
    let mut by_weight: Vec<Vec<usize>> = vec![Vec::new(); l + 1];
    for (s, v) in vertices.iter().enumerate() {
        by_weight[v.state.count_ones() as usize].push(s);
    }
    position.resize(vertices.len(), Vec::new());
    for level in &by_weight {
        for &s in level {
            let v = &vertices[s];
            let w = v.state.count_ones() as usize;
            position[s] = v
                .basis()
                .into_iter()
                .map(|mask| {
                    let block = generators.entry((w, j_of(v, mask))).or_default();
                    block.push((v.state, mask));
                    (block.len() - 1) as u32
                })
                .collect();
        }
    }

    let keys: Vec<(usize, i64)> = generators.keys().copied().filter(|&(w, _)| w < l).collect();
    let differentials: BTreeMap<(usize, i64), SparseF2> = keys
        .par_iter()
        .map(|&(w, j)| {
            let src_gens = &generators[&(w, j)];
            let rows = generators.get(&(w + 1, j)).map_or(0, Vec::len);
            let columns = src_gens
                .iter()
                .map(|&(state, mask)| {
                    let src = &vertices[state as usize];
                    let mut col: Vec<u32> = Vec::new();
                    for x in (0..l).filter(|&x| state >> x & 1 == 0) {
                        let t = state | 1 << x;
                        let tgt = &vertices[t as usize];
                        for im in edge_images(d, src, tgt, x, mask) {
                            let r = position[t as usize][tgt.index_of(im)];
                            match col.binary_search(&r) {
                                Ok(i) => {
                                    col.remove(i);
                                }
                                Err(i) => col.insert(i, r),
                            }
                        }
                    }
                    col
                })
                .collect();
            ((w, j), SparseF2::from_columns(rows, columns))
        })
        .collect();

    let complex = BigradedComplex { crossings: l, n_plus, n_minus, reduced, generators, differentials };
    complex.check_d_squared()?;
    Ok(complex)
}

/// Homology ranks indexed by published `(m, n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KhTable {
    pub ranks: BTreeMap<(i64, i64), usize>,
    pub reduced: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KhTableJson {
    pub gradings: Vec<[i64; 3]>,
    pub total_rank: usize,
    pub euler_poly: String,
    pub reduced: bool,
    pub conventions_version: String,
}

impl KhTable {
    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn rank(&self, m: i64, n: i64) -> usize {
        self.ranks.get(&(m, n)).copied().unwrap_or(0)
    }

    /// Table with every grading negated.
    pub fn negated(&self) -> KhTable {
        KhTable { ranks: self.ranks.iter().map(|(&(m, n), &r)| ((-m, -n), r)).collect(), reduced: self.reduced }
    }

    pub fn to_json(&self) -> KhTableJson {
        KhTableJson {
            gradings: self.ranks.iter().map(|(&(m, n), &r)| [m, n, r as i64]).collect(),
            total_rank: self.total_rank(),
            euler_poly: graded_euler(self).to_string(),
            reduced: self.reduced,
            conventions_version: CONVENTIONS_VERSION.to_string(),
        }
    }
}

pub fn homology(c: &BigradedComplex) -> KhTable {
    let keys: Vec<(usize, i64)> = c.generators.keys().copied().collect();
    let ranks: BTreeMap<(i64, i64), usize> = keys
        .par_iter()
        .filter_map(|&(w, j)| {
            let dim = c.dim(w, j);
            let out = c.differentials.get(&(w, j)).map_or(0, SparseF2::rank);
            let inc = if w == 0 { 0 } else { c.differentials.get(&(w - 1, j)).map_or(0, SparseF2::rank) };
            let r = dim - out - inc;
            (r > 0).then(|| (c.published(w, j), r))
        })
        .collect();
    KhTable { ranks, reduced: c.reduced }
}

/// Assemble and take homology.
pub fn khovanov_homology(d: &LinkDiagram, reduced: bool) -> Result<KhTable, KhovanovError> {
    Ok(homology(&assemble(d, reduced)?))
}

/// `sum (-1)^m rank(m, n) q^n`.
pub fn graded_euler(t: &KhTable) -> Laurent<i64> {
    let mut p = Laurent::zero();
    for (&(m, n), &r) in &t.ranks {
        let sign = if m.rem_euclid(2) == 0 { 1 } else { -1 };
        p.add_term(n as i32, sign * r as i64);
    }
    p
}

/// `|chi(i)|` of reduced homology: the determinant from the Jones side.
pub fn jones_determinant(d: &LinkDiagram) -> Result<i64, KhovanovError> {
    let marked = match d.mark() {
        Some(_) => d.clone(),
        None if d.arc_count() == 0 => return Ok(1),
        None => d.clone().with_mark(Some(1)).expect("arc 1 exists"),
    };
    let (re, im) = graded_euler(&khovanov_homology(&marked, true)?).eval_at_i();
    Ok(num_integer::Roots::sqrt(&(re * re + im * im)))
}

/// Kauffman bracket state sum, normalized to agree with [`graded_euler`] of
/// the unreduced complex:
/// `(-1)^{n_+} q^{n_- - 2 n_+} sum_I (-q)^{l - w(I)} (q + q^{-1})^{c(I)}`.
pub fn kauffman_oracle(d: &LinkDiagram) -> Result<Laurent<i64>, KhovanovError> {
    let l = d.crossing_count();
    if l > 20 {
        return Err(KhovanovError::BudgetExceeded { needed_mb: 0, budget_mb: 0 });
    }
    let loop_value = Laurent::from_terms([(1, 1i64), (-1, 1)]);
    let max_c = l + d.free_loops() as usize + 1;
    let powers: Vec<Laurent<i64>> =
        std::iter::successors(Some(Laurent::one()), |p| Some(p * &loop_value)).take(max_c + 1).collect();
    let mut sum = Laurent::zero();
    for state in 0..1u64 << l {
        let w = state.count_ones() as usize;
        let c = count_state_loops(d, state);
        let k = (l - w) as i32;
        let sign = if k % 2 == 0 { 1 } else { -1 };
        sum = sum + (&Laurent::monomial(sign, k) * &powers[c]);
    }
    let (np, nm) = d.crossing_signs();
    let sign = if np % 2 == 0 { 1 } else { -1 };
    Ok(&Laurent::monomial(sign, nm as i32 - 2 * np as i32) * &sum)
}

/// Loop count of a state by walking endpoints: inside a crossing follow the
/// smoothing, along an arc jump to its other end.
fn count_state_loops(d: &LinkDiagram, state: u64) -> usize {
    let l = d.crossing_count();
    let partner = |x: usize, s: usize| -> usize {
        let pairs = if state >> x & 1 == 1 { ONE_SMOOTHING } else { ZERO_SMOOTHING };
        pairs.iter().find(|p| p.contains(&s)).map(|p| if p[0] == s { p[1] } else { p[0] }).expect("slot in a pair")
    };
    let mut seen = vec![[false; 4]; l];
    let mut loops = d.free_loops() as usize;
    for x in 0..l {
        for s in 0..4 {
            if seen[x][s] {
                continue;
            }
            loops += 1;
            let (mut cx, mut cs) = (x, s);
            while !seen[cx][cs] {
                seen[cx][cs] = true;
                let t = partner(cx, cs);
                seen[cx][t] = true;
                let arc = d.crossings()[cx].arc(t);
                let ends = d.arc_ends(arc).expect("crossing arc");
                (cx, cs) = if ends[0] == (cx, t) { ends[1] } else { ends[0] };
            }
        }
    }
    loops
}

/// Reduced homology with several different marks, compared rank for rank.
pub fn mark_invariance_check(d: &LinkDiagram) -> Result<bool, KhovanovError> {
    let mut marks: Vec<Arc> = d.components().iter().map(|c| c[0]).collect();
    if d.arc_count() > 0 {
        marks.push(d.arc_count() as Arc);
        marks.push(d.arc_count().div_ceil(2) as Arc);
    }
    marks.sort();
    marks.dedup();
    let tables: Vec<KhTable> = marks
        .iter()
        .map(|&m| khovanov_homology(&d.clone().with_mark(Some(m)).expect("valid arc"), true))
        .collect::<Result<_, _>>()?;
    Ok(tables.windows(2).all(|w| w[0] == w[1]))
}

/// Every square face of the cube commutes: both composites agree on every
/// basis monomial of every vertex.
pub fn face_commutativity(d: &LinkDiagram, reduced: bool) -> Result<bool, KhovanovError> {
    let mark = if reduced { Some(d.mark().ok_or(KhovanovError::NoMark)?) } else { None };
    let l = d.crossing_count();
    let vertices: Vec<VertexSpace> = (0..1u64 << l).map(|s| vertex_with_mark(d, s, reduced, mark)).collect();
    let compose = |s: u64, x: usize, y: usize, mask: u64| -> Vec<u64> {
        let mid = s | 1 << x;
        let end = mid | 1 << y;
        let mut acc: BTreeMap<u64, bool> = BTreeMap::new();
        for a in edge_images(d, &vertices[s as usize], &vertices[mid as usize], x, mask) {
            for b in edge_images(d, &vertices[mid as usize], &vertices[end as usize], y, a) {
                *acc.entry(b).or_default() ^= true;
            }
        }
        acc.into_iter().filter(|&(_, v)| v).map(|(k, _)| k).collect()
    };
    Ok((0..1u64 << l).into_par_iter().all(|s| {
        let free: Vec<usize> = (0..l).filter(|&x| s >> x & 1 == 0).collect();
        free.iter().enumerate().all(|(i, &x)| {
            free[i + 1..].iter().all(|&y| {
                vertices[s as usize].basis().into_iter().all(|mask| compose(s, x, y, mask) == compose(s, y, x, mask))
            })
        })
    }))
}
