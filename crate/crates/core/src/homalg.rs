//! F2 chain complexes, mapping cones, and spectral sequences of filtered
//! complexes.
//!
//! Matrices act on column vectors: a differential `d` on an `n`-dimensional
//! complex is an `n x n` matrix, a map `A -> B` is `dim B x dim A`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::khovanov::BigradedComplex;
use crate::linalg::{LinalgError, MatF2, SparseF2};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomalgError {
    #[error("differential does not square to zero")]
    NotAComplex,
    #[error("map does not commute with the differentials")]
    NotChainMap,
    #[error("d H + H d differs from the composite of the two maps")]
    HypothesisFails,
    #[error("differential lowers the filtration level")]
    NotCubeShaped,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Ungraded chain complex over F2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    d: MatF2,
}

impl ChainComplex {
    pub fn new(d: MatF2) -> Result<Self, HomalgError> {
        if d.rows() != d.cols() {
            return Err(LinalgError::NotSquare { rows: d.rows(), cols: d.cols() }.into());
        }
        if !d.mul(&d)?.is_zero() {
            return Err(HomalgError::NotAComplex);
        }
        Ok(Self { d })
    }

    pub fn zero(n: usize) -> Self {
        Self { d: MatF2::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.d.rows()
    }

    pub fn differential(&self) -> &MatF2 {
        &self.d
    }

    pub fn homology_rank(&self) -> usize {
        self.dim() - 2 * self.d.rank()
    }

    /// Whether `f: self -> target` is a chain map.
    pub fn is_chain_map_to(&self, target: &ChainComplex, f: &MatF2) -> Result<bool, HomalgError> {
        if f.cols() != self.dim() || f.rows() != target.dim() {
            return Err(LinalgError::DimensionMismatch { left: (f.rows(), f.cols()), right: (target.dim(), self.dim()) }.into());
        }
        Ok(target.d.mul(f)? == f.mul(&self.d)?)
    }
}

/// A cone (or iterated cone) together with the sizes of its summands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeComplex {
    pub complex: ChainComplex,
    pub summands: Vec<usize>,
}

fn blocks(rows: &[Vec<&MatF2>]) -> Result<MatF2, LinalgError> {
    let mut out: Option<MatF2> = None;
    for row in rows {
        let mut line = row[0].clone();
        for m in &row[1..] {
            line = line.hstack(m)?;
        }
        out = Some(match out {
            None => line,
            Some(top) => top.vstack(&line)?,
        });
    }
    Ok(out.expect("at least one block row"))
}

/// Cone of `f: a -> b`: differential `[[d_a, 0], [f, d_b]]` on `a ⊕ b`.
pub fn mapping_cone(a: &ChainComplex, b: &ChainComplex, f: &MatF2) -> Result<ConeComplex, HomalgError> {
    if !a.is_chain_map_to(b, f)? {
        return Err(HomalgError::NotChainMap);
    }
    let zero = MatF2::zeros(a.dim(), b.dim());
    let d = blocks(&[vec![&a.d, &zero], vec![f, &b.d]])?;
    Ok(ConeComplex { complex: ChainComplex::new(d)?, summands: vec![a.dim(), b.dim()] })
}

/// Iterated cone of `a1 -f1-> a2 -f2-> a3` with homotopy `h1: a1 -> a3`
/// satisfying `d3 h1 + h1 d1 = f2 f1`. Differential
/// `[[d1, 0, 0], [f1, d2, 0], [h1, f2, d3]]`.
pub fn iterated_cone(
    complexes: [&ChainComplex; 3],
    f1: &MatF2,
    f2: &MatF2,
    h1: &MatF2,
) -> Result<ConeComplex, HomalgError> {
    let [a1, a2, a3] = complexes;
    if !a1.is_chain_map_to(a2, f1)? || !a2.is_chain_map_to(a3, f2)? {
        return Err(HomalgError::NotChainMap);
    }
    if !is_homotopy(a1, a3, h1, &f2.mul(f1)?)? {
        return Err(HomalgError::HypothesisFails);
    }
    let z12 = MatF2::zeros(a1.dim(), a2.dim());
    let z13 = MatF2::zeros(a1.dim(), a3.dim());
    let z23 = MatF2::zeros(a2.dim(), a3.dim());
    let d = blocks(&[vec![&a1.d, &z12, &z13], vec![f1, &a2.d, &z23], vec![h1, f2, &a3.d]])?;
    Ok(ConeComplex { complex: ChainComplex::new(d)?, summands: vec![a1.dim(), a2.dim(), a3.dim()] })
}

/// Whether `d_t h + h d_s = g` for `h, g: source -> target`.
pub fn is_homotopy(source: &ChainComplex, target: &ChainComplex, h: &MatF2, g: &MatF2) -> Result<bool, HomalgError> {
    let lhs = target.d.mul(h)?.add(&h.mul(&source.d)?)?;
    Ok(&lhs == g)
}

/// Rank of the map induced on homology by a chain map `f: a -> b`.
pub fn induced_rank(a: &ChainComplex, b: &ChainComplex, f: &MatF2) -> Result<usize, HomalgError> {
    if !a.is_chain_map_to(b, f)? {
        return Err(HomalgError::NotChainMap);
    }
    // Cycles of a (as rows), pushed forward, modulo boundaries of b.
    let cycles = a.d.kernel();
    let images = cycles.mul(&f.transpose())?;
    let boundaries = b.d.transpose();
    Ok(boundaries.vstack(&images)?.rank() - b.d.rank())
}

/// Complex with an increasing integer filtration: basis vector `i` sits at
/// `levels[i]` and the differential never lowers the level. An optional
/// second grading, preserved by the differential, splits the computation
/// into independent blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    d: SparseF2,
    levels: Vec<i64>,
    gradings: Vec<i64>,
}

impl FilteredComplex {
    pub fn new(d: SparseF2, levels: Vec<i64>, gradings: Option<Vec<i64>>) -> Result<Self, HomalgError> {
        let n = levels.len();
        if d.rows() != n || d.cols() != n {
            return Err(LinalgError::DimensionMismatch { left: (d.rows(), d.cols()), right: (n, n) }.into());
        }
        let gradings = gradings.unwrap_or_else(|| vec![0; n]);
        if gradings.len() != n {
            return Err(LinalgError::DimensionMismatch { left: (gradings.len(), 1), right: (n, 1) }.into());
        }
        for c in 0..n {
            for &r in d.column(c) {
                let r = r as usize;
                if levels[r] < levels[c] {
                    return Err(HomalgError::NotCubeShaped);
                }
                if gradings[r] != gradings[c] {
                    return Err(HomalgError::NotAComplex);
                }
            }
        }
        if !d.mul(&d)?.is_zero() {
            return Err(HomalgError::NotAComplex);
        }
        Ok(Self { d, levels, gradings })
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn differential(&self) -> &SparseF2 {
        &self.d
    }

    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    pub fn min_level(&self) -> i64 {
        self.levels.iter().copied().min().unwrap_or(0)
    }

    pub fn max_level(&self) -> i64 {
        self.levels.iter().copied().max().unwrap_or(0)
    }

    /// Number of levels `max - min + 1`.
    pub fn length(&self) -> usize {
        if self.levels.is_empty() {
            0
        } else {
            (self.max_level() - self.min_level() + 1) as usize
        }
    }

    pub fn level_dims(&self) -> Vec<usize> {
        let lo = self.min_level();
        let mut dims = vec![0; self.length()];
        for &l in &self.levels {
            dims[(l - lo) as usize] += 1;
        }
        dims
    }

    pub fn total_homology_rank(&self) -> usize {
        self.grading_blocks().par_iter().map(|b| b.d.cols() - 2 * b.d.rank()).sum()
    }

    fn grading_blocks(&self) -> Vec<Block> {
        let mut gs = self.gradings.clone();
        gs.sort();
        gs.dedup();
        gs.into_iter()
            .map(|g| {
                let idx: Vec<usize> = (0..self.dim()).filter(|&i| self.gradings[i] == g).collect();
                let mut pos = vec![usize::MAX; self.dim()];
                for (k, &i) in idx.iter().enumerate() {
                    pos[i] = k;
                }
                let mut d = MatF2::zeros(idx.len(), idx.len());
                for (k, &i) in idx.iter().enumerate() {
                    for &r in self.d.column(i) {
                        d.set(pos[r as usize], k, true);
                    }
                }
                Block { d, levels: idx.iter().map(|&i| self.levels[i]).collect() }
            })
            .collect()
    }
}

struct Block {
    d: MatF2,
    levels: Vec<i64>,
}

impl Block {
    /// `Z^r_p = {x in F_p : D x in F_{p+r}}`, as rows.
    fn z(&self, p: i64, r: i64) -> MatF2 {
        let n = self.levels.len();
        let cols: Vec<usize> = (0..n).filter(|&i| self.levels[i] >= p).collect();
        let rows: Vec<usize> = (0..n).filter(|&i| self.levels[i] < p + r).collect();
        let a = MatF2::from_fn(rows.len(), cols.len(), |i, j| self.d.get(rows[i], cols[j]));
        let k = a.kernel();
        MatF2::from_fn(k.rows(), n, |i, j| match cols.binary_search(&j) {
            Ok(jj) => k.get(i, jj),
            Err(_) => false,
        })
    }

    /// `dim E^r_p = dim Z^r_p - dim(Z^{r-1}_{p+1} + D Z^{r-1}_{p-r+1})`.
    fn page_dim(&self, p: i64, r: i64) -> usize {
        let zr = self.z(p, r);
        let upper = self.z(p + 1, r - 1);
        let image = self.z(p - r + 1, r - 1).mul(&self.d.transpose()).expect("square");
        let denom = upper.vstack(&image).expect("same width").rank();
        zr.rank() - denom
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub r: usize,
    pub ranks_by_level: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageTable {
    pub pages: Vec<Page>,
    /// First page after which nothing changes.
    pub stable_page: usize,
    pub total_homology_rank: usize,
}

impl PageTable {
    pub fn page(&self, r: usize) -> Option<&Page> {
        self.pages.iter().find(|p| p.r == r)
    }

    /// The last computed page.
    pub fn infinity(&self) -> &Page {
        self.pages.last().expect("at least one page")
    }
}

/// Pages `E^1 ..= E^{r_max}`; at least enough pages to reach the stable one
/// (`length + 1`) are always computed.
pub fn spectral_pages(f: &FilteredComplex, r_max: usize) -> PageTable {
    let lo = f.min_level();
    let len = f.length();
    let last = r_max.max(len + 1).max(1);
    let blocks = f.grading_blocks();
    let per_block: Vec<Vec<Vec<usize>>> = blocks
        .par_iter()
        .map(|b| {
            (1..=last as i64)
                .map(|r| (0..len as i64).map(|k| b.page_dim(lo + k, r)).collect())
                .collect()
        })
        .collect();
    let pages: Vec<Page> = (0..last)
        .map(|ri| Page {
            r: ri + 1,
            ranks_by_level: (0..len).map(|k| per_block.iter().map(|pb| pb[ri][k]).sum()).collect(),
        })
        .collect();
    let stable_page = (0..pages.len())
        .find(|&i| pages[i..].iter().all(|p| p.ranks_by_level == pages[i].ranks_by_level))
        .map_or(1, |i| i + 1);
    PageTable { pages, stable_page, total_homology_rank: f.total_homology_rank() }
}

/// Filter a cube complex by cube weight; the quantum grading is kept as
/// the block grading.
pub fn flatten_cube(c: &BigradedComplex) -> Result<FilteredComplex, HomalgError> {
    let keys: Vec<((usize, i64), usize)> = c.blocks().collect();
    let mut offset = std::collections::BTreeMap::new();
    let mut n = 0;
    for &(k, dim) in &keys {
        offset.insert(k, n);
        n += dim;
    }
    let mut columns: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut levels = vec![0i64; n];
    let mut gradings = vec![0i64; n];
    for &((w, j), dim) in &keys {
        let base = offset[&(w, j)];
        for i in 0..dim {
            levels[base + i] = w as i64;
            gradings[base + i] = j;
        }
        if let Some(&tbase) = offset.get(&(w + 1, j)) {
            let d = c.differential(w, j);
            for i in 0..dim {
                columns[base + i] = d.column(i).iter().map(|&r| (r as usize + tbase) as u32).collect();
            }
        }
    }
    for col in columns.iter_mut() {
        col.sort_unstable();
    }
    FilteredComplex::new(SparseF2::from_columns(n, columns), levels, Some(gradings))
}
