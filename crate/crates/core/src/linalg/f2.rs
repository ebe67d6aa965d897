use std::fmt;

use super::LinalgError;

const WORD: usize = 64;

#[inline]
fn words_for(cols: usize) -> usize {
    cols.div_ceil(WORD)
}

/// Dense matrix over the two-element field, rows packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatF2 {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl MatF2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from 0/1 rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_fn(rows.len(), cols, |r, c| {
            assert_eq!(rows[r].len(), cols, "ragged rows");
            rows[r][c] & 1 == 1
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let bit = 1u64 << (c % WORD);
        if v {
            *w |= bit;
        } else {
            *w &= !bit;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.stride + c / WORD] ^= 1u64 << (c % WORD);
    }

    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let s = self.stride;
        if src == dst {
            return;
        }
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..src * s + s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s] as &[u64], &mut lo[dst * s..dst * s + s])
        };
        for (d, x) in b.iter_mut().zip(a) {
            *d ^= *x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for k in 0..s {
            self.data.swap(a * s + k, b * s + k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> MatF2 {
        let mut t = MatF2::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.ones_in_row(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Column indices of the nonzero entries of row `r`.
    pub fn ones_in_row(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(r).iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn mul(&self, rhs: &MatF2) -> Result<MatF2, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let mut out = MatF2::zeros(self.rows, rhs.cols);
        let s = out.stride;
        for r in 0..self.rows {
            let dst = &mut out.data[r * s..(r + 1) * s];
            for k in self.ones_in_row(r) {
                for (d, x) in dst.iter_mut().zip(rhs.row_words(k)) {
                    *d ^= *x;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &MatF2) -> Result<MatF2, LinalgError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let mut out = self.clone();
        for (d, x) in out.data.iter_mut().zip(&rhs.data) {
            *d ^= *x;
        }
        Ok(out)
    }

    /// `[self | rhs]`.
    pub fn hstack(&self, rhs: &MatF2) -> Result<MatF2, LinalgError> {
        if self.rows != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let mut out = MatF2::zeros(self.rows, self.cols + rhs.cols);
        for r in 0..self.rows {
            for c in self.ones_in_row(r) {
                out.set(r, c, true);
            }
            for c in rhs.ones_in_row(r) {
                out.set(r, self.cols + c, true);
            }
        }
        Ok(out)
    }

    /// `[self ; rhs]`.
    pub fn vstack(&self, rhs: &MatF2) -> Result<MatF2, LinalgError> {
        if self.cols != rhs.cols {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&rhs.data);
        Ok(MatF2 { rows: self.rows + rhs.rows, cols: self.cols, stride: self.stride, data })
    }

    /// Block `[rows) x [cols)` copy.
    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> MatF2 {
        let mut out = MatF2::zeros(rows.len(), cols.len());
        for (i, r) in rows.enumerate() {
            for c in self.ones_in_row(r) {
                if cols.contains(&c) {
                    out.set(i, c - cols.start, true);
                }
            }
        }
        out
    }

    /// Rank by Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.row_echelon()
    }

    /// In-place forward elimination; returns the rank. Pivot rows end up
    /// in the first `rank` rows.
    fn row_echelon(&mut self) -> usize {
        let mut rank = 0;
        for c in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let (wi, bit) = (c / WORD, 1u64 << (c % WORD));
            let Some(p) = (rank..self.rows).find(|&r| self.data[r * self.stride + wi] & bit != 0) else {
                continue;
            };
            self.swap_rows(p, rank);
            for r in rank + 1..self.rows {
                if self.data[r * self.stride + wi] & bit != 0 {
                    self.xor_row_into(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (MatF2, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let (wi, bit) = (c / WORD, 1u64 << (c % WORD));
            let Some(p) = (rank..m.rows).find(|&r| m.data[r * m.stride + wi] & bit != 0) else {
                continue;
            };
            m.swap_rows(p, rank);
            for r in 0..m.rows {
                if r != rank && m.data[r * m.stride + wi] & bit != 0 {
                    m.xor_row_into(rank, r);
                }
            }
            pivots.push(c);
            rank += 1;
        }
        (m, pivots)
    }

    /// Basis of `{x : A x = 0}`, one vector per row of the result.
    pub fn kernel(&self) -> MatF2 {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut k = MatF2::zeros(free.len(), self.cols);
        for (i, &f) in free.iter().enumerate() {
            k.set(i, f, true);
            for (row, &p) in pivots.iter().enumerate() {
                if r.get(row, f) {
                    k.set(i, p, true);
                }
            }
        }
        k
    }

    /// Basis of the row space (rows of the result are independent).
    pub fn row_basis(&self) -> MatF2 {
        let mut m = self.clone();
        let rank = m.row_echelon();
        m.submatrix(0..rank, 0..self.cols)
    }
}

impl fmt::Debug for MatF2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatF2 {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows.min(32) {
            let line: String = (0..self.cols.min(96)).map(|c| if self.get(r, c) { '1' } else { '.' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

/// Rank of a matrix over F2.
pub fn rank_f2(a: &MatF2) -> usize {
    a.rank()
}

/// `dim ker(d_out) - rank(d_in)` for a composable pair with `d_out * d_in = 0`.
pub fn homology_rank(d_in: &MatF2, d_out: &MatF2) -> Result<usize, LinalgError> {
    let composite = d_out.mul(d_in)?;
    if !composite.is_zero() {
        return Err(LinalgError::NotAComplex);
    }
    let n = d_out.cols();
    Ok(n - d_out.rank() - d_in.rank())
}
