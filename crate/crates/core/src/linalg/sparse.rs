use super::{LinalgError, MatF2};

/// Column-sparse F2 matrix: each column is a sorted list of row indices.
///
/// Cube differentials have at most a handful of nonzeros per column, so large
/// blocks are reduced here instead of in the dense representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseF2 {
    rows: usize,
    columns: Vec<Vec<u32>>,
}

/// Dimension above which a sparse block is reduced sparsely.
pub const SPARSE_MIN_DIM: usize = 32768;
/// Density (nonzeros / entries) below which the sparse path is used.
pub const SPARSE_MAX_DENSITY: f64 = 0.05;

impl SparseF2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, columns: vec![Vec::new(); cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    /// Adds 1 to entry `(r, c)`.
    pub fn toggle(&mut self, r: usize, c: usize) {
        debug_assert!(r < self.rows);
        let col = &mut self.columns[c];
        match col.binary_search(&(r as u32)) {
            Ok(i) => {
                col.remove(i);
            }
            Err(i) => col.insert(i, r as u32),
        }
    }

    pub fn column(&self, c: usize) -> &[u32] {
        &self.columns[c]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn density(&self) -> f64 {
        let cells = self.rows as f64 * self.cols() as f64;
        if cells == 0.0 {
            0.0
        } else {
            self.nnz() as f64 / cells
        }
    }

    pub fn to_dense(&self) -> MatF2 {
        let mut m = MatF2::zeros(self.rows, self.cols());
        for (c, col) in self.columns.iter().enumerate() {
            for &r in col {
                m.set(r as usize, c, true);
            }
        }
        m
    }

    pub fn from_dense(m: &MatF2) -> Self {
        let mut s = SparseF2::zeros(m.rows(), m.cols());
        for r in 0..m.rows() {
            for c in m.ones_in_row(r) {
                s.columns[c].push(r as u32);
            }
        }
        s
    }

    /// Rank by column reduction keyed on the lowest (largest-index) nonzero.
    pub fn rank_sparse(&self) -> usize {
        let mut pivot_of_low: Vec<Option<usize>> = vec![None; self.rows];
        let mut reduced: Vec<Vec<u32>> = Vec::with_capacity(self.cols());
        let mut rank = 0;
        for col in &self.columns {
            let mut cur = col.clone();
            while let Some(&low) = cur.last() {
                match pivot_of_low[low as usize] {
                    Some(j) => cur = sym_diff(&cur, &reduced[j]),
                    None => break,
                }
            }
            if let Some(&low) = cur.last() {
                pivot_of_low[low as usize] = Some(reduced.len());
                rank += 1;
            }
            reduced.push(cur);
        }
        rank
    }

    /// Rank, choosing the sparse or dense routine by size and density.
    pub fn rank(&self) -> usize {
        if self.prefers_sparse() {
            self.rank_sparse()
        } else {
            self.to_dense().rank()
        }
    }

    /// Matrix with the given columns; each column must be sorted and in range.
    pub fn from_columns(rows: usize, columns: Vec<Vec<u32>>) -> Self {
        debug_assert!(columns.iter().all(|c| c.windows(2).all(|w| w[0] < w[1]) && c.last().is_none_or(|&r| (r as usize) < rows)));
        Self { rows, columns }
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &SparseF2) -> Result<SparseF2, LinalgError> {
        if self.cols() != rhs.rows {
            return Err(LinalgError::DimensionMismatch { left: (self.rows, self.cols()), right: (rhs.rows, rhs.cols()) });
        }
        let columns = rhs
            .columns
            .iter()
            .map(|col| {
                let mut acc: Vec<u32> = Vec::new();
                for &k in col {
                    acc = sym_diff(&acc, &self.columns[k as usize]);
                }
                acc
            })
            .collect();
        Ok(SparseF2 { rows: self.rows, columns })
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn prefers_sparse(&self) -> bool {
        self.rows.max(self.cols()) > SPARSE_MIN_DIM && self.density() < SPARSE_MAX_DENSITY
    }
}

fn sym_diff(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
