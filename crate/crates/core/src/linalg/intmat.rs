use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::LinalgError;
use crate::scalar::{int, IntScalar};

/// Dense integer matrix, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: IntScalar> IntMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows).map(|r| self.row(r).iter().map(|v| v.to_i64()).collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|r| (0..r).all(|c| self[(r, c)] == self[(c, r)]))
    }

    pub fn neg(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| -v.clone()).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if self.cols != rhs.rows {
            return Err(LinalgError::DimensionMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let prod = a.clone() * rhs[(k, c)].clone();
                    out[(r, c)] = out[(r, c)].clone() + prod;
                }
            }
        }
        Ok(out)
    }

    /// `v^T M w` for square `M`.
    pub fn bilinear(&self, v: &[T], w: &[T]) -> T {
        let mut acc = T::zero();
        for i in 0..self.rows {
            if v[i].is_zero() {
                continue;
            }
            let mut row = T::zero();
            for j in 0..self.cols {
                row = row + self[(i, j)].clone() * w[j].clone();
            }
            acc = acc + v[i].clone() * row;
        }
        acc
    }

    /// `M v`.
    pub fn apply(&self, v: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| (0..self.cols).fold(T::zero(), |acc, j| acc + self[(i, j)].clone() * v[j].clone()))
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<T, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(T::one());
        }
        let mut m = self.to_rows();
        let mut sign = T::one();
        let mut prev = T::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                    return Ok(T::zero());
                };
                m.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = m[i][j].clone() * m[k][k].clone() - m[i][k].clone() * m[k][j].clone();
                    m[i][j] = num / prev.clone();
                }
            }
            prev = m[k][k].clone();
        }
        Ok(sign * m[n - 1][n - 1].clone())
    }

    /// Leading principal minors `det M[..k, ..k]` for `k = 1..=n`.
    pub fn leading_minors(&self) -> Vec<T> {
        (1..=self.rows.min(self.cols))
            .map(|k| {
                IntMatrix::from_fn(k, k, |r, c| self[(r, c)].clone())
                    .determinant()
                    .expect("square by construction")
            })
            .collect()
    }

    /// Sylvester's criterion applied to `-M`.
    pub fn is_negative_definite(&self) -> bool {
        self.is_symmetric() && self.neg().leading_minors().iter().all(|m| m.is_positive())
    }

    /// Exact inverse over the rationals, `None` when singular.
    pub fn inverse_rational(&self) -> Option<Vec<Vec<Ratio<T>>>> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a: Vec<Vec<Ratio<T>>> = (0..n)
            .map(|r| {
                let mut row: Vec<Ratio<T>> = self.row(r).iter().map(|v| Ratio::from_integer(v.clone())).collect();
                row.extend((0..n).map(|c| if c == r { Ratio::one() } else { Ratio::zero() }));
                row
            })
            .collect();
        for col in 0..n {
            let p = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(col, p);
            let inv = a[col][col].recip();
            for v in a[col].iter_mut() {
                *v = v.clone() * inv.clone();
            }
            for r in 0..n {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    for c in 0..2 * n {
                        let sub = f.clone() * a[col][c].clone();
                        a[r][c] = a[r][c].clone() - sub;
                    }
                }
            }
        }
        Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
    }

    /// Adjugate, so that `M * adj(M) = det(M) * I`.
    pub fn adjugate(&self) -> Result<Self, LinalgError> {
        let det = self.determinant()?;
        let n = self.rows;
        if det.is_zero() {
            // Cofactor expansion for the singular case.
            return Ok(Self::from_fn(n, n, |r, c| {
                let minor = Self::from_fn(n - 1, n - 1, |i, j| {
                    let ii = if i < c { i } else { i + 1 };
                    let jj = if j < r { j } else { j + 1 };
                    self[(ii, jj)].clone()
                });
                let d = minor.determinant().expect("square");
                if (r + c) % 2 == 0 {
                    d
                } else {
                    -d
                }
            }));
        }
        let inv = self.inverse_rational().expect("nonsingular");
        Ok(Self::from_fn(n, n, |r, c| {
            let v = inv[r][c].clone() * Ratio::from_integer(det.clone());
            debug_assert!(v.is_integer());
            v.to_integer()
        }))
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// `row[dst] += k * row[src]`.
    pub(crate) fn add_row_multiple(&mut self, src: usize, dst: usize, k: &T) {
        for c in 0..self.cols {
            let v = self[(src, c)].clone() * k.clone();
            self[(dst, c)] = self[(dst, c)].clone() + v;
        }
    }

    /// `col[dst] += k * col[src]`.
    pub(crate) fn add_col_multiple(&mut self, src: usize, dst: usize, k: &T) {
        for r in 0..self.rows {
            let v = self[(r, src)].clone() * k.clone();
            self[(r, dst)] = self[(r, dst)].clone() + v;
        }
    }

    pub(crate) fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            self[(r, c)] = -self[(r, c)].clone();
        }
    }

    pub(crate) fn negate_col(&mut self, c: usize) {
        for r in 0..self.rows {
            self[(r, c)] = -self[(r, c)].clone();
        }
    }

    /// Comma-separated rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for r in 0..self.rows {
            let line: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}

impl<T> std::ops::Index<(usize, usize)> for IntMatrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for IntMatrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

impl<T: fmt::Debug> fmt::Debug for IntMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{:?}", self.data[r * self.cols + c])?;
            }
        }
        write!(f, "]")
    }
}
