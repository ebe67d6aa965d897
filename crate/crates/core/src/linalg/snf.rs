
use super::IntMatrix;
use crate::scalar::IntScalar;

/// `A = U * D * V` with `U`, `V` unimodular and `D` diagonal with
/// `d_1 | d_2 | ...`. Inverses of the transforms are kept alongside.
#[derive(Clone, Debug)]
pub struct SmithDecomposition<T> {
    pub u: IntMatrix<T>,
    pub d: IntMatrix<T>,
    pub v: IntMatrix<T>,
    pub u_inv: IntMatrix<T>,
    pub v_inv: IntMatrix<T>,
}

impl<T: IntScalar> SmithDecomposition<T> {
    /// Diagonal entries `d_1, ..., d_min(m,n)` including zeros and ones.
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Diagonal entries different from one.
    pub fn invariant_factors(&self) -> Vec<T> {
        self.diagonal().into_iter().filter(|d| !d.is_one()).collect()
    }
}

pub fn smith_normal_form<T: IntScalar>(a: &IntMatrix<T>) -> SmithDecomposition<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut u_inv = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut v_inv = IntMatrix::identity(n);

    // Row/column operations on D, mirrored on the transforms so A = U D V holds.
    let row_swap = |d: &mut IntMatrix<T>, u: &mut IntMatrix<T>, ui: &mut IntMatrix<T>, i: usize, j: usize| {
        d.swap_rows(i, j);
        u.swap_cols(i, j);
        ui.swap_rows(i, j);
    };
    let col_swap = |d: &mut IntMatrix<T>, v: &mut IntMatrix<T>, vi: &mut IntMatrix<T>, i: usize, j: usize| {
        d.swap_cols(i, j);
        v.swap_rows(i, j);
        vi.swap_cols(i, j);
    };
    // row[dst] += k row[src]
    let row_add = |d: &mut IntMatrix<T>, u: &mut IntMatrix<T>, ui: &mut IntMatrix<T>, src: usize, dst: usize, k: &T| {
        d.add_row_multiple(src, dst, k);
        u.add_col_multiple(dst, src, &-k.clone());
        ui.add_row_multiple(src, dst, k);
    };
    // col[dst] += k col[src]
    let col_add = |d: &mut IntMatrix<T>, v: &mut IntMatrix<T>, vi: &mut IntMatrix<T>, src: usize, dst: usize, k: &T| {
        d.add_col_multiple(src, dst, k);
        v.add_row_multiple(dst, src, &-k.clone());
        vi.add_col_multiple(src, dst, k);
    };

    for t in 0..m.min(n) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for r in t..m {
            for c in t..n {
                if !d[(r, c)].is_zero() && best.is_none_or(|(br, bc)| d[(r, c)].abs() < d[(br, bc)].abs()) {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        row_swap(&mut d, &mut u, &mut u_inv, t, pr);
        col_swap(&mut d, &mut v, &mut v_inv, t, pc);

        loop {
            let mut dirty = false;
            for r in t + 1..m {
                if d[(r, t)].is_zero() {
                    continue;
                }
                let q = d[(r, t)].div_floor(&d[(t, t)]);
                row_add(&mut d, &mut u, &mut u_inv, t, r, &-q);
                if !d[(r, t)].is_zero() {
                    row_swap(&mut d, &mut u, &mut u_inv, t, r);
                    dirty = true;
                }
            }
            for c in t + 1..n {
                if d[(t, c)].is_zero() {
                    continue;
                }
                let q = d[(t, c)].div_floor(&d[(t, t)]);
                col_add(&mut d, &mut v, &mut v_inv, t, c, &-q);
                if !d[(t, c)].is_zero() {
                    col_swap(&mut d, &mut v, &mut v_inv, t, c);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Divisibility: fold an offending row into the pivot row.
            let offender = (t + 1..m).find(|&r| (t + 1..n).any(|c| !d[(r, c)].is_multiple_of(&d[(t, t)])));
            match offender {
                Some(r) => row_add(&mut d, &mut u, &mut u_inv, r, t, &T::one()),
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_col(t);
            u_inv.negate_row(t);
        }
    }

    SmithDecomposition { u, d, v, u_inv, v_inv }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn check<T: IntScalar>(a: &IntMatrix<T>) -> SmithDecomposition<T> {
        let s = smith_normal_form(a);
        let back = s.u.mul(&s.d).unwrap().mul(&s.v).unwrap();
        assert_eq!(&back, a);
        assert_eq!(s.u.mul(&s.u_inv).unwrap(), IntMatrix::identity(a.rows()));
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), IntMatrix::identity(a.cols()));
        assert!(s.u.determinant().unwrap().abs().is_one());
        assert!(s.v.determinant().unwrap().abs().is_one());
        let diag = s.diagonal();
        for w in diag.windows(2) {
            if !w[0].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]), "{diag:?}");
            }
        }
        for r in 0..a.rows() {
            for c in 0..a.cols() {
                if r != c {
                    assert!(s.d[(r, c)].is_zero());
                }
            }
        }
        s
    }

    #[test]
    fn diag_2_3() {
        let s = check(&IntMatrix::<i64>::from_i64_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(s.diagonal(), vec![1, 6]);
    }

    #[test]
    fn nine40_group() {
        let q = IntMatrix::<BigInt>::from_i64_rows(&[
            vec![-3, -2, -1, -1],
            vec![-2, -5, -2, -3],
            vec![-1, -2, -4, -3],
            vec![-1, -3, -3, -5],
        ]);
        let s = check(&q);
        let d: Vec<i64> = s.diagonal().iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert_eq!(d, vec![1, 1, 5, 15]);
    }

    #[test]
    fn rectangular_and_zero() {
        check(&IntMatrix::<i64>::from_i64_rows(&[vec![2, 4, 4], vec![-6, 6, 12]]));
        check(&IntMatrix::<i64>::from_i64_rows(&[vec![0, 0], vec![0, 0], vec![0, 0]]));
        let s = check(&IntMatrix::<i64>::from_i64_rows(&[vec![4, 6], vec![6, 9]]));
        assert_eq!(s.diagonal(), vec![1, 0]);
    }
}
