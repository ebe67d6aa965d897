//! Characteristic covectors of a negative-definite integer form, their
//! classes modulo `2 Q`, and the rational grading `(max K^2 + b) / 4` of each
//! class.

use num_rational::Ratio;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{smith_normal_form, IntMatrix, SmithDecomposition};
use crate::scalar::{int, IntScalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DinvError {
    #[error("form is not negative definite")]
    IndefiniteForm,
}

/// One class of characteristic covectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharClass<T: IntScalar> {
    /// Coordinates in `Z/n_1 + ... + Z/n_k` relative to the self-conjugate class.
    pub label: Vec<T>,
    /// A covector of maximal square in the class.
    pub representative: Vec<T>,
    pub max_square: Ratio<T>,
    pub d: Ratio<T>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DTable<T: IntScalar> {
    pub classes: Vec<CharClass<T>>,
    pub b: usize,
    pub det: T,
    /// Invariant factors of the cokernel, excluding ones.
    pub invariant_factors: Vec<T>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DTableJson {
    pub b: usize,
    pub det: String,
    pub invariant_factors: Vec<String>,
    pub classes: Vec<ClassJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassJson {
    pub label: Vec<String>,
    pub representative: Vec<String>,
    pub max_square: String,
    pub d: String,
}

/// Labels classes by cokernel coordinates through a Smith decomposition
/// `Q = U D V`: the class of `K = c0 + 2y` is `U^{-1} y mod D`.
#[derive(Clone, Debug)]
pub struct ClassLabeler<T: IntScalar> {
    snf: SmithDecomposition<T>,
    /// Positions of the diagonal entries different from one.
    factor_positions: Vec<usize>,
    base: Vec<T>,
    origin: Vec<T>,
}

impl<T: IntScalar> ClassLabeler<T> {
    pub fn new(q: &IntMatrix<T>) -> Self {
        let snf = smith_normal_form(q);
        let diag = snf.diagonal();
        let factor_positions: Vec<usize> = (0..diag.len()).filter(|&i| !diag[i].is_one()).collect();
        let base: Vec<T> = (0..q.rows()).map(|i| q[(i, i)].mod_floor(&int(2))).collect();
        let mut l = Self { snf, factor_positions, base, origin: Vec::new() };
        l.origin = l.self_conjugate_raw();
        l
    }

    pub fn moduli(&self) -> Vec<T> {
        let diag = self.snf.diagonal();
        self.factor_positions.iter().map(|&i| diag[i].abs()).collect()
    }

    pub fn class_count(&self) -> usize {
        self.moduli().iter().map(|m| m.to_usize().expect("small group")).product()
    }

    /// Raw coordinates of a characteristic covector.
    fn raw_label(&self, k: &[T]) -> Vec<T> {
        let two: T = int(2);
        let y: Vec<T> = k.iter().zip(&self.base).map(|(ki, ci)| (ki.clone() - ci.clone()) / two.clone()).collect();
        let u = self.snf.u_inv.apply(&y);
        self.factor_positions.iter().zip(self.moduli()).map(|(&i, m)| u[i].mod_floor(&m)).collect()
    }

    /// Label relative to the self-conjugate origin.
    pub fn label(&self, k: &[T]) -> Vec<T> {
        let raw = self.raw_label(k);
        raw.iter().zip(&self.origin).zip(self.moduli()).map(|((r, o), m)| (r.clone() - o.clone()).mod_floor(&m)).collect()
    }

    /// A characteristic covector with the given raw label.
    fn covector(&self, raw: &[T]) -> Vec<T> {
        let mut z = vec![T::zero(); self.base.len()];
        for (&i, r) in self.factor_positions.iter().zip(raw) {
            z[i] = r.clone();
        }
        let y = self.snf.u.apply(&z);
        y.into_iter().zip(&self.base).map(|(yi, ci)| ci.clone() + yi * int(2)).collect()
    }

    fn all_raw(&self) -> Vec<Vec<T>> {
        let mut out: Vec<Vec<T>> = vec![Vec::new()];
        for m in self.moduli() {
            let n = m.to_i64().expect("small modulus");
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..n).map(move |v| {
                        let mut p = prefix.clone();
                        p.push(int(v));
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// Smallest raw label fixed by `K -> -K`.
    fn self_conjugate_raw(&self) -> Vec<T> {
        self.all_raw()
            .into_iter()
            .find(|raw| {
                let k = self.covector(raw);
                let neg: Vec<T> = k.iter().map(|x| -x.clone()).collect();
                &self.raw_label(&neg) == raw
            })
            .expect("a spin structure always exists")
    }

    /// Label of the conjugate class.
    pub fn conjugate(&self, label: &[T]) -> Vec<T> {
        label.iter().zip(self.moduli()).map(|(l, m)| (-l.clone()).mod_floor(&m)).collect()
    }

    /// One characteristic covector per class, ordered by label.
    pub fn representatives(&self) -> Vec<(Vec<T>, Vec<T>)> {
        let mut reps: Vec<(Vec<T>, Vec<T>)> = self
            .all_raw()
            .into_iter()
            .map(|raw| {
                let k = self.covector(&raw);
                (self.label(&k), k)
            })
            .collect();
        reps.sort();
        reps
    }
}

/// `K Q^{-1} K^T` as an exact rational.
pub fn square<T: IntScalar>(q: &IntMatrix<T>, k: &[T]) -> Ratio<T> {
    if k.is_empty() {
        return Ratio::zero();
    }
    let det = q.determinant().expect("square");
    let adj = q.adjugate().expect("square");
    Ratio::new(adj.bilinear(k, k), det)
}

/// Exact `P = R^T D R` with `R` unit upper triangular.
fn ldl<T: IntScalar>(p: &IntMatrix<T>) -> (Vec<Ratio<T>>, Vec<Vec<Ratio<T>>>) {
    let n = p.rows();
    let mut d: Vec<Ratio<T>> = vec![Ratio::zero(); n];
    let mut r: Vec<Vec<Ratio<T>>> = vec![vec![Ratio::zero(); n]; n];
    for i in 0..n {
        r[i][i] = Ratio::one();
        let mut di = Ratio::from_integer(p[(i, i)].clone());
        for k in 0..i {
            di = di - d[k].clone() * r[k][i].clone() * r[k][i].clone();
        }
        d[i] = di;
        for j in i + 1..n {
            let mut v = Ratio::from_integer(p[(i, j)].clone());
            for k in 0..i {
                v = v - d[k].clone() * r[k][i].clone() * r[k][j].clone();
            }
            r[i][j] = v / d[i].clone();
        }
    }
    (d, r)
}

/// Integer vector minimizing `(v - c)^T P (v - c)` for positive-definite `P`,
/// by exhaustive enumeration inside the shrinking ellipsoid.
fn closest_vector<T: IntScalar>(p: &IntMatrix<T>, c: &[Ratio<T>]) -> (Vec<T>, Ratio<T>) {
    let n = c.len();
    let (d, r) = ldl(p);
    let eval = |v: &[T]| -> Ratio<T> {
        let t: Vec<Ratio<T>> = v.iter().zip(c).map(|(x, ci)| Ratio::from_integer(x.clone()) - ci.clone()).collect();
        (0..n).fold(Ratio::zero(), |acc, k| {
            let s = (k..n).fold(Ratio::zero(), |s, j| s + r[k][j].clone() * t[j].clone());
            acc + d[k].clone() * s.clone() * s
        })
    };
    let mut best: Vec<T> = c.iter().map(|x| x.round().to_integer()).collect();
    let mut bound = eval(&best);

    struct Search<'a, T: IntScalar> {
        d: &'a [Ratio<T>],
        r: &'a [Vec<Ratio<T>>],
        c: &'a [Ratio<T>],
        v: Vec<T>,
        best: Vec<T>,
        bound: Ratio<T>,
    }
    impl<T: IntScalar> Search<'_, T> {
        fn level(&mut self, k: usize, partial: Ratio<T>) {
            let n = self.c.len();
            // Center of coordinate k given the fixed tail.
            let mut shift = Ratio::zero();
            for j in k + 1..n {
                shift = shift + self.r[k][j].clone() * (Ratio::from_integer(self.v[j].clone()) - self.c[j].clone());
            }
            let center = self.c[k].clone() - shift;
            let start = center.round().to_integer();
            let cost = |x: &T| -> Ratio<T> {
                let t = Ratio::from_integer(x.clone()) - center.clone();
                self.d[k].clone() * t.clone() * t
            };
            for dir in [1i64, -1] {
                let mut x = if dir == 1 { start.clone() } else { start.clone() - T::one() };
                loop {
                    let total = partial.clone() + cost(&x);
                    if total > self.bound {
                        break;
                    }
                    self.v[k] = x.clone();
                    if k == 0 {
                        if total < self.bound || (total == self.bound && self.v < self.best) {
                            self.bound = total;
                            self.best = self.v.clone();
                        }
                    } else {
                        self.level(k - 1, total);
                    }
                    x = x + int(dir);
                }
            }
        }
    }
    if n > 0 {
        let mut s = Search { d: &d, r: &r, c, v: vec![T::zero(); n], best: best.clone(), bound: bound.clone() };
        s.level(n - 1, Ratio::zero());
        best = s.best;
        bound = s.bound;
    }
    (best, bound)
}

/// Maximal square in the class of `k` and a covector attaining it.
///
/// With `K = Q y`, members are `Q (y + 2v)` and `K^2 = -4 (v + y/2)^T P (v + y/2)`
/// for `P = -Q`, so the maximum is a closest-vector problem.
pub fn max_square<T: IntScalar>(q: &IntMatrix<T>, k: &[T]) -> (Ratio<T>, Vec<T>) {
    if k.is_empty() {
        return (Ratio::zero(), Vec::new());
    }
    let inv = q.inverse_rational().expect("nonsingular");
    let n = k.len();
    let y: Vec<Ratio<T>> =
        (0..n).map(|i| (0..n).fold(Ratio::zero(), |acc, j| acc + inv[i][j].clone() * Ratio::from_integer(k[j].clone()))).collect();
    let half: Ratio<T> = Ratio::new(int(-1), int(2));
    let target: Vec<Ratio<T>> = y.iter().map(|yi| yi.clone() * half.clone()).collect();
    let p = q.neg();
    let (v, _) = closest_vector(&p, &target);
    let shift = q.apply(&v);
    let best: Vec<T> = k.iter().zip(shift).map(|(ki, s)| ki.clone() + s * int(2)).collect();
    (square(q, &best), best)
}

/// One representative per class, ordered by label.
pub fn enumerate_classes<T: IntScalar>(q: &IntMatrix<T>) -> Result<Vec<(Vec<T>, Vec<T>)>, DinvError> {
    if q.rows() > 0 && !q.is_negative_definite() {
        return Err(DinvError::IndefiniteForm);
    }
    if q.rows() == 0 {
        return Ok(vec![(Vec::new(), Vec::new())]);
    }
    Ok(ClassLabeler::new(q).representatives())
}

/// `(label, class)` pairs of the cokernel with the spin class at the origin.
pub fn spinc_labels<T: IntScalar>(q: &IntMatrix<T>) -> Result<Vec<Vec<T>>, DinvError> {
    Ok(enumerate_classes(q)?.into_iter().map(|(l, _)| l).collect())
}

pub fn d_table<T: IntScalar>(q: &IntMatrix<T>) -> Result<DTable<T>, DinvError> {
    let reps = enumerate_classes(q)?;
    let b = q.rows();
    let quarter = |m: &Ratio<T>| (m.clone() + Ratio::from_integer(int::<T>(b as i64))) / Ratio::from_integer(int::<T>(4));
    let classes: Vec<CharClass<T>> = reps
        .into_par_iter()
        .map(|(label, k)| {
            let (max, rep) = max_square(q, &k);
            CharClass { d: quarter(&max), label, representative: rep, max_square: max }
        })
        .collect();
    let (det, invariant_factors) = if b == 0 {
        (T::one(), Vec::new())
    } else {
        (q.determinant().expect("square").abs(), ClassLabeler::new(q).moduli())
    };
    Ok(DTable { classes, b, det, invariant_factors })
}

impl<T: IntScalar> DTable<T> {
    pub fn d_of(&self, label: &[T]) -> Option<&Ratio<T>> {
        self.classes.iter().find(|c| c.label == label).map(|c| &c.d)
    }

    /// d-values sorted, as a multiset.
    pub fn d_multiset(&self) -> Vec<Ratio<T>> {
        let mut v: Vec<Ratio<T>> = self.classes.iter().map(|c| c.d.clone()).collect();
        v.sort();
        v
    }

    /// Whether every class has the same d as its conjugate.
    pub fn is_conjugation_symmetric(&self) -> bool {
        let moduli = &self.invariant_factors;
        self.classes.iter().all(|c| {
            let conj: Vec<T> = c.label.iter().zip(moduli).map(|(l, m)| (-l.clone()).mod_floor(m)).collect();
            self.d_of(&conj) == Some(&c.d)
        })
    }

    /// `label_1,...,label_k,d` lines with a header.
    pub fn to_csv(&self) -> String {
        let k = self.invariant_factors.len();
        let mut out: Vec<String> = vec![(1..=k).map(|i| format!("label_{i}")).chain(["d".to_string()]).collect::<Vec<_>>().join(",")];
        for c in &self.classes {
            let mut row: Vec<String> = c.label.iter().map(|l| l.to_string()).collect();
            row.push(c.d.to_string());
            out.push(row.join(","));
        }
        out.join("\n") + "\n"
    }

    pub fn to_json(&self) -> DTableJson {
        let s = |v: &[T]| v.iter().map(|x| x.to_string()).collect();
        DTableJson {
            b: self.b,
            det: self.det.to_string(),
            invariant_factors: s(&self.invariant_factors),
            classes: self
                .classes
                .iter()
                .map(|c| ClassJson {
                    label: s(&c.label),
                    representative: s(&c.representative),
                    max_square: c.max_square.to_string(),
                    d: c.d.to_string(),
                })
                .collect(),
        }
    }
}

/// Sign-insensitive check that `Q` is a valid input (used by callers that
/// accept either sign convention).
pub fn is_definite<T: IntScalar>(q: &IntMatrix<T>) -> bool {
    q.is_negative_definite() || q.neg().is_negative_definite()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn m(rows: &[Vec<i64>]) -> IntMatrix<i64> {
        IntMatrix::from_i64_rows(rows)
    }

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn unimodular_minus_one() {
        let q = m(&[vec![-1]]);
        assert_eq!(enumerate_classes(&q).unwrap().len(), 1);
        let (max, _) = max_square(&q, &[1]);
        assert_eq!(max, r(-1, 1));
        let t = d_table(&q).unwrap();
        assert_eq!(t.d_multiset(), vec![r(0, 1)]);
        assert_eq!(spinc_labels(&q).unwrap(), vec![Vec::<i64>::new()]);
    }

    #[test]
    fn minus_two() {
        let q = m(&[vec![-2]]);
        let reps = enumerate_classes(&q).unwrap();
        assert_eq!(reps.len(), 2);
        // Origin is the class of K = 0.
        assert_eq!(reps[0].0, vec![0]);
        assert_eq!(ClassLabeler::new(&q).label(&[0]), vec![0]);
        assert_eq!(ClassLabeler::new(&q).label(&[2]), vec![1]);
        let t = d_table(&q).unwrap();
        assert_eq!(t.d_of(&[0]), Some(&r(1, 4)));
        assert_eq!(t.d_of(&[1]), Some(&r(-1, 4)));
        assert!(t.is_conjugation_symmetric());
    }

    #[test]
    fn a2_lattice() {
        let q = m(&[vec![-2, 1], vec![1, -2]]);
        let t = d_table(&q).unwrap();
        assert_eq!(t.classes.len(), 3);
        assert_eq!(t.d_of(&[0]), Some(&r(1, 2)));
        assert_eq!(max_square(&q, &[0, 0]).0, r(0, 1));
    }

    #[test]
    fn empty_form() {
        let q: IntMatrix<i64> = IntMatrix::zeros(0, 0);
        let t = d_table(&q).unwrap();
        assert_eq!(t.d_multiset(), vec![r(0, 1)]);
    }

    #[test]
    fn indefinite_rejected() {
        assert_eq!(enumerate_classes(&m(&[vec![1]])), Err(DinvError::IndefiniteForm));
        assert_eq!(enumerate_classes(&m(&[vec![-1, 2], vec![2, -1]])), Err(DinvError::IndefiniteForm));
    }

    #[test]
    fn printed_form_class_count() {
        let q = IntMatrix::<BigInt>::from_i64_rows(&[
            vec![-3, -2, -1, -1],
            vec![-2, -5, -2, -3],
            vec![-1, -2, -4, -3],
            vec![-1, -3, -3, -5],
        ]);
        let t = d_table(&q).unwrap();
        assert_eq!(t.classes.len(), 75);
        assert_eq!(t.invariant_factors, vec![BigInt::from(5), BigInt::from(15)]);
        assert!(t.is_conjugation_symmetric());
        assert_eq!(t.classes[0].d, Ratio::new(BigInt::from(-1), BigInt::from(2)));
    }
}
