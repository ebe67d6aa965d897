//! Laurent polynomials in one variable `q`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// Sparse Laurent polynomial `sum c_k q^k` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Laurent<T> {
    terms: BTreeMap<i32, T>,
}

impl<T> Laurent<T>
where
    T: Clone + Zero + One + PartialEq,
{
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(T::one(), 0)
    }

    /// The variable `q`.
    pub fn q() -> Self {
        Self::monomial(T::one(), 1)
    }

    pub fn monomial(c: T, deg: i32) -> Self {
        let mut p = Self::zero();
        p.add_term(deg, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (i32, T)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (d, c) in it {
            p.add_term(d, c);
        }
        p
    }

    pub fn add_term(&mut self, deg: i32, c: T) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(deg).or_insert_with(T::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.terms.remove(&deg);
        }
    }

    pub fn coeff(&self, deg: i32) -> T {
        self.terms.get(&deg).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &T)> {
        self.terms.iter().map(|(d, c)| (*d, c))
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// Multiply by `q^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self { terms: self.terms.iter().map(|(d, c)| (d + k, c.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> Self
    where
        T: Mul<Output = T>,
    {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute `q -> q^{-1}`.
    pub fn invert_variable(&self) -> Self {
        Self { terms: self.terms.iter().map(|(d, c)| (-d, c.clone())).collect() }
    }
}

impl<T> Laurent<T>
where
    T: Clone + Zero + One + PartialEq + Neg<Output = T> + Sub<Output = T>,
{
    /// Value at `q = i` as a Gaussian integer `(re, im)`.
    pub fn eval_at_i(&self) -> (T, T) {
        let mut re = T::zero();
        let mut im = T::zero();
        for (d, c) in self.terms() {
            match d.rem_euclid(4) {
                0 => re = re + c.clone(),
                1 => im = im + c.clone(),
                2 => re = re - c.clone(),
                _ => im = im - c.clone(),
            }
        }
        (re, im)
    }
}

impl<T> Default for Laurent<T>
where
    T: Clone + Zero + One + PartialEq,
{
    fn default() -> Self {
        Self::zero()
    }
}

impl<'a, T> Add<&'a Laurent<T>> for &'a Laurent<T>
where
    T: Clone + Zero + One + PartialEq,
{
    type Output = Laurent<T>;
    fn add(self, rhs: &'a Laurent<T>) -> Laurent<T> {
        let mut out = self.clone();
        for (d, c) in rhs.terms() {
            out.add_term(d, c.clone());
        }
        out
    }
}

impl<T> Add for Laurent<T>
where
    T: Clone + Zero + One + PartialEq,
{
    type Output = Laurent<T>;
    fn add(self, rhs: Laurent<T>) -> Laurent<T> {
        &self + &rhs
    }
}

impl<T> Neg for Laurent<T>
where
    T: Clone + Zero + One + PartialEq + Neg<Output = T>,
{
    type Output = Laurent<T>;
    fn neg(self) -> Laurent<T> {
        Laurent { terms: self.terms.into_iter().map(|(d, c)| (d, -c)).collect() }
    }
}

impl<T> Sub for Laurent<T>
where
    T: Clone + Zero + One + PartialEq + Neg<Output = T>,
{
    type Output = Laurent<T>;
    fn sub(self, rhs: Laurent<T>) -> Laurent<T> {
        self + (-rhs)
    }
}

impl<'a, T> Mul<&'a Laurent<T>> for &'a Laurent<T>
where
    T: Clone + Zero + One + PartialEq + Mul<Output = T>,
{
    type Output = Laurent<T>;
    fn mul(self, rhs: &'a Laurent<T>) -> Laurent<T> {
        let mut out = Laurent::zero();
        for (d1, c1) in self.terms() {
            for (d2, c2) in rhs.terms() {
                out.add_term(d1 + d2, c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<T> Mul for Laurent<T>
where
    T: Clone + Zero + One + PartialEq + Mul<Output = T>,
{
    type Output = Laurent<T>;
    fn mul(self, rhs: Laurent<T>) -> Laurent<T> {
        &self * &rhs
    }
}

impl<T> fmt::Display for Laurent<T>
where
    T: Clone + Zero + One + PartialEq + PartialOrd + Neg<Output = T> + fmt::Display,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (d, c)) in self.terms.iter().enumerate() {
            let neg = *c < T::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let unit = abs.is_one();
            match *d {
                0 => write!(f, "{abs}")?,
                1 if unit => write!(f, "q")?,
                1 => write!(f, "{abs}q")?,
                _ if unit => write!(f, "q^{d}")?,
                _ => write!(f, "{abs}q^{d}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type P = Laurent<i64>;

    #[test]
    fn arithmetic() {
        let q = P::q();
        let qi = P::monomial(1, -1);
        let s = &q + &qi;
        assert_eq!(s.pow(2), P::from_terms([(-2, 1), (0, 2), (2, 1)]));
        assert!((s.clone() - s).is_zero());
    }

    #[test]
    fn display() {
        let p = P::from_terms([(-1, 1), (1, 1), (9, -1), (0, -2)]);
        assert_eq!(p.to_string(), "q^-1 - 2 + q - q^9");
        assert_eq!(P::zero().to_string(), "0");
    }

    #[test]
    fn eval_at_i() {
        // 1 + q^2 = 0 at q = i; q at i is i.
        assert_eq!(P::from_terms([(0, 1), (2, 1)]).eval_at_i(), (0, 0));
        assert_eq!(P::q().eval_at_i(), (0, 1));
        assert_eq!(P::monomial(3, -1).eval_at_i(), (0, -3));
    }
}
