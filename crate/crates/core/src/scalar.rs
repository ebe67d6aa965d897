//! Integer scalar abstraction shared by the exact linear algebra, the
//! circuit lattice and the d-invariant tables.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// An exact integer type usable as matrix entry.
///
/// Implemented for `i64`, `i128` and [`BigInt`]. Fixed-width types are faster
/// but may overflow on large Smith normal form computations; the crate-root
/// aliases default to `BigInt`.
pub trait IntScalar:
    Integer + Signed + Clone + Debug + Display + Hash + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self {
        <Self as FromPrimitive>::from_i64(v).expect("i64 fits every IntScalar")
    }
}

impl IntScalar for i64 {}
impl IntScalar for i128 {}
impl IntScalar for BigInt {}

/// Exact rational over an [`IntScalar`].
pub type Rational<T> = Ratio<T>;

pub(crate) fn int<T: IntScalar>(v: i64) -> T {
    <T as IntScalar>::from_i64(v)
}
