//! Scalar traits shared by the exact algebra modules.
//!
//! Everything in this crate is exact. The linear-algebra and exterior-algebra
//! code is written against [`Ring`], which is implemented for the machine
//! integers, for [`BigInt`], and for [`Polynomial`](crate::polyring::Polynomial)
//! over any of those. Lattice computations additionally need division with
//! remainder and are bounded by [`EuclideanInt`].

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::ops::{Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A commutative ring with exact equality.
pub trait Ring:
    Clone + PartialEq + Debug + Zero + One + Neg<Output = Self> + Sub<Output = Self>
{
    /// Image of a machine integer under the unique ring map from the integers.
    fn from_i64(n: i64) -> Self;
}

/// Integer types usable as polynomial coefficients and as entries of
/// Hermite normal form computations.
pub trait EuclideanInt:
    Ring + Integer + Signed + Ord + Hash + Display + Send + Sync + 'static
{
    fn to_i64(&self) -> Option<i64>;
}

macro_rules! impl_machine_int {
    ($($t:ty),*) => {$(
        impl Ring for $t {
            fn from_i64(n: i64) -> Self {
                n as $t
            }
        }

        impl EuclideanInt for $t {
            fn to_i64(&self) -> Option<i64> {
                i64::try_from(*self).ok()
            }
        }
    )*};
}

impl_machine_int!(i64, i128);

impl Ring for BigInt {
    fn from_i64(n: i64) -> Self {
        BigInt::from(n)
    }
}

impl EuclideanInt for BigInt {
    fn to_i64(&self) -> Option<i64> {
        num_traits::ToPrimitive::to_i64(self)
    }
}
