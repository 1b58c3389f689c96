use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

/// An exact, totally ordered scalar ring.
///
/// Intersection numbers and divisor coefficients live in a `Scalar`; the
/// usual choices are `i64`, `i128`, `BigInt` or a rational type. Floating
/// point types do not qualify since they are neither `Eq` nor `Ord`.
pub trait Scalar:
    Clone + Debug + Display + Eq + Ord + Hash + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer out of range for scalar type")
    }
}

impl<T> Scalar for T where
    T: Clone + Debug + Display + Eq + Ord + Hash + Num + Signed + FromPrimitive + Send + Sync + 'static
{
}

/// A `Scalar` with exact division. Subspaces and slopes are computed over one.
pub trait Field: Scalar {}

impl<T> Field for Ratio<T>
where
    T: Clone + Integer + Signed,
    Ratio<T>: Scalar,
{
}
