//! Exact intersection theory and slope stability for torus-equivariant
//! sheaves on smooth complete toric varieties.
//!
//! All arithmetic is exact. Lattice data is integral; subspaces, sheaves and
//! slopes are generic over an exact [`scalar::Field`], and intersection
//! numbers over any exact [`scalar::Scalar`] ring. The aliases below fix the
//! usual choices: arbitrary-precision rationals for fields and `i64` for
//! divisors and cycles.

pub mod catalog;
pub mod fan;
pub mod intersection;
pub mod linalg;
pub mod scalar;
pub mod sheaf;
pub mod stability;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;

pub use fan::{Fan, FanError, FanViolation, Wall};
pub use linalg::LatticeVector;
pub use stability::{Certificate, Verdict};

/// The exact field used by default.
pub type Rational = BigRational;

pub type Subspace = linalg::Subspace<Rational>;
pub type Filtration = sheaf::Filtration<Rational>;
pub type ReflexiveSheaf = sheaf::ReflexiveSheaf<Rational>;
pub type Divisor = intersection::TInvariantDivisor<i64>;
pub type ChowCycle = intersection::ChowCycle<i64>;
pub type StabilityReport = stability::StabilityReport<Rational>;
pub type Witness = stability::Witness<Rational>;
