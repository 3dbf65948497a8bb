//! Exact q-series over the golden-ratio field.
//!
//! The arithmetic core is generic: [`field::Sqrt5`] works over any base
//! [`scalar::Field`], [`series::Series`] over any coefficient field, and the
//! numeric backend over any [`numeric::Real`]. The aliases below fix the
//! concrete types used by the identity checks and the CLI.

pub mod dsl;
mod error;
pub mod field;
pub mod numeric;
pub mod scalar;
pub mod series;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use series::{Comparison, Kernel};

/// Arbitrary-precision rational.
pub type Rational = num_rational::BigRational;
/// Exact element `a + b*sqrt(5)` of Q(sqrt 5).
pub type K5 = field::Sqrt5<Rational>;
/// Truncated q-series with exact Q(sqrt 5) coefficients.
pub type PSeries = series::Series<K5>;
/// Double-double real used by the numeric backend.
pub type Real = twofloat::TwoFloat;
/// Complex value over [`Real`].
pub type ComplexValue = num_complex::Complex<Real>;
