//! Exact computation and brute-force verification of lower bounds for the
//! restricted value sets
//!
//! ```text
//! { f(x1, ..., xn) : xi in Ai, xi != xj for i != j }
//! ```
//!
//! of polynomials `f = x1^k + ... + xn^k + g` with `deg g < k` over GF(p) and
//! the rationals.
//!
//! The crate is organised bottom-up:
//!
//! * [`field`]: GF(p) and rational arithmetic and the extended characteristic.
//! * [`polynomial`]: sparse multivariate polynomials, generic over a [`Scalar`].
//! * [`bounds`]: the closed-form lower bounds, computed over the integers.
//! * [`coeff`]: the closed-form coefficient of the power-sum/Vandermonde
//!   product, permutation signs, and the replay of the bound's proof.
//! * [`enumerate`]: exhaustive value-set enumeration (the ground truth).
//! * [`nullstellensatz`]: coefficient certificates with witness search.
//! * [`experiment`]: the sweeps and reports behind the `powersum` CLI.

pub mod bounds;
pub mod coeff;
pub mod enumerate;
pub mod experiment;
pub mod field;
pub mod nullstellensatz;
pub mod polynomial;
pub mod scalar;

pub use field::{ExtendedNat, Field, FieldElement, FieldError};
pub use polynomial::{PowerSumForm, SparsePoly};
pub use scalar::Scalar;

/// Arbitrary-precision integers, the scalar domain of the coefficient identities.
pub type Integer = num_bigint::BigInt;
/// Arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;

pub type IntPoly = SparsePoly<Integer>;
pub type RatPoly = SparsePoly<Rational>;
pub type IntForm = PowerSumForm<Integer>;
pub type RatForm = PowerSumForm<Rational>;
