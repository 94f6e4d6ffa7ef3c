//! Coefficient domains for exact polynomial arithmetic.
//!
//! Polynomials are generic over any [`Scalar`]: an exact commutative ring
//! element from `num-traits` that also knows how to map itself into one of
//! the supported fields. Floating point types deliberately do not implement
//! it.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, NumAssign, Signed, ToPrimitive};

use crate::field::{Field, FieldElement, FieldError};

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Num
    + NumAssign
    + Signed
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Converts an integer, failing when it does not fit the domain.
    fn from_integer(n: &BigInt) -> Option<Self>;

    /// Image of this scalar under the canonical map into `field`.
    fn to_field(&self, field: Field) -> Result<FieldElement, FieldError>;

    fn from_i64(n: i64) -> Self {
        Self::from_integer(&BigInt::from(n)).expect("every scalar domain contains i64")
    }
}

impl Scalar for i64 {
    fn from_integer(n: &BigInt) -> Option<Self> {
        n.to_i64()
    }

    fn to_field(&self, field: Field) -> Result<FieldElement, FieldError> {
        Ok(field.embed_i64(*self))
    }
}

impl Scalar for i128 {
    fn from_integer(n: &BigInt) -> Option<Self> {
        n.to_i128()
    }

    fn to_field(&self, field: Field) -> Result<FieldElement, FieldError> {
        Ok(field.embed_integer(&BigInt::from(*self)))
    }
}

impl Scalar for BigInt {
    fn from_integer(n: &BigInt) -> Option<Self> {
        Some(n.clone())
    }

    fn to_field(&self, field: Field) -> Result<FieldElement, FieldError> {
        Ok(field.embed_integer(self))
    }
}

impl Scalar for BigRational {
    fn from_integer(n: &BigInt) -> Option<Self> {
        Some(BigRational::from_integer(n.clone()))
    }

    fn to_field(&self, field: Field) -> Result<FieldElement, FieldError> {
        field.embed_rational(self)
    }
}
