//! The coefficient of `prod_j x_j^{k q_j + j - 1}` in
//! `(x_1^k + ... + x_n^k)^N prod_{i<j} (x_j - x_i)`.
//!
//! [`coeff_closed_form`] evaluates the product formula exactly and
//! [`coeff_oracle`] expands the polynomial and reads the coefficient off; the
//! two are compared in sweeps. Permutation signs, falling factorials and the
//! Leibniz determinant support the intermediate identities, and
//! [`proof_replay`] runs the shrinking construction on concrete families.

mod formula;
mod permutation;
mod replay;

use thiserror::Error;

use crate::enumerate::EnumError;
use crate::field::FieldError;
use crate::polynomial::PolyError;

pub use formula::{
    coeff_closed_form, coeff_oracle, coeff_oracle_capped, factorial, falling_factorial,
    leibniz_determinant, multinomial, oracle_product, residue_of, target_exponents,
    vandermonde_value, CoeffCertificate, OracleCache, ResidueClassDecomposition,
};
pub use permutation::{sign_multiplicativity, Permutation};
pub use replay::{h_literal, proof_replay, ReplayOptions, ReplayRecord, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoeffError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("internal invariant broken: {0}")]
    InternalInvariantBroken(String),
    #[error("the permutation does not map the subset to itself (element {element})")]
    NotInvariant { element: usize },
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Enumerate(#[from] EnumError),
}

/// Serializes big integers as decimal strings.
pub(crate) mod decimal {
    use num_bigint::BigInt;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub mod option {
        use num_bigint::BigInt;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(v) => s.serialize_str(&v.to_string()),
                None => s.serialize_none(),
            }
        }
    }
}
