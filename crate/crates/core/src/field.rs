//! Exact arithmetic in the prime fields GF(p) and in the rationals.
//!
//! Every bound in this crate depends on the field only through its extended
//! characteristic: `p` for GF(p) and [`ExtendedNat::Infinity`] for the
//! rationals.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields ({left} vs {right})")]
    FieldMismatch { left: Field, right: Field },
    #[error("unrecognised field `{0}` (expected `gf(<prime>)` or `rational`)")]
    BadFieldName(String),
    #[error("cannot parse `{text}` as an element of {field}")]
    BadElement { text: String, field: Field },
    #[error("{value} has no image in {field}")]
    NotRepresentable { value: String, field: Field },
}

/// A positive integer or `+infinity`; the type of the characteristic `p(F)`.
///
/// The derived ordering places every finite value below `Infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedNat {
    Finite(u64),
    Infinity,
}

impl ExtendedNat {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedNat::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtendedNat::Finite(v) => Some(v),
            ExtendedNat::Infinity => None,
        }
    }

    /// `min{self, x}`.
    pub fn min_with(self, x: u64) -> u64 {
        match self {
            ExtendedNat::Finite(v) => v.min(x),
            ExtendedNat::Infinity => x,
        }
    }

    /// `self - d`, with `Infinity - d = Infinity` and saturation at zero.
    pub fn saturating_sub(self, d: u64) -> ExtendedNat {
        match self {
            ExtendedNat::Finite(v) => ExtendedNat::Finite(v.saturating_sub(d)),
            ExtendedNat::Infinity => ExtendedNat::Infinity,
        }
    }

    /// True when `self > x`.
    pub fn exceeds(self, x: u64) -> bool {
        self > ExtendedNat::Finite(x)
    }
}

impl fmt::Display for ExtendedNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedNat::Finite(v) => write!(f, "{v}"),
            ExtendedNat::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedNat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldKind {
    Prime(u64),
    Rational,
}

/// Descriptor of GF(p) or the rationals. Primality is checked on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field(FieldKind);

/// Builds a field from a kind tag and an optional modulus.
pub fn make_field(kind: FieldType, p: Option<u64>) -> Result<Field, FieldError> {
    match kind {
        FieldType::Prime => Field::prime(p.unwrap_or(0)),
        FieldType::Rational => Ok(Field::rational()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldType {
    Prime,
    Rational,
}

impl Field {
    pub fn prime(p: u64) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        // Products of residues are formed in u128, so any u64 prime is safe.
        Ok(Field(FieldKind::Prime(p)))
    }

    pub fn rational() -> Field {
        Field(FieldKind::Rational)
    }

    pub fn kind(self) -> FieldKind {
        self.0
    }

    pub fn modulus(self) -> Option<u64> {
        match self.0 {
            FieldKind::Prime(p) => Some(p),
            FieldKind::Rational => None,
        }
    }

    pub fn characteristic(self) -> ExtendedNat {
        match self.0 {
            FieldKind::Prime(p) => ExtendedNat::Finite(p),
            FieldKind::Rational => ExtendedNat::Infinity,
        }
    }

    pub fn zero(self) -> FieldElement {
        self.embed_i64(0)
    }

    pub fn one(self) -> FieldElement {
        self.embed_i64(1)
    }

    /// `n·e`, where `e` is the identity of the field.
    pub fn embed_integer(self, n: &BigInt) -> FieldElement {
        match self.0 {
            FieldKind::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                FieldElement::residue(p, r.to_u64().expect("residue below modulus"))
            }
            FieldKind::Rational => FieldElement::ratio(BigRational::from_integer(n.clone())),
        }
    }

    pub fn embed_i64(self, n: i64) -> FieldElement {
        match self.0 {
            FieldKind::Prime(p) => {
                FieldElement::residue(p, (n as i128).rem_euclid(p as i128) as u64)
            }
            FieldKind::Rational => FieldElement::ratio(BigRational::from_integer(n.into())),
        }
    }

    pub fn embed_rational(self, q: &BigRational) -> Result<FieldElement, FieldError> {
        match self.0 {
            FieldKind::Prime(_) => {
                let num = self.embed_integer(q.numer());
                let den = self.embed_integer(q.denom());
                num.div(&den).map_err(|_| FieldError::NotRepresentable {
                    value: q.to_string(),
                    field: self,
                })
            }
            FieldKind::Rational => Ok(FieldElement::ratio(q.clone())),
        }
    }

    /// All elements of a prime field in canonical order; `None` for the rationals.
    pub fn elements(self) -> Option<Vec<FieldElement>> {
        self.modulus()
            .map(|p| (0..p).map(|v| FieldElement::residue(p, v)).collect())
    }

    /// Parses `"3"`, `"-2"`, or `"a/b"` into an element of this field.
    pub fn parse_element(self, text: &str) -> Result<FieldElement, FieldError> {
        let bad = || FieldError::BadElement {
            text: text.to_string(),
            field: self,
        };
        let t = text.trim();
        let q = match t.split_once('/') {
            Some((a, b)) => {
                let a = BigInt::from_str(a.trim()).map_err(|_| bad())?;
                let b = BigInt::from_str(b.trim()).map_err(|_| bad())?;
                if b.is_zero() {
                    return Err(bad());
                }
                BigRational::new(a, b)
            }
            None => BigRational::from_integer(BigInt::from_str(t).map_err(|_| bad())?),
        };
        self.embed_rational(&q)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            FieldKind::Prime(p) => write!(f, "gf({p})"),
            FieldKind::Rational => f.write_str("rational"),
        }
    }
}

impl FromStr for Field {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        if lower == "rational" {
            return Ok(Field::rational());
        }
        let digits = lower
            .strip_prefix("gf(")
            .and_then(|rest| rest.strip_suffix(')'))
            .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| FieldError::BadFieldName(s.to_string()))?;
        let p = digits
            .parse::<u64>()
            .map_err(|_| FieldError::BadFieldName(s.to_string()))?;
        Field::prime(p)
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Repr {
    Residue { modulus: u64, value: u64 },
    Ratio(BigRational),
}

/// An element of GF(p) (canonical residue in `[0, p)`) or of the rationals
/// (fraction in lowest terms, positive denominator).
///
/// Equality is representation equality, which is canonical.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement(Repr);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Applies `op` to two elements of the same field.
pub fn element_arithmetic(
    a: &FieldElement,
    b: &FieldElement,
    op: ArithOp,
) -> Result<FieldElement, FieldError> {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b),
    }
}

fn inverse_mod(a: u64, p: u64) -> u64 {
    let g = (a as i128).extended_gcd(&(p as i128));
    debug_assert_eq!(g.gcd, 1);
    g.x.rem_euclid(p as i128) as u64
}

impl FieldElement {
    fn residue(modulus: u64, value: u64) -> Self {
        debug_assert!(value < modulus);
        FieldElement(Repr::Residue { modulus, value })
    }

    fn ratio(q: BigRational) -> Self {
        FieldElement(Repr::Ratio(q))
    }

    pub fn field(&self) -> Field {
        match &self.0 {
            Repr::Residue { modulus, .. } => Field(FieldKind::Prime(*modulus)),
            Repr::Ratio(_) => Field::rational(),
        }
    }

    /// The canonical residue, for elements of a prime field.
    pub fn residue_value(&self) -> Option<u64> {
        match &self.0 {
            Repr::Residue { value, .. } => Some(*value),
            Repr::Ratio(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.0 {
            Repr::Ratio(q) => Some(q),
            Repr::Residue { .. } => None,
        }
    }

    /// A rational lift: the residue itself for GF(p), the value for the rationals.
    pub fn lift(&self) -> BigRational {
        match &self.0 {
            Repr::Residue { value, .. } => BigRational::from_integer((*value).into()),
            Repr::Ratio(q) => q.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Residue { value, .. } => *value == 0,
            Repr::Ratio(q) => q.is_zero(),
        }
    }

    fn check(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.field() != other.field() {
            return Err(FieldError::FieldMismatch {
                left: self.field(),
                right: other.field(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        Ok(match (&self.0, &other.0) {
            (Repr::Residue { modulus, value: a }, Repr::Residue { value: b, .. }) => Self::residue(
                *modulus,
                ((*a as u128 + *b as u128) % *modulus as u128) as u64,
            ),
            (Repr::Ratio(a), Repr::Ratio(b)) => Self::ratio(a + b),
            _ => unreachable!("field checked"),
        })
    }

    pub fn neg(&self) -> FieldElement {
        match &self.0 {
            Repr::Residue { modulus, value } => {
                Self::residue(*modulus, (modulus - value) % modulus)
            }
            Repr::Ratio(q) => Self::ratio(-q),
        }
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        Ok(match (&self.0, &other.0) {
            (Repr::Residue { modulus, value: a }, Repr::Residue { value: b, .. }) => Self::residue(
                *modulus,
                ((*a as u128 * *b as u128) % *modulus as u128) as u64,
            ),
            (Repr::Ratio(a), Repr::Ratio(b)) => Self::ratio(a * b),
            _ => unreachable!("field checked"),
        })
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(match &self.0 {
            Repr::Residue { modulus, value } => {
                Self::residue(*modulus, inverse_mod(*value, *modulus))
            }
            Repr::Ratio(q) => Self::ratio(q.recip()),
        })
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check(other)?;
        self.mul(&other.inv()?)
    }

    pub fn pow(&self, mut e: u64) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.field().one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same field");
            }
            base = base.mul(&base).expect("same field");
            e >>= 1;
        }
        acc
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Residues order numerically, rationals by value.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Residue { value, .. } => write!(f, "{value}"),
            Repr::Ratio(q) if q.denom().is_one() => write!(f, "{}", q.numer()),
            Repr::Ratio(q) => write!(f, "{}/{}", q.numer(), q.denom()),
        }
    }
}

impl Serialize for FieldElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
