//! Exact sparse multivariate polynomials.
//!
//! Terms live in a map from exponent vectors to nonzero coefficients, ordered
//! by graded lexicographic order so iteration and printing are reproducible.
//! These polynomials are the brute-force substrate: the coefficient oracle
//! and the Nullstellensatz certifier both work by literal expansion.

mod eval;
mod parse;
mod power_sum;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::field::{Field, FieldElement, FieldError};
use crate::scalar::Scalar;

pub use eval::FieldPoly;
pub use parse::{parse_poly, ParseError};
pub use power_sum::{power_sum_pow, power_sum_pow_by_powering, vandermonde, PowerSumForm};

/// Default cap on the number of terms an expansion may produce.
pub const DEFAULT_TERM_CAP: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("arity mismatch: {left} vs {right} variables")]
    ArityMismatch { left: usize, right: usize },
    #[error("expansion exceeded {cap} terms")]
    ExpansionTooLarge { cap: usize },
    #[error("tail has degree {degree}, must be below k = {k}")]
    TailDegree { degree: u32, k: u32 },
    #[error("leading coefficient a{index} is zero")]
    ZeroLeading { index: usize },
    #[error("k must be positive")]
    ZeroExponent,
    #[error("tail declared symmetric but is not invariant under swapping x{0} and x{1}")]
    NotSymmetric(usize, usize),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Exponent vector `(k1, ..., kn)` of the monomial `x1^k1 ... xn^kn`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Exponents(Vec<u32>);

impl Exponents {
    pub fn new(exponents: Vec<u32>) -> Self {
        Exponents(exponents)
    }

    pub fn zero(nvars: usize) -> Self {
        Exponents(vec![0; nvars])
    }

    /// The monomial `x_{var+1}^power` (variables are zero-indexed here).
    pub fn single(nvars: usize, var: usize, power: u32) -> Self {
        let mut e = vec![0; nvars];
        e[var] = power;
        Exponents(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    fn add(&self, other: &Exponents) -> Exponents {
        Exponents(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<u32>> for Exponents {
    fn from(v: Vec<u32>) -> Self {
        Exponents(v)
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Graded lexicographic: total degree first, then lexicographic.
impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparsePoly<T> {
    nvars: usize,
    terms: BTreeMap<Exponents, T>,
}

impl<T: Scalar> SparsePoly<T> {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: T) -> Self {
        Self::monomial(Exponents::zero(nvars), c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, T::one())
    }

    /// The variable `x_{index+1}`.
    pub fn var(nvars: usize, index: usize) -> Self {
        Self::monomial(Exponents::single(nvars, index, 1), T::one())
    }

    pub fn monomial(exponents: Exponents, c: T) -> Self {
        let nvars = exponents.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exponents, c);
        }
        SparsePoly { nvars, terms }
    }

    /// Builds a polynomial from raw terms, merging duplicates and dropping zeros.
    pub fn from_terms(
        nvars: usize,
        terms: impl IntoIterator<Item = (Exponents, T)>,
    ) -> Result<Self, PolyError> {
        let mut acc: BTreeMap<Exponents, T> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(PolyError::ArityMismatch {
                    left: nvars,
                    right: e.len(),
                });
            }
            *acc.entry(e).or_insert_with(T::zero) += c;
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(SparsePoly { nvars, terms: acc })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &T)> {
        self.terms.iter()
    }

    /// Total degree, `None` standing in for the degree of the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Exponents::degree)
    }

    fn check_arity(&self, other: &Self) -> Result<(), PolyError> {
        if self.nvars != other.nvars {
            return Err(PolyError::ArityMismatch {
                left: self.nvars,
                right: other.nvars,
            });
        }
        Ok(())
    }

    pub fn coefficient_of(&self, e: &Exponents) -> Result<T, PolyError> {
        if e.len() != self.nvars {
            return Err(PolyError::ArityMismatch {
                left: self.nvars,
                right: e.len(),
            });
        }
        Ok(self.terms.get(e).cloned().unwrap_or_else(T::zero))
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.check_arity(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let slot = terms.entry(e.clone()).or_insert_with(T::zero);
            *slot += c.clone();
            if slot.is_zero() {
                terms.remove(e);
            }
        }
        Ok(SparsePoly {
            nvars: self.nvars,
            terms,
        })
    }

    pub fn neg(&self) -> Self {
        SparsePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), -c.clone()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        SparsePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (e.clone(), a.clone() * c.clone()))
                .filter(|(_, a)| !a.is_zero())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        self.mul_capped(other, DEFAULT_TERM_CAP)
    }

    pub fn mul_capped(&self, other: &Self, cap: usize) -> Result<Self, PolyError> {
        self.check_arity(other)?;
        let mut acc: HashMap<Exponents, T> = HashMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                *acc.entry(ea.add(eb)).or_insert_with(T::zero) += ca.clone() * cb.clone();
                if acc.len() > cap {
                    return Err(PolyError::ExpansionTooLarge { cap });
                }
            }
        }
        Ok(SparsePoly {
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn pow(&self, n: u32) -> Result<Self, PolyError> {
        self.pow_capped(n, DEFAULT_TERM_CAP)
    }

    /// Binary powering; `p^0` is the constant 1.
    pub fn pow_capped(&self, mut n: u32, cap: usize) -> Result<Self, PolyError> {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_capped(&base, cap)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_capped(&base, cap)?;
            }
        }
        Ok(acc)
    }

    /// Applies `f` to every coefficient, dropping terms that become zero.
    pub fn map_coefficients<U: Scalar>(&self, f: impl Fn(&T) -> U) -> SparsePoly<U> {
        SparsePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// Swaps variables `i` and `j` (zero-indexed).
    pub fn swap_variables(&self, i: usize, j: usize) -> Self {
        SparsePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut v = e.0.clone();
                    v.swap(i, j);
                    (Exponents(v), c.clone())
                })
                .collect(),
        }
    }

    /// Invariance under every permutation of the variables; adjacent
    /// transpositions generate the symmetric group. Returns the first
    /// offending pair otherwise.
    pub fn symmetry_defect(&self) -> Option<(usize, usize)> {
        (1..self.nvars)
            .map(|i| (i - 1, i))
            .find(|&(i, j)| self.swap_variables(i, j) != *self)
    }

    pub fn eval(&self, field: Field, point: &[FieldElement]) -> Result<FieldElement, PolyError> {
        FieldPoly::compile(self, field)?.eval(point)
    }
}
