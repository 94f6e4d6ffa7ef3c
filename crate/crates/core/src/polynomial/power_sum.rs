//! The polynomials `a1*x1^k + ... + an*xn^k + g` with `deg g < k`, the
//! Vandermonde product, and powers of the plain power sum.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Exponents, PolyError, SparsePoly};
use crate::field::Field;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSumForm<T> {
    k: u32,
    leading: Vec<T>,
    tail: SparsePoly<T>,
    symmetric_tail: bool,
}

impl<T: Scalar> PowerSumForm<T> {
    pub fn new(k: u32, leading: Vec<T>, tail: SparsePoly<T>) -> Result<Self, PolyError> {
        if k == 0 {
            return Err(PolyError::ZeroExponent);
        }
        if tail.nvars() != leading.len() {
            return Err(PolyError::ArityMismatch {
                left: leading.len(),
                right: tail.nvars(),
            });
        }
        if let Some(index) = leading.iter().position(Zero::is_zero) {
            return Err(PolyError::ZeroLeading { index: index + 1 });
        }
        if let Some(degree) = tail.total_degree().filter(|&d| d >= k) {
            return Err(PolyError::TailDegree { degree, k });
        }
        let symmetric_tail = tail.is_zero();
        Ok(PowerSumForm {
            k,
            leading,
            tail,
            symmetric_tail,
        })
    }

    /// `x1^k + ... + xn^k`.
    pub fn unit(n: usize, k: u32) -> Self {
        Self::new(k, vec![T::one(); n], SparsePoly::zero(n)).expect("valid form")
    }

    /// `x1^k + ... + xn^k + tail`.
    pub fn with_tail(k: u32, tail: SparsePoly<T>) -> Result<Self, PolyError> {
        Self::new(k, vec![T::one(); tail.nvars()], tail)
    }

    /// Marks the tail as symmetric after checking it is.
    pub fn declare_symmetric(mut self) -> Result<Self, PolyError> {
        if let Some((i, j)) = self.tail.symmetry_defect() {
            return Err(PolyError::NotSymmetric(i + 1, j + 1));
        }
        self.symmetric_tail = true;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.leading.len()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn leading(&self) -> &[T] {
        &self.leading
    }

    pub fn tail(&self) -> &SparsePoly<T> {
        &self.tail
    }

    pub fn has_symmetric_tail(&self) -> bool {
        self.symmetric_tail
    }

    pub fn has_unit_leading(&self) -> bool {
        self.leading.iter().all(One::is_one)
    }

    /// Checks that every `a_i` stays nonzero in `field`.
    pub fn check_field(&self, field: Field) -> Result<(), PolyError> {
        for (i, a) in self.leading.iter().enumerate() {
            if a.to_field(field)?.is_zero() {
                return Err(PolyError::ZeroLeading { index: i + 1 });
            }
        }
        for (_, c) in self.tail.terms() {
            c.to_field(field)?;
        }
        Ok(())
    }

    pub fn expand(&self) -> SparsePoly<T> {
        let n = self.n();
        let leading = SparsePoly::from_terms(
            n,
            self.leading
                .iter()
                .enumerate()
                .map(|(i, a)| (Exponents::single(n, i, self.k), a.clone())),
        )
        .expect("arity");
        leading.add(&self.tail).expect("arity")
    }

    pub fn map_scalars<U: Scalar>(&self, f: impl Fn(&T) -> U) -> PowerSumForm<U> {
        PowerSumForm {
            k: self.k,
            leading: self.leading.iter().map(&f).collect(),
            tail: self.tail.map_coefficients(f),
            symmetric_tail: self.symmetric_tail,
        }
    }
}

/// `prod_{1 <= i < j <= n} (x_j - x_i)`, expanded.
pub fn vandermonde<T: Scalar>(n: usize) -> SparsePoly<T> {
    let mut acc = SparsePoly::one(n);
    for j in 0..n {
        for i in 0..j {
            let factor = SparsePoly::var(n, j)
                .sub(&SparsePoly::var(n, i))
                .expect("arity");
            acc = acc.mul(&factor).expect("arity");
        }
    }
    acc
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn compositions(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, out);
        prefix.pop();
    }
}

/// `(x1^k + ... + xn^k)^big_n` by the multinomial theorem.
pub fn power_sum_pow<T: Scalar>(n: usize, k: u32, big_n: u32) -> SparsePoly<T> {
    let mut parts = Vec::new();
    compositions(big_n, n, &mut Vec::new(), &mut parts);
    let total = factorial(big_n);
    let terms = parts.into_iter().map(|i| {
        let denom = i.iter().fold(BigInt::one(), |acc, &ij| acc * factorial(ij));
        let coeff = T::from_integer(&(&total / denom)).expect("multinomial coefficient fits");
        (Exponents::new(i.iter().map(|&ij| ij * k).collect()), coeff)
    });
    SparsePoly::from_terms(n, terms).expect("arity")
}

/// `(x1^k + ... + xn^k)^big_n` by repeated squaring.
pub fn power_sum_pow_by_powering<T: Scalar>(
    n: usize,
    k: u32,
    big_n: u32,
) -> Result<SparsePoly<T>, PolyError> {
    PowerSumForm::<T>::unit(n, k).expand().pow(big_n)
}
