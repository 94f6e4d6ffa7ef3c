use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use super::{decimal, CoeffError, Permutation};
use crate::polynomial::{power_sum_pow, vandermonde, Exponents, SparsePoly, DEFAULT_TERM_CAP};

/// `(y)_i = y (y-1) ... (y-i+1)`, with `(y)_0 = 1`.
pub fn falling_factorial(y: &BigInt, i: u32) -> BigInt {
    (0..i).fold(BigInt::one(), |acc, r| acc * (y - r))
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// The classes `X_s = {j in 1..n : j ≡ s (mod k)}` for `s = 1..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueClassDecomposition {
    k: usize,
    n: usize,
    classes: Vec<Vec<usize>>,
}

impl ResidueClassDecomposition {
    pub fn new(n: usize, k: usize) -> Result<Self, CoeffError> {
        if k == 0 || k > n {
            return Err(CoeffError::HypothesisViolated(format!(
                "need 1 <= k <= n, got k = {k}, n = {n}"
            )));
        }
        let classes = (1..=k).map(|s| (s..=n).step_by(k).collect()).collect();
        Ok(ResidueClassDecomposition { k, n, classes })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `X_s` for `s` in `1..=k`.
    pub fn class(&self, s: usize) -> &[usize] {
        &self.classes[s - 1]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// `n_s = floor((n - s)/k) + 1`.
    pub fn class_size(&self, s: usize) -> usize {
        (self.n - s) / self.k + 1
    }

    /// The shifted entries `q_{jk+s} + j` for `j = 0..n_s`.
    pub fn shifted(&self, q: &[u64], s: usize) -> Vec<BigInt> {
        self.class(s)
            .iter()
            .enumerate()
            .map(|(j, &idx)| BigInt::from(q[idx - 1]) + j)
            .collect()
    }
}

fn check_q(q: &[u64], k: usize) -> Result<ResidueClassDecomposition, CoeffError> {
    if q.is_empty() {
        return Err(CoeffError::HypothesisViolated("q is empty".into()));
    }
    ResidueClassDecomposition::new(q.len(), k)
}

/// `N! prod_s prod_{0<=i<j<n_s} (c_j - c_i) / prod_j c_j!` with `c_j = q_{jk+s} + j`
/// and `N = q_1 + ... + q_n`, evaluated over the rationals and checked to be
/// an integer.
pub fn coeff_closed_form(q: &[u64], k: usize) -> Result<BigInt, CoeffError> {
    let dec = check_q(q, k)?;
    let big_n: u64 = q.iter().sum();
    let mut acc = BigRational::from_integer(factorial(big_n));
    for s in 1..=k {
        let c = dec.shifted(q, s);
        for j in 0..c.len() {
            for i in 0..j {
                acc *= BigRational::from_integer(&c[j] - &c[i]);
            }
            let cj: u64 = (&c[j]).try_into().expect("shifted entries are small");
            acc /= BigRational::from_integer(factorial(cj));
        }
    }
    if !acc.is_integer() {
        return Err(CoeffError::InternalInvariantBroken(format!(
            "closed form for q = {q:?}, k = {k} is {acc}, not an integer"
        )));
    }
    Ok(acc.to_integer())
}

/// The monomial `prod_j x_j^{k q_j + j - 1}`.
pub fn target_exponents(q: &[u64], k: usize) -> Exponents {
    Exponents::new(
        q.iter()
            .enumerate()
            .map(|(j, &qj)| (k as u64 * qj + j as u64) as u32)
            .collect(),
    )
}

/// `(x_1^k + ... + x_n^k)^N * prod_{i<j} (x_j - x_i)`, expanded under a term cap.
pub fn oracle_product(
    n: usize,
    k: usize,
    big_n: u64,
    term_cap: usize,
) -> Result<SparsePoly<BigInt>, CoeffError> {
    let power = power_sum_pow::<BigInt>(n, k as u32, big_n as u32);
    if power.num_terms() > term_cap {
        return Err(CoeffError::Poly(
            crate::polynomial::PolyError::ExpansionTooLarge { cap: term_cap },
        ));
    }
    Ok(power.mul_capped(&vandermonde(n), term_cap)?)
}

/// The coefficient of `prod_j x_j^{k q_j + j - 1}` in the expanded product,
/// by literal expansion.
pub fn coeff_oracle(q: &[u64], k: usize) -> Result<BigInt, CoeffError> {
    coeff_oracle_capped(q, k, DEFAULT_TERM_CAP)
}

pub fn coeff_oracle_capped(q: &[u64], k: usize, term_cap: usize) -> Result<BigInt, CoeffError> {
    check_q(q, k)?;
    let product = oracle_product(q.len(), k, q.iter().sum(), term_cap)?;
    Ok(product.coefficient_of(&target_exponents(q, k))?)
}

/// Memoizes [`oracle_product`] per `(n, k, N)` for sweeps over many `q`.
#[derive(Debug, Default)]
pub struct OracleCache {
    term_cap: usize,
    products: HashMap<(usize, usize, u64), SparsePoly<BigInt>>,
}

impl OracleCache {
    pub fn new(term_cap: usize) -> Self {
        OracleCache {
            term_cap,
            products: HashMap::new(),
        }
    }

    pub fn coefficient(&mut self, q: &[u64], k: usize) -> Result<BigInt, CoeffError> {
        check_q(q, k)?;
        let key = (q.len(), k, q.iter().sum());
        if !self.products.contains_key(&key) {
            let product = oracle_product(key.0, key.1, key.2, self.term_cap)?;
            self.products.insert(key, product);
        }
        Ok(self.products[&key].coefficient_of(&target_exponents(q, k))?)
    }
}

/// The determinant by the Leibniz expansion `sum_σ ε(σ) prod_i m[i][σ(i)]`.
pub fn leibniz_determinant(m: &[Vec<BigInt>]) -> BigInt {
    let t = m.len();
    Permutation::all(t)
        .map(|sigma| {
            let term = (1..=t).fold(BigInt::one(), |acc, i| {
                acc * &m[i - 1][sigma.apply(i).expect("in domain") - 1]
            });
            if sigma.sign() > 0 {
                term
            } else {
                -term
            }
        })
        .sum()
}

/// `prod_{i<j} (c_j - c_i)`.
pub fn vandermonde_value(c: &[BigInt]) -> BigInt {
    let mut acc = BigInt::one();
    for j in 0..c.len() {
        for i in 0..j {
            acc *= &c[j] - &c[i];
        }
    }
    acc
}

/// Closed form against oracle for one `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoeffCertificate {
    pub k: usize,
    pub n: usize,
    pub q: Vec<u64>,
    /// `q_1 + ... + q_n`.
    #[serde(rename = "N")]
    pub big_n: u64,
    #[serde(with = "decimal")]
    pub closed_form: BigInt,
    #[serde(with = "decimal::option")]
    pub oracle: Option<BigInt>,
    #[serde(with = "decimal::option")]
    pub h: Option<BigInt>,
    pub h_mod_p: Option<u64>,
}

impl CoeffCertificate {
    /// Evaluates the closed form and, when `oracle` is given, the literal expansion.
    pub fn compute(
        q: &[u64],
        k: usize,
        oracle: Option<&mut OracleCache>,
    ) -> Result<Self, CoeffError> {
        let closed_form = coeff_closed_form(q, k)?;
        let oracle = oracle.map(|cache| cache.coefficient(q, k)).transpose()?;
        Ok(CoeffCertificate {
            k,
            n: q.len(),
            q: q.to_vec(),
            big_n: q.iter().sum(),
            closed_form,
            oracle,
            h: None,
            h_mod_p: None,
        })
    }

    /// `true` unless an oracle value is present and differs.
    pub fn agrees(&self) -> bool {
        self.oracle.as_ref().is_none_or(|o| *o == self.closed_form)
    }
}

/// `N! / prod_j q_j!`, what the closed form reduces to when `k = n`.
pub fn multinomial(q: &[u64]) -> BigInt {
    let big_n: u64 = q.iter().sum();
    q.iter()
        .fold(factorial(big_n), |acc, &qj| acc / factorial(qj))
}

/// Reduces `h` into `0..p`.
pub fn residue_of(h: &BigInt, p: u64) -> u64 {
    let r = h.mod_floor(&BigInt::from(p));
    debug_assert!(!r.is_negative());
    r.try_into().expect("residue below p")
}
