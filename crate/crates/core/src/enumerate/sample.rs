//! Seeded sampling of tails, leading coefficients and subsets for sweeps.

use std::ops::RangeInclusive;

use num_bigint::BigInt;
use rand::seq::index;
use rand::Rng;

use crate::polynomial::{Exponents, SparsePoly};

/// Exponent vectors in `n` variables of total degree below `k`, in graded order.
pub fn monomials_below(n: usize, k: u32) -> Vec<Exponents> {
    fn fill(prefix: &mut Vec<u32>, n: usize, budget: u32, out: &mut Vec<Exponents>) {
        if prefix.len() == n {
            out.push(Exponents::new(prefix.clone()));
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            fill(prefix, n, budget - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        fill(&mut Vec::with_capacity(n), n, k - 1, &mut out);
    }
    out.sort();
    out
}

/// A tail `g` with `deg g < k`: every monomial of degree below `k` gets an
/// independent coefficient drawn from `coeffs`.
pub fn random_tail<R: Rng>(
    rng: &mut R,
    n: usize,
    k: u32,
    coeffs: RangeInclusive<i64>,
) -> SparsePoly<BigInt> {
    let terms: Vec<_> = monomials_below(n, k)
        .into_iter()
        .map(|e| (e, BigInt::from(rng.gen_range(coeffs.clone()))))
        .collect();
    SparsePoly::from_terms(n, terms).expect("arity")
}

/// Leading coefficients drawn from `1..p`, so they are nonzero in GF(p).
pub fn random_leading<R: Rng>(rng: &mut R, n: usize, p: u64) -> Vec<BigInt> {
    (0..n).map(|_| BigInt::from(rng.gen_range(1..p))).collect()
}

/// A uniformly random `size`-subset of `0..universe`, sorted.
pub fn random_subset<R: Rng>(rng: &mut R, universe: u64, size: usize) -> Vec<u64> {
    let mut s: Vec<u64> = index::sample(rng, universe as usize, size)
        .into_iter()
        .map(|i| i as u64)
        .collect();
    s.sort_unstable();
    s
}
