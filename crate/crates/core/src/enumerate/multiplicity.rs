//! The combinatorial model of the k-th root construction.
//!
//! `A = {z : z^k in {1, ..., q}} ∪ R` with `|R| = r < k`, where `R` sits inside
//! the roots of `z^k = q + 1`. Choosing `n` distinct elements of `A` amounts to
//! choosing multiplicities `m_v` (how many of the `k` roots of `v` are used),
//! and `x_1^k + ... + x_n^k = sum m_v v`. No roots are ever computed.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::EnumError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityProfile {
    pub k: u32,
    pub q: u32,
    pub r: u32,
    pub n: u32,
}

impl MultiplicityProfile {
    pub fn new(k: u32, q: u32, r: u32, n: u32) -> Result<Self, EnumError> {
        let profile = MultiplicityProfile { k, q, r, n };
        profile.validate()?;
        Ok(profile)
    }

    pub fn validate(&self) -> Result<(), EnumError> {
        if self.k == 0 {
            return Err(EnumError::Infeasible("k must be positive".into()));
        }
        if self.r >= self.k {
            return Err(EnumError::Infeasible(format!(
                "r = {} is not below k = {}",
                self.r, self.k
            )));
        }
        if self.n > self.set_size() {
            return Err(EnumError::Infeasible(format!(
                "n = {} exceeds |A| = kq + r = {}",
                self.n,
                self.set_size()
            )));
        }
        Ok(())
    }

    /// `|A| = kq + r`.
    pub fn set_size(&self) -> u32 {
        self.k * self.q + self.r
    }

    /// How many elements of `A` have k-th power `v`.
    pub fn cap(&self, v: u32) -> u32 {
        match v {
            v if (1..=self.q).contains(&v) => self.k,
            v if v == self.q + 1 => self.r,
            _ => 0,
        }
    }
}

/// `{sum m_v v : 0 <= m_v <= cap(v), sum m_v = n}`.
pub fn multiplicity_sums(profile: &MultiplicityProfile) -> Result<BTreeSet<u64>, EnumError> {
    profile.validate()?;
    let n = profile.n as usize;
    let max_sum = n * (profile.q as usize + 1);
    // reach[c][s]: some choice of c elements has power sum s.
    let mut reach = vec![vec![false; max_sum + 1]; n + 1];
    reach[0][0] = true;
    for v in 1..=profile.q + 1 {
        let cap = profile.cap(v) as usize;
        if cap == 0 {
            continue;
        }
        let mut next = vec![vec![false; max_sum + 1]; n + 1];
        for c in 0..=n {
            for s in 0..=max_sum {
                if !reach[c][s] {
                    continue;
                }
                for t in 0..=cap.min(n - c) {
                    let sum = s + t * v as usize;
                    if sum <= max_sum {
                        next[c + t][sum] = true;
                    }
                }
            }
        }
        reach = next;
    }
    Ok(reach[n]
        .iter()
        .enumerate()
        .filter(|&(_, &hit)| hit)
        .map(|(s, _)| s as u64)
        .collect())
}

/// The number of distinct values of `x_1^k + ... + x_n^k` over distinct elements of `A`.
pub fn multiplicity_value_set(profile: &MultiplicityProfile) -> Result<u64, EnumError> {
    Ok(multiplicity_sums(profile)?.len() as u64)
}
