//! Step-by-step reconstruction of the Nullstellensatz argument for the
//! q-vector bound on a concrete family.
//!
//! Given `A_1, ..., A_n` and `f = x_1^k + ... + x_n^k + g`, the replay
//! shrinks the sets to `A_i'`, computes the integer `h` with
//! `[prod x_j^{k q_j' + j - 1}] (x_1^k + ... + x_n^k)^{N-1} prod (x_j - x_i) = h`,
//! checks `h | (N-1)!` and `h e != 0`, and (when small enough) builds the
//! polynomial `Q` and lets [`certify`] find a point where it is nonzero.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::formula::{coeff_closed_form, factorial, residue_of, OracleCache};
use super::{decimal, CoeffCertificate, CoeffError};
use crate::bounds::q_vector;
use crate::enumerate::{value_set, SetFamily, Strategy};
use crate::field::FieldElement;
use crate::nullstellensatz::{certify, CnInstance, WitnessSearch};
use crate::polynomial::{vandermonde, PowerSumForm, SparsePoly};

#[derive(Debug, Clone, Copy)]
pub struct ReplayOptions {
    /// Largest `|A_1'| ... |A_n'|` for which `Q` is built and searched.
    pub witness_guard: u64,
    /// Bound on the tuples enumerated to obtain the value set on the `A_i'`.
    pub tuple_guard: u64,
    /// Term cap for the oracle expansion and for `Q`.
    pub term_cap: usize,
    /// Also expand the product literally to cross-check `h`.
    pub oracle: bool,
}

impl Default for ReplayOptions {
    fn default() -> Self {
        ReplayOptions {
            witness_guard: 100_000,
            tuple_guard: crate::enumerate::DEFAULT_TUPLE_GUARD,
            term_cap: 200_000,
            oracle: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// `[x_1^{|A_1'|-1} ... x_n^{|A_n'|-1}] Q` in the field; equals `h e`.
    pub coefficient: FieldElement,
    pub degree: u32,
    pub point: Vec<FieldElement>,
    pub value: FieldElement,
    pub tuples_examined: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReplayRecord {
    pub field: String,
    pub k: usize,
    pub n: usize,
    pub sizes: Vec<usize>,
    pub q: Vec<i64>,
    /// `min{p(F), q_1 + ... + q_n + 1}`.
    #[serde(rename = "N")]
    pub big_n: u64,
    pub m: usize,
    pub shrunk_sizes: Vec<usize>,
    pub q_prime: Vec<u64>,
    /// Closed form of `q'` (whose entries sum to `N - 1`), with `h` and its residue.
    pub certificate: CoeffCertificate,
    #[serde(with = "decimal")]
    pub h: BigInt,
    pub he: FieldElement,
    /// Size of the restricted value set on the shrunk family.
    pub shrunk_value_set_size: usize,
    /// Present when the grid of the shrunk family is within the witness guard.
    pub witness: Option<Witness>,
}

fn broken(msg: String) -> CoeffError {
    CoeffError::InternalInvariantBroken(msg)
}

/// `h = (N-1)! / prod_s prod_j prod_{0 <= r < c_j, r not in {c_i : i < j}} (c_j - r)`
/// with `c_j = q'_{jk+s} + j`, computed literally. Fails if the division is inexact.
pub fn h_literal(q_prime: &[u64], k: usize) -> Result<BigInt, CoeffError> {
    let dec = super::ResidueClassDecomposition::new(q_prime.len(), k)?;
    let total: u64 = q_prime.iter().sum();
    let mut denominator = BigInt::one();
    for s in 1..=k {
        let c: Vec<u64> = dec
            .class(s)
            .iter()
            .enumerate()
            .map(|(j, &idx)| q_prime[idx - 1] + j as u64)
            .collect();
        for j in 0..c.len() {
            for r in 0..c[j] {
                if !c[..j].contains(&r) {
                    denominator *= c[j] - r;
                }
            }
        }
    }
    let numerator = factorial(total);
    if denominator.is_zero() || !(&numerator % &denominator).is_zero() {
        return Err(broken(format!(
            "h is not an integer divisor of (N-1)! for q' = {q_prime:?}, k = {k}: (N-1)! = {numerator}, product = {denominator}"
        )));
    }
    Ok(numerator / denominator)
}

/// Runs the construction on `family` with `f = x_1^k + ... + x_n^k + g`.
pub fn proof_replay(
    family: &SetFamily,
    form: &PowerSumForm<BigInt>,
    options: ReplayOptions,
) -> Result<ReplayRecord, CoeffError> {
    let field = family.field();
    let n = family.n();
    let k = form.k() as usize;
    let sizes = family.sizes();
    if form.n() != n {
        return Err(CoeffError::HypothesisViolated(format!(
            "f has {} variables, family has {n} sets",
            form.n()
        )));
    }
    if !form.has_unit_leading() {
        return Err(CoeffError::HypothesisViolated(
            "leading coefficients must all be 1".into(),
        ));
    }
    form.check_field(field)?;
    let q = q_vector(&sizes, k).map_err(|e| CoeffError::HypothesisViolated(e.to_string()))?;
    let pf = field.characteristic();
    let sum_q: i64 = q.iter().sum();
    let big_n = pf.min_with(sum_q as u64 + 1);

    // Least m with sum_{m < i <= n} q_i < p(F).
    let tail_sum = |m: usize| -> i64 { q[m..].iter().sum() };
    let m = (0..=n)
        .find(|&m| pf.exceeds(tail_sum(m) as u64))
        .expect("m = n always qualifies");

    let kk = k as i64;
    let mut shrunk = vec![0usize; n];
    for i in 1..=n {
        shrunk[i - 1] = if i > m {
            (kk * q[i - 1] + i as i64) as usize
        } else if i == m {
            let p = pf.finite().expect("m > 0 only in positive characteristic") as i64;
            let size = kk * (p - 1 - tail_sum(m)) + m as i64;
            if size >= kk * q[m - 1] + m as i64 {
                return Err(broken(format!("|A_m'| = {size} is not below k q_m + m")));
            }
            size as usize
        } else {
            i
        };
        if shrunk[i - 1] > sizes[i - 1] || shrunk[i - 1] < i {
            return Err(broken(format!(
                "|A_{i}'| = {} outside [{i}, |A_{i}|]",
                shrunk[i - 1]
            )));
        }
    }
    let q_prime: Vec<u64> = shrunk
        .iter()
        .enumerate()
        .map(|(i, &s)| ((s - (i + 1)) / k) as u64)
        .collect();
    let excess: usize = shrunk.iter().enumerate().map(|(i, &s)| s - (i + 1)).sum();
    if excess as u64 != k as u64 * (big_n - 1) || q_prime.iter().sum::<u64>() != big_n - 1 {
        return Err(broken(format!(
            "sum(|A_i'| - i) = {excess} differs from k(N-1) = {}",
            k as u64 * (big_n - 1)
        )));
    }
    for (i, (&s, &qp)) in shrunk.iter().zip(&q_prime).enumerate() {
        if s != k * qp as usize + i + 1 {
            return Err(broken(format!(
                "|A_{}'| - {} is not divisible by k",
                i + 1,
                i + 1
            )));
        }
    }
    // 0 <= q'_s < q'_{k+s} + 1 < q'_{2k+s} + 2 < ...
    for s in 1..=k {
        let chain: Vec<u64> = (s..=n)
            .step_by(k)
            .enumerate()
            .map(|(j, idx)| q_prime[idx - 1] + j as u64)
            .collect();
        if chain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(broken(format!(
                "shifted chain {chain:?} for s = {s} is not strictly increasing"
            )));
        }
    }

    let h = h_literal(&q_prime, k)?;
    let closed = coeff_closed_form(&q_prime, k)?;
    if closed != h {
        return Err(broken(format!(
            "h = {h} differs from the closed form {closed}"
        )));
    }
    let mut cache = options.oracle.then(|| OracleCache::new(options.term_cap));
    let mut certificate = match CoeffCertificate::compute(&q_prime, k, cache.as_mut()) {
        Err(CoeffError::Poly(crate::polynomial::PolyError::ExpansionTooLarge { .. })) => {
            CoeffCertificate::compute(&q_prime, k, None)?
        }
        other => other?,
    };
    if !certificate.agrees() {
        return Err(broken(format!(
            "oracle {:?} differs from h = {h}",
            certificate.oracle
        )));
    }
    let he = field.embed_integer(&h);
    if he.is_zero() {
        return Err(broken(format!("h e = 0 in {field} with h = {h}")));
    }
    certificate.h = Some(h.clone());
    certificate.h_mod_p = field.modulus().map(|p| residue_of(&h, p));

    let shrunk_family = family.truncated(&shrunk)?;
    let poly = form.expand();
    let values = value_set(
        &shrunk_family,
        &poly,
        true,
        options.tuple_guard,
        Strategy::Auto,
    )?;
    if (values.cardinality as u64) < big_n {
        return Err(broken(format!(
            "the shrunk family has only {} values, fewer than N = {big_n}",
            values.cardinality
        )));
    }

    let witness = if shrunk_family.product_size() <= options.witness_guard as u128 {
        Some(find_witness(
            &shrunk_family,
            form,
            &values.values,
            big_n,
            &he,
            options,
        )?)
    } else {
        None
    };

    Ok(ReplayRecord {
        field: field.to_string(),
        k,
        n,
        sizes,
        q,
        big_n,
        m,
        shrunk_sizes: shrunk,
        q_prime,
        certificate,
        h,
        he,
        shrunk_value_set_size: values.cardinality,
        witness,
    })
}

/// Builds `Q = f^{N-1-|C|} prod_{c in C} (f - c) prod_{i<j} (x_j - x_i)` for `C`
/// the first `N - 1` attained values, then certifies it on the shrunk family.
fn find_witness(
    shrunk: &SetFamily,
    form: &PowerSumForm<BigInt>,
    values: &[FieldElement],
    big_n: u64,
    he: &FieldElement,
    options: ReplayOptions,
) -> Result<Witness, CoeffError> {
    let n = shrunk.n();
    let c = &values[..values.len().min(big_n as usize - 1)];
    let f: SparsePoly<BigRational> = form
        .expand()
        .map_coefficients(|x| BigRational::from_integer(x.clone()));
    let mut q_poly = f.pow_capped(big_n as u32 - 1 - c.len() as u32, options.term_cap)?;
    for value in c {
        let factor = f.sub(&SparsePoly::constant(n, value.lift()))?;
        q_poly = q_poly.mul_capped(&factor, options.term_cap)?;
    }
    q_poly = q_poly.mul_capped(&vandermonde(n), options.term_cap)?;

    let degrees: Vec<u32> = shrunk.sizes().iter().map(|&s| s as u32 - 1).collect();
    let expected_degree = form.k() as u64 * (big_n - 1) + (n * (n - 1) / 2) as u64;
    let degree = q_poly.total_degree().unwrap_or(0);
    if degree as u64 != expected_degree
        || degrees.iter().map(|&d| d as u64).sum::<u64>() != expected_degree
    {
        return Err(broken(format!(
            "deg Q = {degree}, expected {expected_degree}"
        )));
    }
    let instance = CnInstance::new(q_poly, degrees, shrunk.clone());
    let cert = certify(&instance, Some(options.witness_guard))
        .map_err(|e| broken(format!("certifying Q failed: {e}")))?;
    if cert.coefficient != *he {
        return Err(broken(format!(
            "coefficient of Q is {}, expected h e = {he}",
            cert.coefficient
        )));
    }
    let point = match (cert.search, cert.witness) {
        (WitnessSearch::Found, Some(point)) => point,
        _ => return Err(broken("Q vanishes on the whole shrunk grid".into())),
    };
    let distinct = (0..n).all(|i| (0..i).all(|j| point[i] != point[j]));
    let value = f.eval(shrunk.field(), &point)?;
    if !distinct || c.contains(&value) {
        return Err(broken(format!(
            "witness {point:?} does not produce a new value"
        )));
    }
    Ok(Witness {
        coefficient: cert.coefficient,
        degree,
        point,
        value,
        tuples_examined: cert.tuples_examined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::polynomial::parse_poly;

    fn full(field: Field, sizes: &[usize]) -> SetFamily {
        let sets: Vec<Vec<i64>> = sizes.iter().map(|&s| (0..s as i64).collect()).collect();
        SetFamily::from_integers(field, &sets).unwrap()
    }

    #[test]
    fn sizes_five_over_gf11() {
        let f11 = Field::prime(11).unwrap();
        let r = proof_replay(
            &full(f11, &[5, 5, 5]),
            &PowerSumForm::unit(3, 2),
            ReplayOptions::default(),
        )
        .unwrap();
        assert_eq!(r.big_n, 4);
        assert_eq!(r.m, 0);
        assert_eq!(r.shrunk_sizes, vec![3, 4, 5]);
        assert_eq!(r.q_prime, vec![1, 1, 1]);
        assert!(!r.he.is_zero());
        assert_eq!(factorial(3) % &r.h, BigInt::zero());
        assert_eq!(r.certificate.oracle.as_ref(), Some(&r.h));
        let w = r.witness.unwrap();
        assert_eq!(w.coefficient, r.he);
        assert_eq!(w.degree, 2 * 3 + 3);
    }

    #[test]
    fn minimal_sizes_give_vandermonde() {
        let f7 = Field::prime(7).unwrap();
        for n in 1..=4 {
            let sizes: Vec<usize> = (1..=n).collect();
            for k in 1..=n {
                let r = proof_replay(
                    &full(f7, &sizes),
                    &PowerSumForm::unit(n, k as u32),
                    ReplayOptions::default(),
                )
                .unwrap();
                assert_eq!(r.big_n, 1);
                assert_eq!(r.h, BigInt::one());
                assert_eq!(r.shrunk_sizes, sizes);
                assert!(r.witness.is_some());
            }
        }
    }

    #[test]
    fn clamped_instances_pick_positive_m() {
        // k = 1 over GF(5) with full sets: q = (3, 3), m = 1.
        let f5 = Field::prime(5).unwrap();
        let r = proof_replay(
            &full(f5, &[5, 5]),
            &PowerSumForm::unit(2, 1),
            ReplayOptions::default(),
        )
        .unwrap();
        assert_eq!(r.q, vec![3, 3]);
        assert_eq!(r.m, 1);
        assert_eq!(r.big_n, 5);
        assert_eq!(r.shrunk_sizes, vec![2, 5]);
        assert!(r.witness.is_some());

        // k = 2 over GF(11): q = (3, 4, 4) sums to 11 = p.
        let f11 = Field::prime(11).unwrap();
        let tail: SparsePoly<BigInt> = parse_poly("2*x1 - x3 + 1", 3).unwrap();
        let f = PowerSumForm::with_tail(2, tail).unwrap();
        let r = proof_replay(&full(f11, &[7, 10, 11]), &f, ReplayOptions::default()).unwrap();
        assert_eq!(r.q, vec![3, 4, 4]);
        assert_eq!(r.m, 1);
        assert_eq!(r.big_n, 11);
        assert_eq!(r.shrunk_sizes, vec![5, 10, 11]);
        assert_eq!(r.q_prime, vec![2, 4, 4]);
        assert!(!r.he.is_zero());
    }

    #[test]
    fn rational_field_never_clamps() {
        let q = Field::rational();
        let r = proof_replay(
            &full(q, &[4, 4]),
            &PowerSumForm::unit(2, 1),
            ReplayOptions::default(),
        )
        .unwrap();
        assert_eq!(r.m, 0);
        assert_eq!(r.big_n, 5);
        assert!(r.certificate.h_mod_p.is_none());
        assert!(r.witness.is_some());
    }

    #[test]
    fn hypotheses() {
        let f7 = Field::prime(7).unwrap();
        let g = PowerSumForm::new(
            2,
            vec![BigInt::from(1), BigInt::from(2)],
            SparsePoly::zero(2),
        )
        .unwrap();
        assert!(matches!(
            proof_replay(&full(f7, &[3, 3]), &g, ReplayOptions::default()),
            Err(CoeffError::HypothesisViolated(_))
        ));
        assert!(matches!(
            proof_replay(
                &full(f7, &[3, 1]),
                &PowerSumForm::unit(2, 1),
                ReplayOptions::default()
            ),
            Err(CoeffError::HypothesisViolated(_))
        ));
        assert!(matches!(
            proof_replay(
                &full(f7, &[3, 3]),
                &PowerSumForm::unit(2, 3),
                ReplayOptions::default()
            ),
            Err(CoeffError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn h_literal_divides() {
        assert_eq!(
            h_literal(&[1, 1, 1], 2).unwrap(),
            coeff_closed_form(&[1, 1, 1], 2).unwrap()
        );
        assert_eq!(h_literal(&[0, 2], 2).unwrap(), BigInt::one());
    }
}
