//! The Combinatorial Nullstellensatz as a certificate checker.
//!
//! [`certify`] verifies the hypotheses (`k_i < |A_i|`, `deg P = k_1 + ... + k_n`
//! with `P` read in the field), reads off the coefficient of
//! `x_1^{k_1} ... x_n^{k_n}`, and optionally searches `A_1 x ... x A_n` for a
//! point where `P` does not vanish. The theorem itself is taken as given; the
//! search is an empirical cross-check.

use serde::Serialize;
use thiserror::Error;

use crate::enumerate::{EnumError, SetFamily};
use crate::field::{FieldElement, FieldError};
use crate::polynomial::{Exponents, FieldPoly, PolyError, SparsePoly};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnError {
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("witness search over {tuples} tuples exceeds the guard of {guard}")]
    SearchSpaceTooLarge { tuples: u128, guard: u64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Enumerate(#[from] EnumError),
}

#[derive(Debug, Clone)]
pub struct CnInstance<T> {
    pub poly: SparsePoly<T>,
    pub degrees: Vec<u32>,
    pub family: SetFamily,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSearch {
    NotRequested,
    Found,
    /// The coefficient was nonzero but `P` vanishes on the whole grid.
    /// Under the hypotheses this cannot happen.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CnCertificate {
    /// The coefficient of `x_1^{k_1} ... x_n^{k_n}`, as an element of the field.
    pub coefficient: FieldElement,
    pub nonzero: bool,
    pub witness: Option<Vec<FieldElement>>,
    pub search: WitnessSearch,
    pub tuples_examined: u64,
}

impl<T: Scalar> CnInstance<T> {
    pub fn new(poly: SparsePoly<T>, degrees: Vec<u32>, family: SetFamily) -> Self {
        CnInstance {
            poly,
            degrees,
            family,
        }
    }

    /// Total degree of `P` after reducing its coefficients into the field.
    pub fn field_degree(&self) -> Result<Option<u32>, CnError> {
        let field = self.family.field();
        let mut degree = None;
        for (e, c) in self.poly.terms() {
            if !c.to_field(field)?.is_zero() {
                degree = degree.max(Some(e.degree()));
            }
        }
        Ok(degree)
    }

    pub fn check_hypotheses(&self) -> Result<(), CnError> {
        let n = self.family.n();
        if self.poly.nvars() != n || self.degrees.len() != n {
            return Err(CnError::HypothesisViolated(format!(
                "{} sets, {} variables, {} degrees",
                n,
                self.poly.nvars(),
                self.degrees.len()
            )));
        }
        for (i, (&k, set)) in self.degrees.iter().zip(self.family.sets()).enumerate() {
            if k as usize >= set.len() {
                return Err(CnError::HypothesisViolated(format!(
                    "k_{} = {k} is not below |A_{}| = {}",
                    i + 1,
                    i + 1,
                    set.len()
                )));
            }
        }
        let total: u32 = self.degrees.iter().sum();
        match self.field_degree()? {
            Some(d) if d == total => Ok(()),
            d => Err(CnError::HypothesisViolated(format!(
                "deg P = {} but k_1 + ... + k_n = {total}",
                d.map_or("-inf".to_string(), |d| d.to_string())
            ))),
        }
    }
}

/// Checks the hypotheses, extracts the coefficient and, when `search_guard`
/// is given and the coefficient is nonzero, looks for a non-vanishing point.
pub fn certify<T: Scalar>(
    instance: &CnInstance<T>,
    search_guard: Option<u64>,
) -> Result<CnCertificate, CnError> {
    instance.check_hypotheses()?;
    let field = instance.family.field();
    let target = Exponents::new(instance.degrees.clone());
    let coefficient = instance.poly.coefficient_of(&target)?.to_field(field)?;
    let nonzero = !coefficient.is_zero();
    let mut cert = CnCertificate {
        coefficient,
        nonzero,
        witness: None,
        search: WitnessSearch::NotRequested,
        tuples_examined: 0,
    };
    let Some(guard) = search_guard.filter(|_| nonzero) else {
        return Ok(cert);
    };
    let tuples = instance.family.product_size();
    if tuples > guard as u128 {
        return Err(CnError::SearchSpaceTooLarge { tuples, guard });
    }
    let compiled = FieldPoly::compile(&instance.poly, field)?;
    let (witness, examined) = find_nonzero(&compiled, instance.family.sets())?;
    cert.tuples_examined = examined;
    cert.search = if witness.is_some() {
        WitnessSearch::Found
    } else {
        WitnessSearch::Exhausted
    };
    cert.witness = witness;
    Ok(cert)
}

/// First point of the grid, in odometer order, where `poly` is nonzero.
pub fn find_nonzero(
    poly: &FieldPoly,
    sets: &[Vec<FieldElement>],
) -> Result<(Option<Vec<FieldElement>>, u64), CnError> {
    if sets.iter().any(Vec::is_empty) {
        return Ok((None, 0));
    }
    let mut digits = vec![0usize; sets.len()];
    let mut examined = 0u64;
    loop {
        let point: Vec<FieldElement> = digits
            .iter()
            .zip(sets)
            .map(|(&d, s)| s[d].clone())
            .collect();
        examined += 1;
        if !poly.eval(&point)?.is_zero() {
            return Ok((Some(point), examined));
        }
        let mut i = sets.len();
        loop {
            if i == 0 {
                return Ok((None, examined));
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < sets[i].len() {
                break;
            }
            digits[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::polynomial::{parse_poly, vandermonde};
    use num_bigint::BigInt;

    fn family(field: Field, sets: &[Vec<i64>]) -> SetFamily {
        SetFamily::from_integers(field, sets).unwrap()
    }

    #[test]
    fn examples() {
        let f5 = Field::prime(5).unwrap();
        let fam = family(f5, &[vec![0, 1], vec![0, 1]]);

        let v = CnInstance::new(vandermonde::<BigInt>(2), vec![0, 1], fam.clone());
        let cert = certify(&v, Some(100)).unwrap();
        assert_eq!(cert.coefficient, f5.one());
        assert!(cert.nonzero);
        assert_eq!(cert.search, WitnessSearch::Found);
        assert_eq!(cert.witness, Some(vec![f5.embed_i64(0), f5.embed_i64(1)]));

        let xy = CnInstance::new(parse_poly::<BigInt>("x1*x2", 2).unwrap(), vec![1, 1], fam);
        let cert = certify(&xy, Some(100)).unwrap();
        assert!(cert.nonzero);
        assert_eq!(cert.witness, Some(vec![f5.one(), f5.one()]));
    }

    #[test]
    fn hypotheses() {
        let f5 = Field::prime(5).unwrap();
        let fam = family(f5, &[vec![0, 1], vec![0, 1]]);
        let too_big = CnInstance::new(
            parse_poly::<BigInt>("x1^2", 2).unwrap(),
            vec![2, 0],
            fam.clone(),
        );
        assert!(matches!(
            certify(&too_big, None),
            Err(CnError::HypothesisViolated(_))
        ));
        let wrong_degree = CnInstance::new(
            parse_poly::<BigInt>("x1*x2 + x1^3", 2).unwrap(),
            vec![1, 1],
            fam.clone(),
        );
        assert!(matches!(
            certify(&wrong_degree, None),
            Err(CnError::HypothesisViolated(_))
        ));
        // 5*x1^3 vanishes in GF(5), so the field degree is 2.
        let reduced = CnInstance::new(
            parse_poly::<BigInt>("x1*x2 + 5*x1^3", 2).unwrap(),
            vec![1, 1],
            fam.clone(),
        );
        assert!(certify(&reduced, None).unwrap().nonzero);
        let zero = CnInstance::new(SparsePoly::<BigInt>::zero(2), vec![0, 0], fam);
        assert!(matches!(
            certify(&zero, None),
            Err(CnError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn zero_coefficient_skips_search() {
        let q = Field::rational();
        let fam = family(q, &[vec![0, 1], vec![0, 1]]);
        // x1^2 - x1 vanishes on {0,1} and the x1*x2 coefficient is 0.
        let p = CnInstance::new(
            parse_poly::<BigInt>("x1^2 - x1 + x2^2", 2).unwrap(),
            vec![1, 1],
            fam,
        );
        let cert = certify(&p, Some(100)).unwrap();
        assert!(!cert.nonzero);
        assert_eq!(cert.search, WitnessSearch::NotRequested);
    }

    #[test]
    fn guard() {
        let f7 = Field::prime(7).unwrap();
        let fam = family(f7, &[vec![0, 1, 2], vec![0, 1, 2]]);
        let p = CnInstance::new(vandermonde::<BigInt>(2), vec![0, 1], fam);
        assert!(matches!(
            certify(&p, Some(8)),
            Err(CnError::SearchSpaceTooLarge {
                tuples: 9,
                guard: 8
            })
        ));
    }

    /// Every nonzero certificate on small grids comes with a witness.
    #[test]
    fn soundness_on_small_grids() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let f5 = Field::prime(5).unwrap();
        let mut checked = 0;
        for _ in 0..300 {
            let sizes = [rng.gen_range(1..=4usize), rng.gen_range(1..=4usize)];
            let degrees = [
                rng.gen_range(0..sizes[0] as u32),
                rng.gen_range(0..sizes[1] as u32),
            ];
            let total = degrees[0] + degrees[1];
            let mut terms = vec![(
                Exponents::new(degrees.to_vec()),
                BigInt::from(rng.gen_range(1..5)),
            )];
            for _ in 0..4 {
                let a = rng.gen_range(0..=total);
                let b = rng.gen_range(0..=total - a);
                terms.push((
                    Exponents::new(vec![a, b]),
                    BigInt::from(rng.gen_range(-4..5)),
                ));
            }
            let poly = SparsePoly::from_terms(2, terms).unwrap();
            let sets: Vec<Vec<i64>> = sizes
                .iter()
                .map(|&s| {
                    crate::enumerate::random_subset(&mut rng, 5, s)
                        .into_iter()
                        .map(|x| x as i64)
                        .collect()
                })
                .collect();
            let inst = CnInstance::new(poly, degrees.to_vec(), family(f5, &sets));
            if let Ok(cert) = certify(&inst, Some(1000)) {
                if cert.nonzero {
                    checked += 1;
                    assert_eq!(cert.search, WitnessSearch::Found, "{inst:?}");
                }
            }
        }
        assert!(checked > 50);
    }
}
