//! Ground-truth value sets by exhaustive enumeration.
//!
//! Tuples are visited by an odometer over the sorted sets; in the restricted
//! case a used-element mask skips tuples with a repeated coordinate. Over
//! small prime fields the polynomial is first tabulated on all of GF(p)^n
//! (see [`PrimeTable`]) and the walk only does table lookups.

mod kernel;
mod multiplicity;
mod sample;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Field, FieldElement, FieldError};
use crate::polynomial::{FieldPoly, PolyError, PowerSumForm, SparsePoly};
use crate::scalar::Scalar;

pub use kernel::{subset_mask, FoldedTable, PrimeTable};
pub use multiplicity::{multiplicity_sums, multiplicity_value_set, MultiplicityProfile};
pub use sample::{monomials_below, random_leading, random_subset, random_tail};

/// Default bound on the number of tuples an enumeration may visit.
pub const DEFAULT_TUPLE_GUARD: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("search space of {tuples} tuples exceeds the guard of {guard}")]
    SearchSpaceTooLarge { tuples: u128, guard: u64 },
    #[error("not symmetric: {0}")]
    NotSymmetric(String),
    #[error("infeasible profile: {0}")]
    Infeasible(String),
    #[error("family has {family} sets but the polynomial has {poly} variables")]
    ArityMismatch { family: usize, poly: usize },
    #[error("element {element} appears twice in A_{index}")]
    DuplicateElement { index: usize, element: String },
    #[error("malformed family: {0}")]
    Malformed(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Finite subsets `A_1, ..., A_n` of one field, each stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily", into = "RawFamily")]
pub struct SetFamily {
    field: Field,
    sets: Vec<Vec<FieldElement>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    field: Field,
    sets: Vec<Vec<serde_json::Value>>,
}

impl TryFrom<RawFamily> for SetFamily {
    type Error = EnumError;

    fn try_from(raw: RawFamily) -> Result<Self, EnumError> {
        let field = raw.field;
        let sets = raw
            .sets
            .iter()
            .map(|set| {
                set.iter()
                    .map(|v| match v {
                        serde_json::Value::Number(n) => field.parse_element(&n.to_string()),
                        serde_json::Value::String(s) => field.parse_element(s),
                        other => Err(FieldError::BadElement {
                            text: other.to_string(),
                            field,
                        }),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        SetFamily::new(field, sets)
    }
}

impl From<SetFamily> for RawFamily {
    fn from(family: SetFamily) -> Self {
        let sets = family
            .sets
            .iter()
            .map(|set| {
                set.iter()
                    .map(|x| match x.residue_value() {
                        Some(v) => serde_json::Value::from(v),
                        None => serde_json::Value::from(x.to_string()),
                    })
                    .collect()
            })
            .collect();
        RawFamily {
            field: family.field,
            sets,
        }
    }
}

impl SetFamily {
    pub fn new(field: Field, sets: Vec<Vec<FieldElement>>) -> Result<Self, EnumError> {
        if sets.is_empty() {
            return Err(EnumError::Malformed("no sets".into()));
        }
        let mut sorted = Vec::with_capacity(sets.len());
        for (i, mut set) in sets.into_iter().enumerate() {
            if let Some(bad) = set.iter().find(|x| x.field() != field) {
                return Err(FieldError::FieldMismatch {
                    left: field,
                    right: bad.field(),
                }
                .into());
            }
            set.sort();
            if let Some(w) = set.windows(2).find(|w| w[0] == w[1]) {
                return Err(EnumError::DuplicateElement {
                    index: i + 1,
                    element: w[0].to_string(),
                });
            }
            sorted.push(set);
        }
        Ok(SetFamily {
            field,
            sets: sorted,
        })
    }

    /// Embeds integer sets; two integers with the same residue count as a duplicate.
    pub fn from_integers(field: Field, sets: &[Vec<i64>]) -> Result<Self, EnumError> {
        let sets = sets
            .iter()
            .map(|s| s.iter().map(|&x| field.embed_i64(x)).collect())
            .collect();
        SetFamily::new(field, sets)
    }

    /// `n` copies of the same set.
    pub fn repeated(field: Field, set: Vec<FieldElement>, n: usize) -> Result<Self, EnumError> {
        SetFamily::new(field, vec![set; n])
    }

    pub fn from_json(text: &str) -> Result<Self, EnumError> {
        serde_json::from_str(text).map_err(|e| EnumError::Malformed(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("families serialize")
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[Vec<FieldElement>] {
        &self.sets
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sets.iter().map(Vec::len).collect()
    }

    /// `|A_1| * ... * |A_n|`, saturating.
    pub fn product_size(&self) -> u128 {
        self.sets
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }

    /// The sets as canonical residues, for prime fields.
    pub fn residues(&self) -> Option<Vec<Vec<u64>>> {
        self.field.modulus()?;
        Some(
            self.sets
                .iter()
                .map(|s| {
                    s.iter()
                        .map(|x| x.residue_value().expect("prime field"))
                        .collect()
                })
                .collect(),
        )
    }

    /// The first `size` elements of each set (in sorted order).
    pub fn truncated(&self, sizes: &[usize]) -> Result<Self, EnumError> {
        if sizes.len() != self.n() {
            return Err(EnumError::Malformed(format!(
                "{} sizes for {} sets",
                sizes.len(),
                self.n()
            )));
        }
        let mut sets = Vec::with_capacity(self.n());
        for (i, (set, &s)) in self.sets.iter().zip(sizes).enumerate() {
            if s > set.len() {
                return Err(EnumError::Malformed(format!(
                    "A_{} has fewer than {s} elements",
                    i + 1
                )));
            }
            sets.push(set[..s].to_vec());
        }
        Ok(SetFamily {
            field: self.field,
            sets,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueSetResult {
    pub cardinality: usize,
    /// Sorted, duplicate-free.
    pub values: Vec<FieldElement>,
    pub tuples_examined: u64,
    pub restricted: bool,
}

impl ValueSetResult {
    fn from_values(values: BTreeSet<FieldElement>, tuples_examined: u64, restricted: bool) -> Self {
        ValueSetResult {
            cardinality: values.len(),
            values: values.into_iter().collect(),
            tuples_examined,
            restricted,
        }
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        self.values.binary_search(x).is_ok()
    }
}

/// How the tuples are evaluated. Both strategies return identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Table lookups over small prime fields, term-by-term evaluation otherwise.
    #[default]
    Auto,
    /// Always evaluate term by term.
    Generic,
}

fn check_guard(family: &SetFamily, guard: u64) -> Result<(), EnumError> {
    let tuples = family.product_size();
    if tuples > guard as u128 {
        return Err(EnumError::SearchSpaceTooLarge { tuples, guard });
    }
    Ok(())
}

/// The image of `poly` on `A_1 x ... x A_n`, restricted to pairwise distinct
/// coordinates when `restricted` is set.
pub fn value_set<T: Scalar>(
    family: &SetFamily,
    poly: &SparsePoly<T>,
    restricted: bool,
    guard: u64,
    strategy: Strategy,
) -> Result<ValueSetResult, EnumError> {
    if poly.nvars() != family.n() {
        return Err(EnumError::ArityMismatch {
            family: family.n(),
            poly: poly.nvars(),
        });
    }
    check_guard(family, guard)?;
    let compiled = FieldPoly::compile(poly, family.field())?;
    if strategy == Strategy::Auto {
        if let Some(table) = PrimeTable::build(&compiled) {
            let sets = family.residues().expect("prime field");
            let (mask, count) = table.value_mask(&sets, restricted, false);
            let values = (0..table.p())
                .filter(|&v| mask >> v & 1 == 1)
                .map(|v| family.field().embed_i64(v as i64))
                .collect();
            return Ok(ValueSetResult::from_values(values, count, restricted));
        }
    }
    Ok(generic(family, &compiled, restricted))
}

fn generic(family: &SetFamily, poly: &FieldPoly, restricted: bool) -> ValueSetResult {
    let mut universe: Vec<FieldElement> = family.sets().iter().flatten().cloned().collect();
    universe.sort();
    universe.dedup();
    let ids: Vec<Vec<usize>> = family
        .sets()
        .iter()
        .map(|s| {
            s.iter()
                .map(|x| universe.binary_search(x).expect("present"))
                .collect()
        })
        .collect();

    // Split on the first coordinate; merging is a set union, so order is irrelevant.
    let parts: Vec<(BTreeSet<FieldElement>, u64)> = ids[0]
        .par_iter()
        .map(|&first| {
            let mut walk = Walk {
                universe: &universe,
                ids: &ids,
                poly,
                restricted,
                used: vec![false; universe.len()],
                point: Vec::with_capacity(ids.len()),
                values: BTreeSet::new(),
                count: 0,
            };
            walk.used[first] = true;
            walk.point.push(universe[first].clone());
            walk.descend(1);
            (walk.values, walk.count)
        })
        .collect();

    let mut values = BTreeSet::new();
    let mut count = 0;
    for (v, c) in parts {
        values.extend(v);
        count += c;
    }
    ValueSetResult::from_values(values, count, restricted)
}

struct Walk<'a> {
    universe: &'a [FieldElement],
    ids: &'a [Vec<usize>],
    poly: &'a FieldPoly,
    restricted: bool,
    used: Vec<bool>,
    point: Vec<FieldElement>,
    values: BTreeSet<FieldElement>,
    count: u64,
}

impl Walk<'_> {
    fn descend(&mut self, depth: usize) {
        if depth == self.ids.len() {
            self.values.insert(
                self.poly
                    .eval(&self.point)
                    .expect("point matches polynomial"),
            );
            self.count += 1;
            return;
        }
        for &x in &self.ids[depth] {
            if self.restricted && self.used[x] {
                continue;
            }
            self.used[x] = true;
            self.point.push(self.universe[x].clone());
            self.descend(depth + 1);
            self.point.pop();
            self.used[x] = false;
        }
    }
}

fn check_form<T: Scalar>(family: &SetFamily, form: &PowerSumForm<T>) -> Result<(), EnumError> {
    if form.n() != family.n() {
        return Err(EnumError::ArityMismatch {
            family: family.n(),
            poly: form.n(),
        });
    }
    Ok(())
}

/// `{f(x_1, ..., x_n) : x_i in A_i, x_i != x_j for i != j}`.
pub fn restricted_value_set<T: Scalar>(
    family: &SetFamily,
    form: &PowerSumForm<T>,
    guard: u64,
) -> Result<ValueSetResult, EnumError> {
    check_form(family, form)?;
    value_set(family, &form.expand(), true, guard, Strategy::Auto)
}

/// `{f(x_1, ..., x_n) : x_i in A_i}`.
pub fn unrestricted_value_set<T: Scalar>(
    family: &SetFamily,
    form: &PowerSumForm<T>,
    guard: u64,
) -> Result<ValueSetResult, EnumError> {
    check_form(family, form)?;
    value_set(family, &form.expand(), false, guard, Strategy::Auto)
}

/// Restricted value set of a symmetric `f` on `A_1 = ... = A_n = set`,
/// enumerating the `n`-element subsets of `set` once each.
///
/// `tuples_examined` counts the injective tuples the subsets stand for
/// (`n!` per subset), so the result is field-for-field equal to
/// [`restricted_value_set`] on the repeated family.
pub fn symmetric_fast_path<T: Scalar>(
    field: Field,
    set: Vec<FieldElement>,
    n: usize,
    form: &PowerSumForm<T>,
    guard: u64,
) -> Result<ValueSetResult, EnumError> {
    if form.n() != n {
        return Err(EnumError::ArityMismatch {
            family: n,
            poly: form.n(),
        });
    }
    if form.leading().windows(2).any(|w| w[0] != w[1]) {
        return Err(EnumError::NotSymmetric(
            "leading coefficients differ".into(),
        ));
    }
    if !form.has_symmetric_tail() {
        return Err(EnumError::NotSymmetric(
            "tail is not declared symmetric".into(),
        ));
    }
    let family = SetFamily::repeated(field, set, n)?;
    let set = &family.sets()[0];
    let subsets = binomial(set.len() as u128, n as u128);
    if subsets > guard as u128 {
        return Err(EnumError::SearchSpaceTooLarge {
            tuples: subsets,
            guard,
        });
    }
    let compiled = FieldPoly::compile(&form.expand(), field)?;
    let mut values = BTreeSet::new();
    for subset in itertools::Itertools::combinations(set.iter().cloned(), n) {
        values.insert(compiled.eval(&subset)?);
    }
    let per_subset: u64 = (1..=n as u64).product();
    Ok(ValueSetResult::from_values(
        values,
        subsets as u64 * per_subset,
        true,
    ))
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::parse_poly;
    use num_bigint::BigInt;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn ints(field: Field, values: &[i64]) -> Vec<FieldElement> {
        values.iter().map(|&v| field.embed_i64(v)).collect()
    }

    fn sum_form(n: usize, k: u32) -> PowerSumForm<BigInt> {
        PowerSumForm::unit(n, k)
    }

    #[test]
    fn restricted_examples() {
        let q = Field::rational();
        let fam = SetFamily::from_integers(q, &[vec![0, 1], vec![0, 1]]).unwrap();
        let r = restricted_value_set(&fam, &sum_form(2, 1), DEFAULT_TUPLE_GUARD).unwrap();
        assert_eq!(r.values, ints(q, &[1]));
        assert_eq!(r.tuples_examined, 2);
        assert!(r.restricted);

        let f7 = gf(7);
        let fam = SetFamily::from_integers(f7, &[vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        let r = restricted_value_set(&fam, &sum_form(2, 1), DEFAULT_TUPLE_GUARD).unwrap();
        assert_eq!(r.values, ints(f7, &[1, 2, 3]));
        assert_eq!(r.cardinality, 3);

        let fam = SetFamily::from_integers(f7, &[vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap();
        let r = restricted_value_set(&fam, &sum_form(3, 1), DEFAULT_TUPLE_GUARD).unwrap();
        assert_eq!(r.cardinality, 0);
        assert!(r.values.is_empty());
    }

    #[test]
    fn unrestricted_examples() {
        let f5 = gf(5);
        let fam = SetFamily::from_integers(f5, &[vec![0, 1], vec![0, 1]]).unwrap();
        let r = unrestricted_value_set(&fam, &sum_form(2, 1), DEFAULT_TUPLE_GUARD).unwrap();
        assert_eq!(r.values, ints(f5, &[0, 1, 2]));
        assert!(!r.restricted);

        let fam = SetFamily::from_integers(f5, &[vec![2], vec![4], vec![3]]).unwrap();
        let r = unrestricted_value_set(&fam, &sum_form(3, 2), DEFAULT_TUPLE_GUARD).unwrap();
        assert_eq!(r.values, ints(f5, &[4 + 16 + 9]));

        let f7 = gf(7);
        let fam = SetFamily::from_integers(f7, &[vec![0, 1, 2, 3, 4], vec![0, 1, 2]]).unwrap();
        let r = unrestricted_value_set(&fam, &sum_form(2, 2), DEFAULT_TUPLE_GUARD).unwrap();
        let bound =
            crate::bounds::bound_thm11_unrestricted(&[5, 3], 2, f7.characteristic()).unwrap();
        assert_eq!(bound.value, 4);
        assert!(r.cardinality as u64 >= bound.value);
    }

    #[test]
    fn guard_and_arity() {
        let f7 = gf(7);
        let fam = SetFamily::from_integers(f7, &[vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        assert!(matches!(
            restricted_value_set(&fam, &sum_form(2, 1), 8),
            Err(EnumError::SearchSpaceTooLarge {
                tuples: 9,
                guard: 8
            })
        ));
        assert!(matches!(
            restricted_value_set(&fam, &sum_form(3, 1), 100),
            Err(EnumError::ArityMismatch { family: 2, poly: 3 })
        ));
    }

    #[test]
    fn families_validate_and_parse() {
        let f7 = gf(7);
        assert!(matches!(
            SetFamily::from_integers(f7, &[vec![1, 8]]),
            Err(EnumError::DuplicateElement { index: 1, .. })
        ));
        assert!(SetFamily::from_integers(f7, &[]).is_err());
        let fam = SetFamily::from_json(r#"{"field":"gf(7)","sets":[[2,0,1],[0,1,2]]}"#).unwrap();
        assert_eq!(fam.sets()[0], ints(f7, &[0, 1, 2]));
        assert_eq!(
            fam.to_json(),
            r#"{"field":"gf(7)","sets":[[0,1,2],[0,1,2]]}"#
        );
        let q = SetFamily::from_json(r#"{"field":"rational","sets":[["1/2",3,"-4"]]}"#).unwrap();
        assert_eq!(SetFamily::from_json(&q.to_json()).unwrap(), q);
        assert!(SetFamily::from_json(r#"{"field":"gf(7)","sets":[[0]],"extra":1}"#).is_err());
        assert!(SetFamily::from_json(r#"{"field":"gf(6)","sets":[[0]]}"#).is_err());
        assert!(SetFamily::from_json(r#"{"field":"gf(7)","sets":[[true]]}"#).is_err());
    }

    #[test]
    fn symmetric_path_examples() {
        let f7 = gf(7);
        let set = ints(f7, &[0, 1, 2]);
        let fast =
            symmetric_fast_path(f7, set.clone(), 2, &sum_form(2, 1), DEFAULT_TUPLE_GUARD).unwrap();
        assert_eq!(fast.values, ints(f7, &[1, 2, 3]));
        let fam = SetFamily::repeated(f7, set.clone(), 2).unwrap();
        assert_eq!(
            fast,
            restricted_value_set(&fam, &sum_form(2, 1), DEFAULT_TUPLE_GUARD).unwrap()
        );

        let one =
            symmetric_fast_path(f7, set.clone(), 3, &sum_form(3, 2), DEFAULT_TUPLE_GUARD).unwrap();
        assert_eq!(one.cardinality, 1);

        let tail: SparsePoly<BigInt> = parse_poly("x1 + 3", 2).unwrap();
        let f = PowerSumForm::with_tail(2, tail).unwrap();
        assert!(matches!(
            symmetric_fast_path(f7, set.clone(), 2, &f, DEFAULT_TUPLE_GUARD),
            Err(EnumError::NotSymmetric(_))
        ));
        let g = PowerSumForm::new(
            2,
            vec![BigInt::from(1), BigInt::from(2)],
            SparsePoly::zero(2),
        )
        .unwrap();
        assert!(matches!(
            symmetric_fast_path(f7, set, 2, &g, DEFAULT_TUPLE_GUARD),
            Err(EnumError::NotSymmetric(_))
        ));
    }

    #[test]
    fn symmetric_path_matches_generic_with_symmetric_tail() {
        let f11 = gf(11);
        let tail: SparsePoly<BigInt> =
            parse_poly("2*x1 + 2*x2 + 2*x3 + x1*x2 + x1*x3 + x2*x3 - 5", 3).unwrap();
        let f = PowerSumForm::with_tail(3, tail)
            .unwrap()
            .declare_symmetric()
            .unwrap();
        for set in [
            vec![0, 1, 2, 3],
            vec![1, 4, 5, 9, 10],
            vec![0, 2, 3, 5, 7, 8],
        ] {
            let set = ints(f11, &set);
            let fam = SetFamily::repeated(f11, set.clone(), 3).unwrap();
            assert_eq!(
                symmetric_fast_path(f11, set, 3, &f, DEFAULT_TUPLE_GUARD).unwrap(),
                restricted_value_set(&fam, &f, DEFAULT_TUPLE_GUARD).unwrap()
            );
        }
    }

    #[test]
    fn rational_family_is_never_clamped() {
        let q = Field::rational();
        let fam = SetFamily::from_integers(q, &[vec![0, 1, 2, 3], vec![0, 1, 2, 3]]).unwrap();
        let r = restricted_value_set(&fam, &sum_form(2, 1), DEFAULT_TUPLE_GUARD).unwrap();
        assert_eq!(r.values, ints(q, &[1, 2, 3, 4, 5]));
    }

    #[test]
    fn table_and_generic_strategies_agree() {
        let f5 = gf(5);
        let p: SparsePoly<BigInt> = parse_poly("x1^3 + 2*x2^3 + x3^3 + x1*x2 - 1", 3).unwrap();
        let fam = SetFamily::from_integers(f5, &[vec![0, 1, 3], vec![1, 2, 3, 4], vec![0, 2, 4]])
            .unwrap();
        for restricted in [true, false] {
            assert_eq!(
                value_set(&fam, &p, restricted, 1000, Strategy::Auto).unwrap(),
                value_set(&fam, &p, restricted, 1000, Strategy::Generic).unwrap()
            );
        }
    }
}
