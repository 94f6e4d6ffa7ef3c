//! Enumerators and bounds against a naive evaluator written here: every point
//! of the grid is evaluated with `SparsePoly::eval` and collected in a set.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_bigint::BigInt;
use powersum::bounds::{bound_anr, bound_thm11_unrestricted, bound_thm12};
use powersum::enumerate::{
    random_tail, restricted_value_set, symmetric_fast_path, unrestricted_value_set, value_set,
    SetFamily, Strategy as Enumeration,
};
use powersum::polynomial::{parse_poly, Exponents};
use powersum::{Field, FieldElement, IntForm, IntPoly};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn naive(family: &SetFamily, poly: &IntPoly, restricted: bool) -> BTreeSet<FieldElement> {
    family
        .sets()
        .iter()
        .map(|s| s.iter())
        .multi_cartesian_product()
        .filter(|p| !restricted || p.iter().all_unique())
        .map(|p| {
            let point: Vec<FieldElement> = p.into_iter().cloned().collect();
            poly.eval(family.field(), &point).unwrap()
        })
        .collect()
}

/// A field, n, k, a family with `1 <= |A_i| <= 5`, and a tail seed.
fn instance() -> impl Strategy<Value = (u64, usize, u32, Vec<Vec<i64>>, u64)> {
    (
        prop::sample::select(vec![3u64, 5, 7, 11]),
        1usize..=3,
        1u32..=3,
    )
        .prop_flat_map(|(p, n, k)| {
            let set = prop::collection::btree_set(0..p as i64, 1..=5.min(p as usize));
            (
                Just(p),
                Just(n),
                Just(k),
                prop::collection::vec(set.prop_map(|s| s.into_iter().collect::<Vec<_>>()), n),
                any::<u64>(),
            )
        })
}

fn form(n: usize, k: u32, seed: u64) -> IntForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    IntForm::with_tail(k, random_tail(&mut rng, n, k, -3..=3)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn table_and_generic_match_naive((p, n, k, sets, seed) in instance()) {
        let field = Field::prime(p).unwrap();
        let family = SetFamily::from_integers(field, &sets).unwrap();
        let poly = form(n, k, seed).expand();
        for restricted in [false, true] {
            let expected: Vec<_> = naive(&family, &poly, restricted).into_iter().collect();
            let auto = value_set(&family, &poly, restricted, u64::MAX, Enumeration::Auto).unwrap();
            let generic = value_set(&family, &poly, restricted, u64::MAX, Enumeration::Generic).unwrap();
            prop_assert_eq!(&auto.values, &expected);
            prop_assert_eq!(&generic.values, &expected);
            prop_assert_eq!(auto.tuples_examined, generic.tuples_examined);
        }
    }

    #[test]
    fn bounds_hold_on_random_families((p, n, k, sets, seed) in instance()) {
        let field = Field::prime(p).unwrap();
        let pf = field.characteristic();
        let family = SetFamily::from_integers(field, &sets).unwrap();
        let f = form(n, k, seed);
        let sizes = family.sizes();
        let restricted = naive(&family, &f.expand(), true).len() as u64;
        let unrestricted = naive(&family, &f.expand(), false).len() as u64;
        prop_assert!(unrestricted >= bound_thm11_unrestricted(&sizes, k as usize, pf).unwrap().value);
        if let Ok(b) = bound_thm12(&sizes, k as usize, pf) {
            prop_assert!(restricted >= b.value, "{:?} {} < {}", sizes, restricted, b.value);
        }
        if k == 1 {
            if let Ok(b) = bound_anr(&sizes, pf, false) {
                prop_assert!(restricted >= b.value);
            }
        }
    }

    #[test]
    fn symmetric_fast_path_matches(p in prop::sample::select(vec![5u64, 7, 11]), n in 1usize..=3, k in 1u32..=3,
                                   set in prop::collection::btree_set(0i64..5, 1..=5), c in -3i64..=3) {
        let field = Field::prime(p).unwrap();
        let elements: Vec<FieldElement> = set.iter().map(|&x| field.embed_i64(x)).collect();
        // c * (x1 + ... + xn) is symmetric of degree 1 < k when k > 1.
        let tail = if k > 1 {
            IntPoly::from_terms(n, (0..n).map(|i| (Exponents::single(n, i, 1), BigInt::from(c)))).unwrap()
        } else {
            IntPoly::constant(n, BigInt::from(c))
        };
        let f = IntForm::with_tail(k, tail).unwrap().declare_symmetric().unwrap();
        let family = SetFamily::repeated(field, elements.clone(), n).unwrap();
        let fast = symmetric_fast_path(field, elements, n, &f, u64::MAX).unwrap();
        let full = restricted_value_set(&family, &f, u64::MAX).unwrap();
        prop_assert_eq!(fast, full);
    }
}

#[test]
fn rational_families_never_clamp() {
    let q = Field::rational();
    let poly = parse_poly::<BigInt>("x1^2 + x2^2 + x1", 2).unwrap();
    for s in 2..=6i64 {
        let sets = vec![(0..s).collect::<Vec<_>>(), (0..s + 1).collect()];
        let family = SetFamily::from_integers(q, &sets).unwrap();
        let f = IntForm::with_tail(2, parse_poly("x1", 2).unwrap()).unwrap();
        let values = restricted_value_set(&family, &f, u64::MAX).unwrap();
        assert_eq!(
            values.values,
            naive(&family, &poly, true).into_iter().collect::<Vec<_>>()
        );
        let b = bound_thm12(&family.sizes(), 2, q.characteristic()).unwrap();
        // Over the rationals the bound is the unclamped main term.
        assert_eq!(b.value as i64, b.detail.iter().sum::<i64>() + 1);
        assert!(values.cardinality as u64 >= b.value);
        let all = unrestricted_value_set(&family, &f, u64::MAX).unwrap();
        assert!(all.cardinality >= values.cardinality);
    }
}
