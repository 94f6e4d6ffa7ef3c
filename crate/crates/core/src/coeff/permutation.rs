use std::collections::BTreeSet;

use itertools::Itertools;

use super::CoeffError;

/// A bijection of a finite index set (1-based indices by convention).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    /// Sorted domain.
    domain: Vec<usize>,
    /// `images[i]` is the image of `domain[i]`.
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(domain: Vec<usize>, images: Vec<usize>) -> Result<Self, CoeffError> {
        if domain.len() != images.len() {
            return Err(CoeffError::InvalidPermutation(
                "domain and images differ in length".into(),
            ));
        }
        let mut pairs: Vec<(usize, usize)> = domain.into_iter().zip(images).collect();
        pairs.sort_unstable();
        let (domain, images): (Vec<usize>, Vec<usize>) = pairs.into_iter().unzip();
        if domain.windows(2).any(|w| w[0] == w[1]) {
            return Err(CoeffError::InvalidPermutation(
                "repeated domain element".into(),
            ));
        }
        let mut sorted_images = images.clone();
        sorted_images.sort_unstable();
        if sorted_images != domain {
            return Err(CoeffError::InvalidPermutation(
                "images are not a rearrangement of the domain".into(),
            ));
        }
        Ok(Permutation { domain, images })
    }

    pub fn identity(n: usize) -> Self {
        let domain: Vec<usize> = (1..=n).collect();
        Permutation {
            images: domain.clone(),
            domain,
        }
    }

    /// One-line notation on `{1..n}`: `images[i-1] = σ(i)`.
    pub fn from_images(images: &[usize]) -> Result<Self, CoeffError> {
        Self::new((1..=images.len()).collect(), images.to_vec())
    }

    /// Product of disjoint cycles on `{1..n}`, e.g. `[[1, 2], [3, 4]]`.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self, CoeffError> {
        let mut images: Vec<usize> = (1..=n).collect();
        let mut seen = BTreeSet::new();
        for cycle in cycles {
            for (pos, &x) in cycle.iter().enumerate() {
                if x == 0 || x > n || !seen.insert(x) {
                    return Err(CoeffError::InvalidPermutation(format!(
                        "bad cycle entry {x}"
                    )));
                }
                images[x - 1] = cycle[(pos + 1) % cycle.len()];
            }
        }
        Self::from_images(&images)
    }

    /// All permutations of `{1..n}`.
    pub fn all(n: usize) -> impl Iterator<Item = Permutation> {
        (1..=n).permutations(n).map(move |images| Permutation {
            domain: (1..=n).collect(),
            images,
        })
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.domain.binary_search(&x).ok().map(|i| self.images[i])
    }

    pub fn cycle_count(&self) -> usize {
        let mut seen = vec![false; self.domain.len()];
        let mut cycles = 0;
        for start in 0..self.domain.len() {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self
                    .domain
                    .binary_search(&self.images[i])
                    .expect("bijection");
            }
        }
        cycles
    }

    /// `ε(σ) = (-1)^{|X| - #cycles}`.
    pub fn sign(&self) -> i8 {
        if (self.domain.len() - self.cycle_count()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `(-1)^{#inversions}`, inversions taken in the order of the domain.
    pub fn sign_by_inversions(&self) -> i8 {
        let inversions = (0..self.images.len())
            .tuple_combinations()
            .filter(|&(i, j)| self.images[i] > self.images[j])
            .count();
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// The restriction `σ|_A`, defined when `σ(A) = A`.
    pub fn restrict(&self, subset: &[usize]) -> Result<Permutation, CoeffError> {
        let mut images = Vec::with_capacity(subset.len());
        for &a in subset {
            match self.apply(a) {
                Some(b) if subset.contains(&b) => images.push(b),
                _ => return Err(CoeffError::NotInvariant { element: a }),
            }
        }
        Permutation::new(subset.to_vec(), images)
    }

    /// The domain minus `subset`.
    pub fn complement(&self, subset: &[usize]) -> Vec<usize> {
        self.domain
            .iter()
            .copied()
            .filter(|x| !subset.contains(x))
            .collect()
    }
}

/// Checks `ε(σ) = ε(σ|_A) ε(σ|_{X∖A})` for every `σ` in `S_n` and every
/// `σ`-invariant subset `A` of `{1..n}`. Returns the number of pairs checked
/// and the pairs (as one-line images and subset) where it fails.
pub fn sign_multiplicativity(n: usize) -> (u64, Vec<(Vec<usize>, Vec<usize>)>) {
    let mut checked = 0;
    let mut failures = Vec::new();
    for sigma in Permutation::all(n) {
        for bits in 0u32..1 << n {
            let subset: Vec<usize> = (1..=n).filter(|i| bits >> (i - 1) & 1 == 1).collect();
            let Ok(inner) = sigma.restrict(&subset) else {
                continue;
            };
            let outer = sigma
                .restrict(&sigma.complement(&subset))
                .expect("the complement of an invariant set is invariant");
            checked += 1;
            if inner.sign() * outer.sign() != sigma.sign() {
                failures.push((sigma.images.clone(), subset));
            }
        }
    }
    (checked, failures)
}
