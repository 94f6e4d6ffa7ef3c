use crate::polynomial::FieldPoly;

/// All values of a polynomial on GF(p)^n, for `p < 64` so that a value set
/// fits in one `u64` bitmask.
///
/// Points are indexed with `x_1` most significant: `((x_1 p + x_2) p + ...) p + x_n`.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    p: usize,
    n: usize,
    table: Vec<u8>,
}

impl PrimeTable {
    pub const MAX_PRIME: u64 = 63;
    pub const MAX_ENTRIES: usize = 1 << 22;

    pub fn supports(p: u64, n: usize) -> bool {
        p <= Self::MAX_PRIME
            && (p as usize)
                .checked_pow(n as u32)
                .is_some_and(|size| size <= Self::MAX_ENTRIES)
    }

    /// `None` when the field is not a supported prime field.
    pub fn build(poly: &FieldPoly) -> Option<Self> {
        let p = poly.field().modulus()?;
        let n = poly.nvars();
        if !Self::supports(p, n) {
            return None;
        }
        let size = (p as usize).pow(n as u32);
        let mut point = vec![0u64; n];
        let mut table = Vec::with_capacity(size);
        for _ in 0..size {
            table.push(poly.eval_residues(p, &point) as u8);
            for coord in point.iter_mut().rev() {
                *coord += 1;
                if *coord < p {
                    break;
                }
                *coord = 0;
            }
        }
        Some(PrimeTable {
            p: p as usize,
            n,
            table,
        })
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, point: &[u64]) -> u64 {
        let idx = point
            .iter()
            .fold(0usize, |acc, &x| acc * self.p + x as usize);
        self.table[idx] as u64
    }

    /// Bitmask of the values on `sets[0] x ... x sets[n-1]` (distinct
    /// coordinates only when `restricted`), and the number of tuples visited.
    /// With `stop_when_full` the walk ends as soon as all `p` values are seen.
    pub fn value_mask<S: AsRef<[u64]>>(
        &self,
        sets: &[S],
        restricted: bool,
        stop_when_full: bool,
    ) -> (u64, u64) {
        assert_eq!(sets.len(), self.n, "family arity");
        let mut state = MaskWalk {
            table: self,
            sets,
            restricted,
            full: stop_when_full.then_some(full_mask(self.p)),
            mask: 0,
            count: 0,
        };
        state.descend(0, 0, 0);
        (state.mask, state.count)
    }

    /// Precomputes, for every point of GF(p)^{n-1} and every subset `S` of
    /// GF(p), the mask of `{f(prefix, x) : x in S}`. `None` if that table
    /// would exceed [`PrimeTable::MAX_ENTRIES`] entries.
    pub fn fold(&self) -> Option<FoldedTable> {
        let width = 1usize << self.p;
        let prefixes = self.table.len() / self.p;
        if prefixes.checked_mul(width)? > Self::MAX_ENTRIES {
            return None;
        }
        let mut rows = vec![0u64; prefixes * width];
        for prefix in 0..prefixes {
            let values = &self.table[prefix * self.p..(prefix + 1) * self.p];
            let row = &mut rows[prefix * width..(prefix + 1) * width];
            for subset in 1..width {
                let low = subset.trailing_zeros() as usize;
                row[subset] = row[subset & (subset - 1)] | 1 << values[low];
            }
        }
        Some(FoldedTable {
            p: self.p,
            n: self.n,
            width,
            rows,
        })
    }
}

fn full_mask(p: usize) -> u64 {
    (1u64 << p) - 1
}

/// Bitmask of a set of residues.
pub fn subset_mask(set: &[u64]) -> u64 {
    set.iter().fold(0, |m, &x| m | 1 << x)
}

struct MaskWalk<'a, S> {
    table: &'a PrimeTable,
    sets: &'a [S],
    restricted: bool,
    full: Option<u64>,
    mask: u64,
    count: u64,
}

impl<S: AsRef<[u64]>> MaskWalk<'_, S> {
    /// Returns `true` once the walk may stop.
    fn descend(&mut self, depth: usize, idx: usize, used: u64) -> bool {
        let p = self.table.p;
        if depth + 1 == self.sets.len() {
            let row = &self.table.table[idx * p..idx * p + p];
            for &x in self.sets[depth].as_ref() {
                if self.restricted && used >> x & 1 == 1 {
                    continue;
                }
                self.mask |= 1 << row[x as usize];
                self.count += 1;
            }
            return self.full == Some(self.mask);
        }
        for &x in self.sets[depth].as_ref() {
            if self.restricted && used >> x & 1 == 1 {
                continue;
            }
            if self.descend(depth + 1, idx * p + x as usize, used | 1 << x) {
                return true;
            }
        }
        false
    }
}

/// A [`PrimeTable`] with the last coordinate folded into subset masks, so a
/// walk only visits the first `n - 1` coordinates.
#[derive(Debug, Clone)]
pub struct FoldedTable {
    p: usize,
    n: usize,
    width: usize,
    rows: Vec<u64>,
}

impl FoldedTable {
    /// Same mask as [`PrimeTable::value_mask`]; `last` is the subset mask of
    /// the final set.
    pub fn value_mask<S: AsRef<[u64]>>(
        &self,
        prefix_sets: &[S],
        last: u64,
        restricted: bool,
        stop_when_full: bool,
    ) -> u64 {
        assert_eq!(prefix_sets.len() + 1, self.n, "family arity");
        let full = stop_when_full.then_some(full_mask(self.p));
        let mut mask = 0;
        self.descend(prefix_sets, 0, 0, 0, last, restricted, full, &mut mask);
        mask
    }

    #[allow(clippy::too_many_arguments)]
    fn descend<S: AsRef<[u64]>>(
        &self,
        sets: &[S],
        depth: usize,
        idx: usize,
        used: u64,
        last: u64,
        restricted: bool,
        full: Option<u64>,
        mask: &mut u64,
    ) -> bool {
        if depth == sets.len() {
            let available = if restricted { last & !used } else { last };
            *mask |= self.rows[idx * self.width + available as usize];
            return full == Some(*mask);
        }
        for &x in sets[depth].as_ref() {
            if restricted && used >> x & 1 == 1 {
                continue;
            }
            if self.descend(
                sets,
                depth + 1,
                idx * self.p + x as usize,
                used | 1 << x,
                last,
                restricted,
                full,
                mask,
            ) {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::polynomial::{parse_poly, SparsePoly};
    use num_bigint::BigInt;

    #[test]
    fn table_matches_direct_evaluation() {
        let f = Field::prime(7).unwrap();
        let poly: SparsePoly<BigInt> = parse_poly("x1^2 + 3*x2^2 + x1 - 2", 2).unwrap();
        let compiled = FieldPoly::compile(&poly, f).unwrap();
        let t = PrimeTable::build(&compiled).unwrap();
        for a in 0..7u64 {
            for b in 0..7u64 {
                let direct = poly
                    .eval(f, &[f.embed_i64(a as i64), f.embed_i64(b as i64)])
                    .unwrap()
                    .residue_value()
                    .unwrap();
                assert_eq!(t.value(&[a, b]), direct);
            }
        }
    }

    #[test]
    fn early_stop_keeps_the_mask() {
        let f = Field::prime(5).unwrap();
        let poly: SparsePoly<BigInt> = parse_poly("x1 + x2", 2).unwrap();
        let t = PrimeTable::build(&FieldPoly::compile(&poly, f).unwrap()).unwrap();
        let all: Vec<u64> = (0..5).collect();
        let (full, n_full) = t.value_mask(&[all.clone(), all.clone()], true, false);
        let (early, n_early) = t.value_mask(&[all.clone(), all], true, true);
        assert_eq!(full, 0b11111);
        assert_eq!(early, full);
        assert_eq!(n_full, 20);
        assert!(n_early < n_full);
    }

    #[test]
    fn folded_matches_unfolded() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = Field::prime(7).unwrap();
        for n in 1..=3 {
            let tail = crate::enumerate::random_tail(&mut rng, n, 2, -3..=3);
            let form = crate::polynomial::PowerSumForm::with_tail(2, tail).unwrap();
            let t = PrimeTable::build(&FieldPoly::compile(&form.expand(), f).unwrap()).unwrap();
            let folded = t.fold().unwrap();
            for _ in 0..50 {
                let sets: Vec<Vec<u64>> = (0..n)
                    .map(|_| {
                        let size = rand::Rng::gen_range(&mut rng, 1..=7);
                        crate::enumerate::random_subset(&mut rng, 7, size)
                    })
                    .collect();
                let last = subset_mask(&sets[n - 1]);
                for restricted in [false, true] {
                    let (mask, _) = t.value_mask(&sets, restricted, false);
                    assert_eq!(
                        folded.value_mask(&sets[..n - 1], last, restricted, false),
                        mask
                    );
                    let early = folded.value_mask(&sets[..n - 1], last, restricted, true);
                    assert_eq!(early == 0x7f, mask == 0x7f);
                }
            }
        }
    }

    #[test]
    fn unsupported_fields() {
        assert!(!PrimeTable::supports(67, 1));
        assert!(!PrimeTable::supports(13, 7));
        assert!(PrimeTable::supports(13, 4));
        let poly: SparsePoly<BigInt> = parse_poly("x1", 1).unwrap();
        assert!(
            PrimeTable::build(&FieldPoly::compile(&poly, Field::rational()).unwrap()).is_none()
        );
    }
}
