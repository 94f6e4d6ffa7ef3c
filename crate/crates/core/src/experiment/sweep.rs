//! The bound-verification sweep shared by `verify-bounds` and `tightness`.
//!
//! A sweep is a list of cells `(field, n, k)`. Each cell draws its tails (and
//! leading coefficients) once from a generator seeded with the config seed and
//! a stream derived from the cell, then runs every family of the cell against
//! every tail. A row reports, per (family, bound), the tail with the smallest
//! margin `actual - bound` among the tails whose hypotheses hold.
//!
//! Families are encoded by labels: residues over GF(p), and integers
//! `0..universe` over the rationals (the same integers, embedded).

use std::time::Instant;

use itertools::Itertools;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{Example41Scan, FamilyShape, FamilySpec, Leading, SweepConfig};
use super::report::{ReportRow, RowSink};
use super::ExperimentError;
use crate::bounds::{self, BoundName};
use crate::enumerate::{
    multiplicity_value_set, random_subset, random_tail, subset_mask, value_set, EnumError,
    FoldedTable, MultiplicityProfile, PrimeTable, SetFamily, Strategy,
};
use crate::field::{ExtendedNat, Field, FieldElement};
use crate::polynomial::{parse_poly, FieldPoly, PowerSumForm, SparsePoly};

/// Families evaluated per parallel batch.
const BATCH: usize = 2048;

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Record wall-clock milliseconds per family (otherwise `elapsed_ms = 0`,
    /// which keeps reports byte-identical across runs).
    pub timing: bool,
    /// Attach the sets of each family to its rows (JSON-lines mirror).
    pub with_sets: bool,
}

/// The parameters a row's hypotheses are checked against.
#[derive(Debug, Clone, Copy)]
pub struct RowContext<'a> {
    pub sizes: &'a [usize],
    pub k: usize,
    pub pf: ExtendedNat,
    /// `A_1 = ... = A_n` as sets.
    pub same_set: bool,
    pub unit_leading: bool,
    /// `n = 2` and `a_1 = -a_2` in the field.
    pub negated_pair: bool,
}

/// The bound value (if defined) and whether the bound's hypotheses hold.
pub fn evaluate_bound(name: BoundName, ctx: &RowContext<'_>) -> (Option<u64>, bool) {
    let sizes = ctx.sizes;
    let n = sizes.len();
    let equal = sizes
        .first()
        .copied()
        .filter(|&m| sizes.iter().all(|&s| s == m));
    let strictly_increasing =
        sizes.first().is_some_and(|&s| s > 0) && sizes.windows(2).all(|w| w[0] < w[1]);
    let (result, extra) = match name {
        BoundName::Thm12 => (bounds::bound_thm12(sizes, ctx.k, ctx.pf), ctx.unit_leading),
        BoundName::Thm13 | BoundName::Thm13Printed => {
            let f = if name == BoundName::Thm13 {
                bounds::bound_thm13
            } else {
                bounds::thm13_printed
            };
            match equal {
                Some(m) => (f(m, n, ctx.k, ctx.pf), ctx.unit_leading),
                None => return (None, false),
            }
        }
        BoundName::Thm11Unrestricted => {
            (bounds::bound_thm11_unrestricted(sizes, ctx.k, ctx.pf), true)
        }
        BoundName::Thm11Restricted => (bounds::bound_thm11_restricted(sizes, ctx.k, ctx.pf), true),
        BoundName::Conj11 => match equal.filter(|_| ctx.same_set) {
            Some(m) => (
                bounds::bound_conj11(m, n, ctx.k, ctx.pf, ctx.negated_pair),
                true,
            ),
            None => return (None, false),
        },
        BoundName::Anr if ctx.k == 1 => (
            bounds::bound_anr(sizes, ctx.pf, strictly_increasing),
            ctx.unit_leading,
        ),
        BoundName::Dsh if ctx.k == 1 && ctx.same_set => match equal {
            Some(m) => (bounds::bound_dsh(m, n, ctx.pf), ctx.unit_leading),
            None => return (None, false),
        },
        BoundName::Anr | BoundName::Dsh | BoundName::Ex41 => return (None, false),
    };
    match result {
        Ok(b) => (Some(b.value), b.hypotheses_ok && extra),
        Err(_) => (None, false),
    }
}

/// One drawn `f = a_1 x_1^k + ... + a_n x_n^k + g` with its lookup tables.
struct Tail {
    poly: SparsePoly<BigInt>,
    unit_leading: bool,
    negated_pair: bool,
    table: Option<PrimeTable>,
    folded: Option<FoldedTable>,
}

impl Tail {
    fn draw(
        rng: &mut ChaCha8Rng,
        field: Field,
        n: usize,
        k: usize,
        config: &SweepConfig,
        fixed: Option<&str>,
    ) -> Result<Tail, ExperimentError> {
        let leading: Vec<BigInt> = match config.leading {
            Leading::Unit => vec![BigInt::from(1); n],
            Leading::Random => (0..n)
                .map(|_| match field.modulus() {
                    Some(p) => BigInt::from(rng.gen_range(1..p)),
                    None => {
                        let v: i64 = rng.gen_range(1..=3);
                        BigInt::from(if rng.gen_bool(0.5) { v } else { -v })
                    }
                })
                .collect(),
        };
        let g = match fixed {
            Some(text) => parse_poly(text, n)?,
            None => {
                let c = config.tail_coefficients;
                random_tail(rng, n, k as u32, c.min..=c.max)
            }
        };
        let form = PowerSumForm::new(k as u32, leading, g)?;
        form.check_field(field)?;
        let embedded: Vec<FieldElement> = form
            .leading()
            .iter()
            .map(|a| field.embed_integer(a))
            .collect();
        let negated_pair = n == 2 && embedded[0].add(&embedded[1])?.is_zero();
        let unit_leading = embedded.iter().all(|a| *a == field.one());
        let poly = form.expand();
        let table = PrimeTable::build(&FieldPoly::compile(&poly, field)?);
        let folded = table.as_ref().and_then(PrimeTable::fold);
        Ok(Tail {
            poly,
            unit_leading,
            negated_pair,
            table,
            folded,
        })
    }
}

struct Cell {
    field: Field,
    n: usize,
    k: usize,
    tails: Vec<Tail>,
}

/// What a cell needs from each family.
#[derive(Clone, Copy)]
struct Needs {
    restricted: bool,
    unrestricted: bool,
}

struct Evaluator<'a> {
    config: &'a SweepConfig,
    options: RunOptions,
    needs: Needs,
    guard: u64,
}

impl Evaluator<'_> {
    fn cardinality(
        &self,
        cell: &Cell,
        tail: &Tail,
        sets: &[&[u64]],
        restricted: bool,
    ) -> Result<u64, ExperimentError> {
        if let (Some(folded), Some(last)) = (&tail.folded, sets.last()) {
            let mask =
                folded.value_mask(&sets[..sets.len() - 1], subset_mask(last), restricted, true);
            return Ok(mask.count_ones() as u64);
        }
        if let Some(table) = &tail.table {
            return Ok(table.value_mask(sets, restricted, true).0.count_ones() as u64);
        }
        let family = to_family(cell.field, sets)?;
        Ok(
            value_set(&family, &tail.poly, restricted, self.guard, Strategy::Auto)?.cardinality
                as u64,
        )
    }

    fn rows(&self, cell: &Cell, sets: &[&[u64]]) -> Result<Vec<ReportRow>, ExperimentError> {
        let start = self.options.timing.then(Instant::now);
        let sizes: Vec<usize> = sets.iter().map(|s| s.len()).collect();
        let same_set = sets.windows(2).all(|w| w[0] == w[1]);
        let tuples: u128 = sizes.iter().map(|&s| s as u128).product();
        let within_guard = tuples <= self.guard as u128;
        let pf = cell.field.characteristic();

        // Per tail: (restricted, unrestricted) cardinalities.
        let mut actuals = Vec::with_capacity(cell.tails.len());
        for tail in &cell.tails {
            let r = if self.needs.restricted && within_guard {
                Some(self.cardinality(cell, tail, sets, true)?)
            } else {
                None
            };
            let u = if self.needs.unrestricted && within_guard {
                Some(self.cardinality(cell, tail, sets, false)?)
            } else {
                None
            };
            actuals.push((r, u));
        }
        let elapsed_ms = start.map_or(0, |t| t.elapsed().as_millis() as u64);
        let rendered = self
            .options
            .with_sets
            .then(|| render_sets(cell.field, sets));

        let mut rows = Vec::with_capacity(self.config.bounds.len());
        for &name in &self.config.bounds {
            let mut chosen: Option<(i128, Option<u64>, Option<u64>, bool)> = None;
            let mut fallback = None;
            for (tail, &(r, u)) in cell.tails.iter().zip(&actuals) {
                let ctx = RowContext {
                    sizes: &sizes,
                    k: cell.k,
                    pf,
                    same_set,
                    unit_leading: tail.unit_leading,
                    negated_pair: tail.negated_pair,
                };
                let (value, ok) = evaluate_bound(name, &ctx);
                let actual = if name.is_restricted() { r } else { u };
                match (ok, value, actual) {
                    (true, Some(b), Some(a)) => {
                        let margin = a as i128 - b as i128;
                        if chosen.is_none_or(|c| margin < c.0) {
                            chosen = Some((margin, value, actual, true));
                        }
                    }
                    _ => {
                        if fallback.is_none()
                            || (ok && fallback.is_some_and(|f: (i128, _, _, bool)| !f.3))
                        {
                            fallback = Some((0, value, actual, ok));
                        }
                    }
                }
            }
            let (_, bound_value, actual_cardinality, hypotheses_ok) =
                chosen.or(fallback).expect("at least one tail");
            rows.push(ReportRow {
                field: cell.field.to_string(),
                p_f: pf,
                n: cell.n,
                k: cell.k,
                sizes: sizes.clone(),
                bound_name: name,
                bound_value,
                actual_cardinality,
                hypotheses_ok,
                tight: hypotheses_ok && bound_value.is_some() && bound_value == actual_cardinality,
                seed: self.config.seed,
                elapsed_ms,
                sets: rendered.clone(),
            });
        }
        Ok(rows)
    }

    /// Evaluates families in parallel batches and pushes rows in order.
    fn run_batches<I>(
        &self,
        cell: &Cell,
        families: I,
        sink: &mut dyn RowSink,
    ) -> Result<(), ExperimentError>
    where
        I: Iterator<Item = Vec<Vec<u64>>>,
    {
        for chunk in &families.chunks(BATCH) {
            let batch: Vec<Vec<Vec<u64>>> = chunk.collect();
            let rows: Vec<Result<Vec<ReportRow>, ExperimentError>> = batch
                .par_iter()
                .map(|sets| {
                    let refs: Vec<&[u64]> = sets.iter().map(Vec::as_slice).collect();
                    self.rows(cell, &refs)
                })
                .collect();
            for r in rows {
                for row in r? {
                    sink.push(row)?;
                }
            }
        }
        Ok(())
    }
}

fn element(field: Field, label: u64) -> FieldElement {
    field.embed_i64(label as i64)
}

fn to_family(field: Field, sets: &[&[u64]]) -> Result<SetFamily, EnumError> {
    SetFamily::new(
        field,
        sets.iter()
            .map(|s| s.iter().map(|&x| element(field, x)).collect())
            .collect(),
    )
}

fn render_sets(field: Field, sets: &[&[u64]]) -> Vec<Vec<String>> {
    sets.iter()
        .map(|s| s.iter().map(|&x| element(field, x).to_string()).collect())
        .collect()
}

/// Stream id of a generated cell.
fn cell_stream(field: Field, n: usize, k: usize) -> u64 {
    (field.modulus().unwrap_or(0) << 24) | ((n as u64) << 12) | k as u64
}

/// Stream id of the `index`-th explicit family at `k`.
fn explicit_stream(index: usize, k: usize) -> u64 {
    (1 << 63) | ((index as u64) << 12) | k as u64
}

fn k_values(config: &SweepConfig, n: usize) -> Vec<usize> {
    match (config.k.min.resolve(n), config.k.max.resolve(n)) {
        (Some(lo), Some(hi)) => (lo.max(1)..=hi).collect(),
        _ => Vec::new(),
    }
}

/// Admissible size vectors of a cell, in lexicographic order.
fn size_vectors(shape: &FamilyShape, n: usize, universe: u64) -> Vec<Vec<usize>> {
    let hi = shape.max_size.min(universe as usize);
    let lo: Vec<usize> = (1..=n).map(|i| shape.min_size.for_index(i)).collect();
    if shape.equal_sizes || shape.same_set {
        let start = lo.iter().copied().max().unwrap_or(0);
        return (start..=hi).map(|m| vec![m; n]).collect();
    }
    lo.iter()
        .map(|&l| l..=hi)
        .multi_cartesian_product()
        .collect()
}

/// Keeps the size vectors that no smaller admissible vector matches in bound.
/// If `B_i ⊆ A_i` for all `i`, the value set of the `B` family is contained in
/// that of the `A` family, so a family whose bound equals the bound of a
/// smaller size vector is verified by its subfamilies.
fn undominated(
    name: BoundName,
    vectors: Vec<Vec<usize>>,
    shape: &FamilyShape,
    k: usize,
    pf: ExtendedNat,
) -> Vec<Vec<usize>> {
    let n = vectors.first().map_or(0, Vec::len);
    let lo: Vec<usize> = (1..=n).map(|i| shape.min_size.for_index(i)).collect();
    let bound = |sizes: &[usize]| {
        let ctx = RowContext {
            sizes,
            k,
            pf,
            same_set: shape.same_set,
            unit_leading: true,
            negated_pair: false,
        };
        match evaluate_bound(name, &ctx) {
            (Some(v), true) => Some(v),
            _ => None,
        }
    };
    vectors
        .into_iter()
        .filter(|s| {
            let Some(here) = bound(s) else { return true };
            let smaller: Vec<Vec<usize>> = if shape.equal_sizes || shape.same_set {
                let floor = lo.iter().copied().max().unwrap_or(0);
                if s[0] > floor {
                    vec![vec![s[0] - 1; n]]
                } else {
                    Vec::new()
                }
            } else {
                (0..n)
                    .filter(|&i| s[i] > lo[i])
                    .map(|i| {
                        let mut t = s.clone();
                        t[i] -= 1;
                        t
                    })
                    .collect()
            };
            smaller.iter().all(|t| bound(t).is_none_or(|b| b < here))
        })
        .collect()
}

/// Every family with the given sizes over `0..universe`, in odometer order.
fn exhaustive_families(
    sizes: &[usize],
    universe: u64,
    same_set: bool,
) -> Box<dyn Iterator<Item = Vec<Vec<u64>>>> {
    let subsets = |s: usize| -> Vec<Vec<u64>> { (0..universe).combinations(s).collect() };
    if same_set {
        let n = sizes.len();
        return Box::new(subsets(sizes[0]).into_iter().map(move |a| vec![a; n]));
    }
    let lists: Vec<Vec<Vec<u64>>> = sizes.iter().map(|&s| subsets(s)).collect();
    Box::new(lists.into_iter().multi_cartesian_product())
}

/// Runs the sweep described by `config`, pushing rows into `sink` in report order.
pub fn run_sweep(
    config: &SweepConfig,
    options: RunOptions,
    sink: &mut dyn RowSink,
) -> Result<(), ExperimentError> {
    config.validate()?;
    let needs = Needs {
        restricted: config.bounds.iter().any(|b| b.is_restricted()),
        unrestricted: config.bounds.iter().any(|b| !b.is_restricted()),
    };
    let eval = Evaluator {
        config,
        options,
        needs,
        guard: config.guard(),
    };
    let make_cell = |field: Field,
                     n: usize,
                     k: usize,
                     stream: u64|
     -> Result<(Cell, ChaCha8Rng), ExperimentError> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(stream);
        let tails = match &config.tails {
            Some(fixed) => fixed
                .iter()
                .map(|g| Tail::draw(&mut rng, field, n, k, config, Some(g)))
                .collect::<Result<_, _>>()?,
            None => (0..config.tails_per_family)
                .map(|_| Tail::draw(&mut rng, field, n, k, config, None))
                .collect::<Result<_, _>>()?,
        };
        Ok((Cell { field, n, k, tails }, rng))
    };

    if !config.bounds.is_empty() {
        match &config.families {
            FamilySpec::Explicit { families } => {
                for (index, family) in families.iter().enumerate() {
                    let field = family.field();
                    let labels = explicit_labels(family)?;
                    for k in k_values(config, family.n()) {
                        let (cell, _) = make_cell(field, family.n(), k, explicit_stream(index, k))?;
                        eval.run_batches(&cell, std::iter::once(labels.clone()), sink)?;
                    }
                }
            }
            FamilySpec::Exhaustive { shape } | FamilySpec::Random { shape, .. } => {
                let n_range = config.n.expect("validated");
                for &field in &config.fields {
                    let universe = shape.universe.or(field.modulus()).expect("validated");
                    for n in n_range.min..=n_range.max {
                        for k in k_values(config, n) {
                            let (cell, mut rng) = make_cell(field, n, k, cell_stream(field, n, k))?;
                            let vectors = size_vectors(shape, n, universe);
                            match &config.families {
                                FamilySpec::Random { per_cell, .. } => {
                                    if vectors.is_empty() {
                                        continue;
                                    }
                                    let families: Vec<Vec<Vec<u64>>> = (0..*per_cell)
                                        .map(|_| {
                                            let sizes = &vectors[rng.gen_range(0..vectors.len())];
                                            if shape.same_set {
                                                vec![random_subset(&mut rng, universe, sizes[0]); n]
                                            } else {
                                                sizes
                                                    .iter()
                                                    .map(|&s| random_subset(&mut rng, universe, s))
                                                    .collect()
                                            }
                                        })
                                        .collect();
                                    eval.run_batches(&cell, families.into_iter(), sink)?;
                                }
                                _ => {
                                    let vectors = if config.reduce_dominated {
                                        undominated(
                                            config.bounds[0],
                                            vectors,
                                            shape,
                                            k,
                                            field.characteristic(),
                                        )
                                    } else {
                                        vectors
                                    };
                                    for sizes in vectors {
                                        eval.run_batches(
                                            &cell,
                                            exhaustive_families(&sizes, universe, shape.same_set),
                                            sink,
                                        )?;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if let Some(scan) = config.example41 {
        for row in example41_scan(scan, config.seed)? {
            sink.push(row)?;
        }
    }
    Ok(())
}

/// Labels of an explicit family: residues over GF(p), integers over the rationals.
fn explicit_labels(family: &SetFamily) -> Result<Vec<Vec<u64>>, ExperimentError> {
    if let Some(residues) = family.residues() {
        return Ok(residues);
    }
    family
        .sets()
        .iter()
        .map(|s| {
            s.iter()
                .map(|x| {
                    let q = x.lift();
                    match (q.is_integer(), u64::try_from(q.to_integer())) {
                        (true, Ok(v)) if v < 1 << 62 => Ok(v),
                        _ => Err(ExperimentError::InvalidConfig(format!(
                            "rational sweeps support nonnegative integer elements only, got {x}"
                        ))),
                    }
                })
                .collect()
        })
        .collect()
}

/// The `ex41` row of one profile: the multiplicity model against the formula.
pub fn example41_row(
    k: usize,
    q: usize,
    r: usize,
    n: usize,
    seed: u64,
) -> Result<ReportRow, ExperimentError> {
    let profile = MultiplicityProfile::new(k as u32, q as u32, r as u32, n as u32)?;
    let actual = multiplicity_value_set(&profile)?;
    let bound = bounds::example41_cardinality(n, k, q, r)?;
    Ok(ReportRow {
        field: "complex".into(),
        p_f: ExtendedNat::Infinity,
        n,
        k,
        sizes: vec![k * q + r],
        bound_name: BoundName::Ex41,
        bound_value: Some(bound),
        actual_cardinality: Some(actual),
        hypotheses_ok: true,
        tight: actual == bound,
        seed,
        elapsed_ms: 0,
        sets: None,
    })
}

/// All feasible profiles with `k <= k_max`, `q <= q_max`, `r < k`, `1 <= n <= kq + r`.
pub fn example41_scan(scan: Example41Scan, seed: u64) -> Result<Vec<ReportRow>, ExperimentError> {
    let mut rows = Vec::new();
    for k in 1..=scan.k_max {
        for q in 0..=scan.q_max {
            for r in 0..k {
                for n in 1..=k * q + r {
                    rows.push(example41_row(k, q, r, n, seed)?);
                }
            }
        }
    }
    Ok(rows)
}
