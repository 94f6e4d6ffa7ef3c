//! JSON configuration for the experiment commands. Unknown keys are rejected
//! everywhere.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::bounds::BoundName;
use crate::enumerate::{SetFamily, DEFAULT_TUPLE_GUARD};
use crate::field::Field;

/// An inclusive range `{"min": a, "max": b}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range<T> {
    pub min: T,
    pub max: T,
}

/// A `k` endpoint: a number, `"n"`, or `"n+c"` / `"n-c"` relative to the
/// number of variables of the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KBound {
    Fixed(usize),
    RelativeToN(i64),
}

impl KBound {
    pub fn resolve(self, n: usize) -> Option<usize> {
        match self {
            KBound::Fixed(k) => Some(k),
            KBound::RelativeToN(c) => usize::try_from(n as i64 + c).ok(),
        }
    }
}

impl FromStr for KBound {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Ok(k) = t.parse() {
            return Ok(KBound::Fixed(k));
        }
        let rest = t
            .strip_prefix('n')
            .ok_or_else(|| format!("bad k bound `{s}`"))?;
        if rest.is_empty() {
            return Ok(KBound::RelativeToN(0));
        }
        let (sign, digits) = rest.split_at(1);
        let c: i64 = digits.parse().map_err(|_| format!("bad k bound `{s}`"))?;
        match sign {
            "+" => Ok(KBound::RelativeToN(c)),
            "-" => Ok(KBound::RelativeToN(-c)),
            _ => Err(format!("bad k bound `{s}`")),
        }
    }
}

impl fmt::Display for KBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            KBound::Fixed(k) => write!(f, "{k}"),
            KBound::RelativeToN(0) => f.write_str("n"),
            KBound::RelativeToN(c) => write!(f, "n{c:+}"),
        }
    }
}

impl<'de> Deserialize<'de> for KBound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(k) => Ok(KBound::Fixed(k)),
            Raw::Text(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

impl Serialize for KBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            KBound::Fixed(k) => s.serialize_u64(*k as u64),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

fn default_k() -> Range<KBound> {
    Range {
        min: KBound::Fixed(1),
        max: KBound::RelativeToN(0),
    }
}

/// Lower size limit for generated sets: `"index"` means `|A_i| >= i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MinSize {
    #[default]
    Index,
    Fixed(usize),
}

impl MinSize {
    /// Lower bound on `|A_i|` (1-based `i`).
    pub fn for_index(self, i: usize) -> usize {
        match self {
            MinSize::Index => i,
            MinSize::Fixed(s) => s,
        }
    }
}

impl<'de> Deserialize<'de> for MinSize {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(s) => Ok(MinSize::Fixed(s)),
            Raw::Text(s) if s == "index" => Ok(MinSize::Index),
            Raw::Text(s) => Err(de::Error::custom(format!("bad min_size `{s}`"))),
        }
    }
}

/// Shape constraints shared by exhaustive and random generation.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyShape {
    #[serde(default)]
    pub min_size: MinSize,
    pub max_size: usize,
    /// All `|A_i|` equal.
    #[serde(default)]
    pub equal_sizes: bool,
    /// `A_1 = ... = A_n`.
    #[serde(default)]
    pub same_set: bool,
    /// Elements are drawn from `{0, ..., universe - 1}`. Defaults to the whole
    /// field for GF(p); required over the rationals.
    #[serde(default)]
    pub universe: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Every family of subsets with admissible sizes.
    Exhaustive {
        #[serde(flatten)]
        shape: FamilyShape,
    },
    /// `per_cell` seeded families per (field, n, k) cell.
    Random {
        per_cell: usize,
        #[serde(flatten)]
        shape: FamilyShape,
    },
    /// Families given verbatim; each family is its own cell.
    Explicit { families: Vec<SetFamily> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Leading {
    /// `a_1 = ... = a_n = 1`.
    #[default]
    Unit,
    /// Seeded nonzero `a_i`, drawn per tail.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example41Scan {
    pub k_max: usize,
    pub q_max: usize,
}

/// Configuration of `verify-bounds` and `tightness`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub fields: Vec<Field>,
    #[serde(default)]
    pub n: Option<Range<usize>>,
    #[serde(default = "default_k")]
    pub k: Range<KBound>,
    pub bounds: Vec<BoundName>,
    pub families: FamilySpec,
    #[serde(default)]
    pub leading: Leading,
    #[serde(default = "default_tails")]
    pub tails_per_family: usize,
    /// Fixed tails in the polynomial grammar, used instead of random ones.
    #[serde(default)]
    pub tails: Option<Vec<String>>,
    #[serde(default = "default_tail_coefficients")]
    pub tail_coefficients: Range<i64>,
    /// Skip size vectors whose bound is already reached by a smaller size
    /// vector. Needs a single bound.
    #[serde(default)]
    pub reduce_dominated: bool,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub guard_tuples: Option<u64>,
    /// Extra `ex41` profile rows (tightness scans).
    #[serde(default)]
    pub example41: Option<Example41Scan>,
}

fn default_tails() -> usize {
    3
}

fn default_tail_coefficients() -> Range<i64> {
    Range { min: -3, max: 3 }
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ExperimentError> {
    Err(ExperimentError::InvalidConfig(msg.into()))
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let config: SweepConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn guard(&self) -> u64 {
        self.guard_tuples.unwrap_or(DEFAULT_TUPLE_GUARD)
    }

    pub fn shape(&self) -> Option<&FamilyShape> {
        match &self.families {
            FamilySpec::Exhaustive { shape } | FamilySpec::Random { shape, .. } => Some(shape),
            FamilySpec::Explicit { .. } => None,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.bounds.is_empty() && self.example41.is_none() {
            return invalid("`bounds` is empty");
        }
        if self.tails.as_ref().is_some_and(Vec::is_empty) {
            return invalid("`tails` is empty");
        }
        if self.tails_per_family == 0 {
            return invalid("`tails_per_family` must be positive");
        }
        if self.tail_coefficients.min > self.tail_coefficients.max {
            return invalid("`tail_coefficients` is an empty range");
        }
        if self.guard_tuples == Some(0) {
            return invalid("`guard_tuples` must be positive");
        }
        if let (KBound::Fixed(a), KBound::Fixed(b)) = (self.k.min, self.k.max) {
            if a > b {
                return invalid("`k` is an empty range");
            }
        }
        if self.reduce_dominated {
            if self.bounds.len() != 1 {
                return invalid("`reduce_dominated` needs exactly one bound");
            }
            if self.bounds[0] == BoundName::Conj11 {
                return invalid("`reduce_dominated` needs a bound that depends on the sizes only");
            }
            if !matches!(self.families, FamilySpec::Exhaustive { .. }) {
                return invalid("`reduce_dominated` applies to exhaustive sweeps only");
            }
        }
        if self.bounds.contains(&BoundName::Ex41) {
            return invalid("`ex41` rows come from the `example41` section, not from families");
        }
        match &self.families {
            FamilySpec::Explicit { families } => {
                if families.is_empty() {
                    return invalid("`families` is empty");
                }
                if !self.fields.is_empty() || self.n.is_some() {
                    return invalid("explicit families carry their own field and n");
                }
            }
            FamilySpec::Exhaustive { shape } | FamilySpec::Random { shape, .. } => {
                if let FamilySpec::Random { per_cell: 0, .. } = self.families {
                    return invalid("`per_cell` must be positive");
                }
                let Some(n) = self.n else {
                    return invalid("`n` is required for generated families");
                };
                if n.min == 0 || n.min > n.max {
                    return invalid("`n` must be a nonempty range of positive integers");
                }
                if self.fields.is_empty() {
                    return invalid("`fields` is empty");
                }
                if shape.max_size == 0 || shape.universe == Some(0) {
                    return invalid("sizes and universe must be positive");
                }
                for field in &self.fields {
                    let universe = match (field.modulus(), shape.universe) {
                        (Some(p), Some(u)) if u > p => {
                            return invalid(format!("universe {u} exceeds the size of {field}"));
                        }
                        (_, Some(u)) => u,
                        (Some(p), None) => p,
                        (None, None) => {
                            return invalid("`universe` is required over the rationals")
                        }
                    };
                    if field.modulus().is_some_and(|p| p > 63)
                        && matches!(self.families, FamilySpec::Exhaustive { .. })
                    {
                        return invalid(format!("exhaustive sweeps need p < 64, got {field}"));
                    }
                    if universe > 63 {
                        return invalid("`universe` must be at most 63");
                    }
                }
            }
        }
        Ok(())
    }
}

/// Configuration of `verify-coeff`: every `q` with `q_1 + ... + q_n <= sum_max`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoeffConfig {
    pub n_max: usize,
    #[serde(default = "default_k")]
    pub k: Range<KBound>,
    pub sum_max: u64,
    #[serde(default)]
    pub guard_terms: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl CoeffConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let config: CoeffConfig = serde_json::from_str(text)?;
        if config.n_max == 0 {
            return invalid("`n_max` must be positive");
        }
        if config.guard_terms == Some(0) {
            return invalid("`guard_terms` must be positive");
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Example41Profile {
    pub k: usize,
    pub q: usize,
    pub r: usize,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example41Config {
    pub profiles: Vec<Example41Profile>,
    #[serde(default)]
    pub seed: u64,
}

impl Example41Config {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let config: Example41Config = serde_json::from_str(text)?;
        if config.profiles.is_empty() {
            return invalid("`profiles` is empty");
        }
        Ok(config)
    }
}

/// One proof-replay instance: a family, `k`, and an optional tail in the
/// textual polynomial grammar.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplayInstance {
    pub family: SetFamily,
    pub k: usize,
    #[serde(default)]
    pub tail: Option<String>,
}

/// Seeded replay instances: per field, `count` families with
/// `i <= |A_i| <= max_size` and a random tail.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplaySample {
    pub fields: Vec<Field>,
    pub n: Range<usize>,
    pub count: usize,
    pub max_size: usize,
    #[serde(default = "default_tail_coefficients")]
    pub tail_coefficients: Range<i64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplayConfig {
    #[serde(default)]
    pub instances: Vec<ReplayInstance>,
    #[serde(default)]
    pub sample: Option<ReplaySample>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub guard_tuples: Option<u64>,
    #[serde(default)]
    pub guard_terms: Option<usize>,
    #[serde(default = "default_witness_guard")]
    pub witness_guard: u64,
}

fn default_witness_guard() -> u64 {
    100_000
}

impl ReplayConfig {
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let config: ReplayConfig = serde_json::from_str(text)?;
        if config.instances.is_empty() && config.sample.is_none() {
            return invalid("give `instances` or `sample`");
        }
        if let Some(s) = &config.sample {
            if s.fields.is_empty()
                || s.count == 0
                || s.n.min == 0
                || s.n.min > s.n.max
                || s.max_size == 0
            {
                return invalid("`sample` needs fields, a positive count and nonempty ranges");
            }
            if s.fields.iter().any(|f| f.modulus().is_none_or(|p| p > 63)) {
                return invalid("sampled replays need GF(p) with p < 64");
            }
            if s.tail_coefficients.min > s.tail_coefficients.max {
                return invalid("`tail_coefficients` is an empty range");
            }
        }
        if config.guard_tuples == Some(0)
            || config.guard_terms == Some(0)
            || config.witness_guard == 0
        {
            return invalid("guards must be positive");
        }
        Ok(config)
    }
}
