//! Report rows, their CSV and JSON-lines encodings, and row sinks.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::ExperimentError;
use crate::bounds::BoundName;
use crate::field::ExtendedNat;

/// CSV header, in column order.
pub const CSV_HEADER: [&str; 12] = [
    "field",
    "p(F)",
    "n",
    "k",
    "sizes",
    "bound_name",
    "bound_value",
    "actual_cardinality",
    "hypotheses_ok",
    "tight",
    "seed",
    "elapsed_ms",
];

/// One (family, bound) comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub field: String,
    pub p_f: ExtendedNat,
    pub n: usize,
    pub k: usize,
    pub sizes: Vec<usize>,
    pub bound_name: BoundName,
    /// `None` when the bound is undefined for these parameters.
    pub bound_value: Option<u64>,
    /// `None` when the enumeration guard was hit.
    pub actual_cardinality: Option<u64>,
    pub hypotheses_ok: bool,
    pub tight: bool,
    pub seed: u64,
    pub elapsed_ms: u64,
    /// The sets of the family, for the JSON-lines mirror only.
    pub sets: Option<Vec<Vec<String>>>,
}

impl ReportRow {
    /// `hypotheses_ok` with an actual below the bound, or, for `ex41`, any
    /// difference from the exact formula.
    pub fn is_violation(&self) -> bool {
        match (
            self.hypotheses_ok,
            self.bound_value,
            self.actual_cardinality,
        ) {
            (true, Some(b), Some(a)) if self.bound_name == BoundName::Ex41 => a != b,
            (true, Some(b), Some(a)) => a < b,
            _ => false,
        }
    }

    pub fn is_theorem_violation(&self) -> bool {
        self.is_violation() && self.bound_name.is_theorem()
    }

    pub fn is_conjecture_violation(&self) -> bool {
        self.is_violation() && !self.bound_name.is_theorem()
    }

    pub fn guard_hit(&self) -> bool {
        self.actual_cardinality.is_none()
    }

    fn sizes_text(&self) -> String {
        let inner: Vec<String> = self.sizes.iter().map(usize::to_string).collect();
        format!("[{}]", inner.join(","))
    }

    pub fn csv_record(&self) -> [String; 12] {
        let opt = |v: Option<u64>| v.map_or_else(String::new, |v| v.to_string());
        [
            self.field.clone(),
            self.p_f.to_string(),
            self.n.to_string(),
            self.k.to_string(),
            self.sizes_text(),
            self.bound_name.to_string(),
            opt(self.bound_value),
            opt(self.actual_cardinality),
            self.hypotheses_ok.to_string(),
            self.tight.to_string(),
            self.seed.to_string(),
            self.elapsed_ms.to_string(),
        ]
    }

    pub fn json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            field: &'a str,
            #[serde(rename = "p(F)")]
            p_f: String,
            n: usize,
            k: usize,
            sizes: &'a [usize],
            bound_name: BoundName,
            bound_value: Option<u64>,
            actual_cardinality: Option<u64>,
            hypotheses_ok: bool,
            tight: bool,
            seed: u64,
            elapsed_ms: u64,
            #[serde(skip_serializing_if = "Option::is_none")]
            sets: Option<&'a Vec<Vec<String>>>,
        }
        serde_json::to_string(&Line {
            field: &self.field,
            p_f: self.p_f.to_string(),
            n: self.n,
            k: self.k,
            sizes: &self.sizes,
            bound_name: self.bound_name,
            bound_value: self.bound_value,
            actual_cardinality: self.actual_cardinality,
            hypotheses_ok: self.hypotheses_ok,
            tight: self.tight,
            seed: self.seed,
            elapsed_ms: self.elapsed_ms,
            sets: self.sets.as_ref(),
        })
        .expect("rows serialize")
    }
}

/// Receives rows in report order.
pub trait RowSink {
    fn push(&mut self, row: ReportRow) -> Result<(), ExperimentError>;
}

impl RowSink for Vec<ReportRow> {
    fn push(&mut self, row: ReportRow) -> Result<(), ExperimentError> {
        Vec::push(self, row);
        Ok(())
    }
}

/// Per-bound counters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BoundTally {
    pub rows: u64,
    pub hypotheses_ok: u64,
    pub tight: u64,
    pub violations: u64,
    pub guard_hits: u64,
}

/// Aggregate of a run, enough to decide the exit status without keeping rows.
/// Violating rows are kept verbatim.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub rows: u64,
    pub by_bound: BTreeMap<BoundName, BoundTally>,
    #[serde(skip)]
    pub theorem_violations: Vec<ReportRow>,
    #[serde(skip)]
    pub conjecture_violations: Vec<ReportRow>,
}

impl Summary {
    pub fn record(&mut self, row: &ReportRow) {
        self.rows += 1;
        let t = self.by_bound.entry(row.bound_name).or_default();
        t.rows += 1;
        t.hypotheses_ok += row.hypotheses_ok as u64;
        t.tight += row.tight as u64;
        t.guard_hits += row.guard_hit() as u64;
        if row.is_violation() {
            t.violations += 1;
            if row.bound_name.is_theorem() {
                self.theorem_violations.push(row.clone());
            } else {
                self.conjecture_violations.push(row.clone());
            }
        }
    }

    pub fn tally(&self, bound: BoundName) -> BoundTally {
        self.by_bound.get(&bound).cloned().unwrap_or_default()
    }

    pub fn outcome(&self) -> Outcome {
        if !self.theorem_violations.is_empty() {
            Outcome::TheoremViolated
        } else if !self.conjecture_violations.is_empty() {
            Outcome::ConjectureViolated
        } else {
            Outcome::Ok
        }
    }
}

impl RowSink for Summary {
    fn push(&mut self, row: ReportRow) -> Result<(), ExperimentError> {
        self.record(&row);
        Ok(())
    }
}

/// The exit-status classification of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok,
    ConjectureViolated,
    TheoremViolated,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::TheoremViolated => 2,
            Outcome::ConjectureViolated => 3,
        }
    }
}

/// Writes rows as CSV (and optionally JSON lines) while keeping a [`Summary`].
pub struct ReportWriter<W: Write, J: Write> {
    csv: csv::Writer<W>,
    jsonl: Option<J>,
    pub summary: Summary,
}

impl<W: Write, J: Write> ReportWriter<W, J> {
    pub fn new(out: W, jsonl: Option<J>) -> Result<Self, ExperimentError> {
        let mut csv = csv::Writer::from_writer(out);
        csv.write_record(CSV_HEADER)?;
        Ok(ReportWriter {
            csv,
            jsonl,
            summary: Summary::default(),
        })
    }

    pub fn finish(mut self) -> Result<Summary, ExperimentError> {
        self.csv.flush()?;
        if let Some(j) = self.jsonl.as_mut() {
            j.flush()?;
        }
        Ok(self.summary)
    }
}

impl<W: Write, J: Write> RowSink for ReportWriter<W, J> {
    fn push(&mut self, row: ReportRow) -> Result<(), ExperimentError> {
        self.summary.record(&row);
        self.csv.write_record(row.csv_record())?;
        if let Some(j) = self.jsonl.as_mut() {
            writeln!(j, "{}", row.json_line())?;
        }
        Ok(())
    }
}
