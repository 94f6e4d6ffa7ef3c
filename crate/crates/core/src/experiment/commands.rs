//! `verify-coeff`, `example41` and `proof-replay`.

use std::io::Write;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{CoeffConfig, Example41Config, ReplayConfig, ReplayInstance, ReplaySample};
use super::report::{Outcome, ReportRow, ReportWriter};
use super::sweep::example41_row;
use super::ExperimentError;
use crate::coeff::{
    proof_replay, CoeffCertificate, CoeffError, OracleCache, ReplayOptions, ReplayRecord,
};
use crate::enumerate::{random_subset, random_tail, SetFamily, DEFAULT_TUPLE_GUARD};
use crate::field::Field;
use crate::polynomial::{parse_poly, PolyError, PowerSumForm, SparsePoly, DEFAULT_TERM_CAP};

pub const COEFF_CSV_HEADER: [&str; 8] = [
    "n",
    "k",
    "q",
    "N",
    "closed_form",
    "oracle",
    "status",
    "seed",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffRow {
    pub certificate: CoeffCertificate,
    /// `agree`, `mismatch`, or `too_large` when the oracle hit the term cap.
    pub status: &'static str,
}

/// Every `q` in `N^n` with `q_1 + ... + q_n <= sum_max`, in lexicographic order.
fn compositions(n: usize, sum_max: u64) -> Vec<Vec<u64>> {
    fn fill(prefix: &mut Vec<u64>, n: usize, budget: u64, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for v in 0..=budget {
            prefix.push(v);
            fill(prefix, n, budget - v, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(n), n, sum_max, &mut out);
    out
}

/// Compares the closed form with the oracle for every `q` of the config and
/// writes one CSV row per `q`. Mismatches give [`Outcome::TheoremViolated`].
pub fn run_verify_coeff<W: Write>(
    config: &CoeffConfig,
    out: W,
) -> Result<(Vec<CoeffRow>, Outcome), ExperimentError> {
    let term_cap = config.guard_terms.unwrap_or(DEFAULT_TERM_CAP);
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(COEFF_CSV_HEADER)?;
    let mut rows = Vec::new();
    for n in 1..=config.n_max {
        let (Some(lo), Some(hi)) = (config.k.min.resolve(n), config.k.max.resolve(n)) else {
            continue;
        };
        for k in lo.max(1)..=hi {
            let mut cache = OracleCache::new(term_cap);
            for q in compositions(n, config.sum_max) {
                let row = match CoeffCertificate::compute(&q, k, Some(&mut cache)) {
                    Ok(c) => {
                        let status = if c.agrees() { "agree" } else { "mismatch" };
                        CoeffRow {
                            certificate: c,
                            status,
                        }
                    }
                    Err(CoeffError::Poly(PolyError::ExpansionTooLarge { .. })) => CoeffRow {
                        certificate: CoeffCertificate::compute(&q, k, None)?,
                        status: "too_large",
                    },
                    Err(e) => return Err(e.into()),
                };
                let c = &row.certificate;
                let q_text: Vec<String> = c.q.iter().map(u64::to_string).collect();
                csv.write_record([
                    c.n.to_string(),
                    c.k.to_string(),
                    format!("[{}]", q_text.join(",")),
                    c.big_n.to_string(),
                    c.closed_form.to_string(),
                    c.oracle
                        .as_ref()
                        .map_or_else(String::new, BigInt::to_string),
                    row.status.to_string(),
                    config.seed.to_string(),
                ])?;
                rows.push(row);
            }
        }
    }
    csv.flush()?;
    let outcome = if rows.iter().any(|r| r.status == "mismatch") {
        Outcome::TheoremViolated
    } else {
        Outcome::Ok
    };
    Ok((rows, outcome))
}

/// One `ex41` row per profile, written as a report.
pub fn run_example41<W: Write, J: Write>(
    config: &Example41Config,
    out: W,
    jsonl: Option<J>,
) -> Result<(Vec<ReportRow>, Outcome), ExperimentError> {
    let mut writer = ReportWriter::new(out, jsonl)?;
    let mut rows = Vec::new();
    for p in &config.profiles {
        let row = example41_row(p.k, p.q, p.r, p.n, config.seed)?;
        super::report::RowSink::push(&mut writer, row.clone())?;
        rows.push(row);
    }
    let summary = writer.finish()?;
    Ok((rows, summary.outcome()))
}

/// A replay instance ready to run.
#[derive(Debug, Clone)]
pub struct PreparedReplay {
    pub family: SetFamily,
    pub form: PowerSumForm<BigInt>,
}

/// Explicit instances followed by the seeded sample, if any.
pub fn replay_instances(config: &ReplayConfig) -> Result<Vec<PreparedReplay>, ExperimentError> {
    let mut out = Vec::new();
    for ReplayInstance { family, k, tail } in &config.instances {
        let n = family.n();
        let tail = match tail {
            Some(text) => parse_poly::<BigInt>(text, n)?,
            None => SparsePoly::zero(n),
        };
        out.push(PreparedReplay {
            family: family.clone(),
            form: PowerSumForm::with_tail(*k as u32, tail)?,
        });
    }
    if let Some(sample) = &config.sample {
        out.extend(sample_instances(sample, config.seed)?);
    }
    Ok(out)
}

/// Per field: `count` instances with `n` uniform in range (capped at
/// `min(max_size, p)`), `k` uniform in `1..=n`, `|A_i|` uniform in `[i, min(max_size, p)]`, random subsets and a
/// random tail of degree below `k`.
fn sample_instances(
    sample: &ReplaySample,
    seed: u64,
) -> Result<Vec<PreparedReplay>, ExperimentError> {
    let mut out = Vec::new();
    for &field in &sample.fields {
        let p = field.modulus().expect("validated");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(p);
        let hi = sample.max_size.min(p as usize);
        if sample.n.min > hi {
            return Err(ExperimentError::InvalidConfig(format!(
                "cannot draw |A_{}| >= {} with max_size {} over {field}",
                sample.n.min, sample.n.min, sample.max_size
            )));
        }
        for _ in 0..sample.count {
            let n = rng.gen_range(sample.n.min..=sample.n.max.min(hi));
            let k = rng.gen_range(1..=n);
            let sets: Vec<Vec<i64>> = (1..=n)
                .map(|i| {
                    let size = rng.gen_range(i..=hi);
                    random_subset(&mut rng, p, size)
                        .into_iter()
                        .map(|x| x as i64)
                        .collect()
                })
                .collect();
            let c = sample.tail_coefficients;
            let tail = random_tail(&mut rng, n, k as u32, c.min..=c.max);
            out.push(PreparedReplay {
                family: SetFamily::from_integers(field, &sets)?,
                form: PowerSumForm::with_tail(k as u32, tail)?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum ReplayEntry {
    Record(Box<ReplayRecord>),
    /// The construction failed an internal check (`h e = 0`, a missing
    /// witness, a size invariant).
    Failure {
        field: String,
        sizes: Vec<usize>,
        k: usize,
        error: String,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ReplayOutcome {
    pub seed: u64,
    pub instances: Vec<ReplayEntry>,
    #[serde(skip)]
    pub outcome: Outcome,
}

impl ReplayOutcome {
    pub fn records(&self) -> impl Iterator<Item = &ReplayRecord> {
        self.instances.iter().filter_map(|e| match e {
            ReplayEntry::Record(r) => Some(r.as_ref()),
            ReplayEntry::Failure { .. } => None,
        })
    }
}

/// Replays every instance. Hypothesis violations are errors; broken internal
/// invariants are recorded and turn the outcome into a theorem violation.
pub fn run_proof_replay(config: &ReplayConfig) -> Result<ReplayOutcome, ExperimentError> {
    let options = ReplayOptions {
        witness_guard: config.witness_guard,
        tuple_guard: config.guard_tuples.unwrap_or(DEFAULT_TUPLE_GUARD),
        term_cap: config
            .guard_terms
            .unwrap_or(ReplayOptions::default().term_cap),
        oracle: true,
    };
    let mut instances = Vec::new();
    let mut outcome = Outcome::Ok;
    for inst in replay_instances(config)? {
        match proof_replay(&inst.family, &inst.form, options) {
            Ok(record) => instances.push(ReplayEntry::Record(Box::new(record))),
            Err(CoeffError::InternalInvariantBroken(msg)) => {
                outcome = Outcome::TheoremViolated;
                instances.push(ReplayEntry::Failure {
                    field: inst.family.field().to_string(),
                    sizes: inst.family.sizes(),
                    k: inst.form.k() as usize,
                    error: msg,
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(ReplayOutcome {
        seed: config.seed,
        instances,
        outcome,
    })
}

/// Field of a replay record, parsed back.
pub fn record_field(record: &ReplayRecord) -> Field {
    record
        .field
        .parse()
        .expect("fields print in the parseable form")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::factorial;
    use num_traits::Zero;

    #[test]
    fn composition_counts() {
        // C(sum_max + n, n)
        assert_eq!(compositions(3, 4).len(), 35);
        assert_eq!(compositions(1, 0), vec![vec![0]]);
    }

    #[test]
    fn coeff_sweep() {
        let config = CoeffConfig::from_json(r#"{"n_max": 4, "sum_max": 5}"#).unwrap();
        let mut buf = Vec::new();
        let (rows, outcome) = run_verify_coeff(&config, &mut buf).unwrap();
        assert_eq!(outcome, Outcome::Ok);
        assert!(rows.iter().all(|r| r.status == "agree"));
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,k,q,N,closed_form,oracle,status,seed\n1,1,[0],0,1,1,agree,0\n"));
    }

    #[test]
    fn coeff_guard_marks_rows() {
        let config =
            CoeffConfig::from_json(r#"{"n_max": 3, "sum_max": 3, "guard_terms": 5}"#).unwrap();
        let (rows, outcome) = run_verify_coeff(&config, std::io::sink()).unwrap();
        assert_eq!(outcome, Outcome::Ok);
        assert!(rows.iter().any(|r| r.status == "too_large"));
        assert!(rows
            .iter()
            .filter(|r| r.status == "too_large")
            .all(|r| r.certificate.oracle.is_none()));
    }

    #[test]
    fn example41_command() {
        let config = Example41Config::from_json(
            r#"{"profiles": [{"k": 2, "q": 2, "r": 1, "n": 2}, {"k": 1, "q": 4, "r": 0, "n": 2}, {"k": 3, "q": 1, "r": 2, "n": 5}]}"#,
        )
        .unwrap();
        let (rows, outcome) = run_example41(&config, std::io::sink(), None::<Vec<u8>>).unwrap();
        assert_eq!(outcome, Outcome::Ok);
        let values: Vec<_> = rows.iter().map(|r| r.actual_cardinality.unwrap()).collect();
        assert_eq!(values[..2], [4, 5]);
        assert!(rows.iter().all(|r| r.tight));
    }

    #[test]
    fn sampled_replays() {
        let config = ReplayConfig::from_json(
            r#"{"sample": {"fields": ["gf(5)", "gf(7)"], "n": {"min": 1, "max": 3}, "count": 6, "max_size": 5}, "seed": 2}"#,
        )
        .unwrap();
        let result = run_proof_replay(&config).unwrap();
        assert_eq!(result.outcome, Outcome::Ok);
        assert_eq!(result.records().count(), 12);
        for r in result.records() {
            assert!(!r.he.is_zero());
            assert!((factorial(r.big_n - 1) % &r.h).is_zero());
            assert!(record_field(r).modulus().is_some());
        }
    }

    #[test]
    fn explicit_replays() {
        let config = ReplayConfig::from_json(
            r#"{"instances": [
                {"family": {"field": "gf(5)", "sets": [[0,1,2,3,4],[0,1,2,3,4]]}, "k": 1},
                {"family": {"field": "gf(11)", "sets": [[0,1,2,3,4,5,6],[0,1,2,3,4,5,6,7,8,9],[0,1,2,3,4,5,6,7,8,9,10]]},
                 "k": 2, "tail": "2*x1 - x3 + 1"}]}"#,
        )
        .unwrap();
        let result = run_proof_replay(&config).unwrap();
        let records: Vec<_> = result.records().collect();
        assert_eq!(records[0].shrunk_sizes, vec![2, 5]);
        assert_eq!(records[1].shrunk_sizes, vec![5, 10, 11]);
        assert_eq!(records[1].q_prime, vec![2, 4, 4]);
        let json = serde_json::to_string(&result).unwrap();
        assert!(json.contains("\"instances\""));

        let bad = ReplayConfig::from_json(
            r#"{"instances": [{"family": {"field": "gf(5)", "sets": [[0,1],[0]]}, "k": 1}]}"#,
        )
        .unwrap();
        assert!(run_proof_replay(&bad).is_err());
    }
}
