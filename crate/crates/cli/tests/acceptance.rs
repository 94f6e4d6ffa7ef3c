//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test --test acceptance` (the test profile is optimised; the
//! exhaustive GF(7) sweeps dominate the runtime).

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;
use powersum::bounds::{
    equal_size_sum_closed_form, equal_size_sum_via_n0, erdos_heilbronn, BoundName,
};
use powersum::coeff::{factorial, sign_multiplicativity};
use powersum::enumerate::{restricted_value_set, SetFamily};
use powersum::experiment::{
    example41_scan, run_proof_replay, run_sweep, run_verify_coeff, CoeffConfig, Example41Scan,
    ReplayConfig, RunOptions, Summary, SweepConfig,
};
use powersum::{Field, IntForm};

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs one sweep config and returns its summary.
fn sweep(json: &str) -> Result<Summary, String> {
    let config = SweepConfig::from_json(json).map_err(|e| e.to_string())?;
    let mut summary = Summary::default();
    run_sweep(&config, RunOptions::default(), &mut summary).map_err(|e| e.to_string())?;
    Ok(summary)
}

/// Exhaustive sweeps over GF(3), GF(5), GF(7) (sizes <= 5) and seeded samples
/// of 200 families per cell over GF(11), GF(13) (sizes <= 6), 3 tails each.
fn sweep_bound(bound: BoundName, extra: &str, min_size: &str, k: &str, equal: bool) -> Verdict {
    let shape = format!(r#""min_size": {min_size}, "equal_sizes": {equal}"#);
    let exhaustive = format!(
        r#"{{"fields": ["gf(3)", "gf(5)", "gf(7)"], "n": {{"min": 1, "max": 4}}, "k": {k},
            "bounds": ["{bound}"], "reduce_dominated": true, {extra}
            "families": {{"mode": "exhaustive", "max_size": 5, {shape}}}, "seed": 20240101}}"#
    );
    let sampled = format!(
        r#"{{"fields": ["gf(11)", "gf(13)"], "n": {{"min": 1, "max": 4}}, "k": {k},
            "bounds": ["{bound}"], {extra}
            "families": {{"mode": "random", "per_cell": 200, "max_size": 6, {shape}}}, "seed": 20240101}}"#
    );
    let a = sweep(&exhaustive)?;
    let b = sweep(&sampled)?;
    let (ta, tb) = (a.tally(bound), b.tally(bound));
    ensure(ta.rows > 0 && tb.rows > 0, || "empty sweep".into())?;
    for (label, t, s) in [("exhaustive", &ta, &a), ("sampled", &tb, &b)] {
        ensure(t.hypotheses_ok == t.rows, || {
            format!(
                "{label}: {} of {} rows fail hypotheses",
                t.rows - t.hypotheses_ok,
                t.rows
            )
        })?;
        ensure(t.guard_hits == 0, || {
            format!("{label}: {} guard hits", t.guard_hits)
        })?;
        ensure(t.violations == 0, || {
            format!(
                "{label}: {} violations, first {}",
                t.violations,
                s.theorem_violations[0].json_line()
            )
        })?;
    }
    Ok(format!(
        "{} exhaustive rows (p <= 7) + {} sampled rows (p = 11, 13), 0 violations, {} tight",
        ta.rows,
        tb.rows,
        ta.tight + tb.tight
    ))
}

fn criterion_1() -> Verdict {
    let config =
        CoeffConfig::from_json(r#"{"n_max": 5, "sum_max": 6}"#).map_err(|e| e.to_string())?;
    let (rows, _) = run_verify_coeff(&config, std::io::sink()).map_err(|e| e.to_string())?;
    let bad: Vec<_> = rows.iter().filter(|r| r.status != "agree").collect();
    ensure(bad.is_empty(), || {
        format!(
            "{} vectors without agreement, first {:?}",
            bad.len(),
            bad[0]
        )
    })?;
    let nonzero = rows
        .iter()
        .filter(|r| !r.certificate.closed_form.is_zero())
        .count();
    Ok(format!(
        "{} (n, k, q) vectors, closed form = oracle in all ({nonzero} nonzero)",
        rows.len()
    ))
}

fn criterion_2() -> Verdict {
    sweep_bound(
        BoundName::Thm12,
        "",
        r#""index""#,
        r#"{"min": 1, "max": "n"}"#,
        false,
    )
}

fn criterion_3() -> Verdict {
    let u = sweep_bound(
        BoundName::Thm11Unrestricted,
        r#""leading": "random","#,
        "1",
        r#"{"min": 1, "max": "n"}"#,
        false,
    )?;
    let r = sweep_bound(
        BoundName::Thm11Restricted,
        r#""leading": "random","#,
        r#""index""#,
        r#"{"min": "n", "max": "n+2"}"#,
        false,
    )?;
    Ok(format!("unrestricted: {u}; restricted (k = n..n+2): {r}"))
}

fn criterion_4() -> Verdict {
    let mut identities = 0;
    for m in 1..=20 {
        for n in 1..=m {
            for k in 1..=n {
                let closed = equal_size_sum_closed_form(m, n, k).map_err(|e| e.to_string())?;
                let direct = equal_size_sum_via_n0(m, n, k);
                ensure(closed == direct, || {
                    format!("m={m} n={n} k={k}: {direct} != {closed}")
                })?;
                identities += 1;
            }
        }
    }
    let s = sweep_bound(
        BoundName::Thm13,
        "",
        r#""index""#,
        r#"{"min": 1, "max": "n"}"#,
        true,
    )?;
    Ok(format!("{identities} equal-size identities exact; {s}"))
}

fn criterion_5() -> Verdict {
    let rows =
        example41_scan(Example41Scan { k_max: 4, q_max: 3 }, 0).map_err(|e| e.to_string())?;
    let bad: Vec<_> = rows
        .iter()
        .filter(|r| r.actual_cardinality != r.bound_value)
        .collect();
    ensure(bad.is_empty(), || {
        format!(
            "{} unequal profiles, first {}",
            bad.len(),
            bad[0].json_line()
        )
    })?;
    Ok(format!(
        "{} feasible profiles, model = formula in all",
        rows.len()
    ))
}

fn criterion_6() -> Verdict {
    let mut subsets = 0u64;
    let mut progressions = 0u64;
    for p in [2u64, 3, 5, 7, 11, 13] {
        let field = Field::prime(p).map_err(|e| e.to_string())?;
        let pf = field.characteristic();
        let form = IntForm::unit(2, 1);
        for bits in 0u32..1 << p {
            let a: Vec<i64> = (0..p as i64).filter(|x| bits >> x & 1 == 1).collect();
            if a.len() < 2 || a.len() > 6 {
                continue;
            }
            let bound = erdos_heilbronn(a.len(), pf).map_err(|e| e.to_string())?;
            // Direct count of {x + y : x != y}, independent of the enumerator.
            let direct: BTreeSet<i64> = a
                .iter()
                .flat_map(|&x| {
                    a.iter()
                        .filter(move |&&y| y != x)
                        .map(move |&y| (x + y).rem_euclid(p as i64))
                })
                .collect();
            let family = SetFamily::from_integers(field, &[a.clone(), a.clone()])
                .map_err(|e| e.to_string())?;
            let enumerated =
                restricted_value_set(&family, &form, u64::MAX).map_err(|e| e.to_string())?;
            ensure(enumerated.cardinality == direct.len(), || {
                format!("GF({p}) {a:?}: enumerator disagrees")
            })?;
            ensure(direct.len() as u64 >= bound, || {
                format!("GF({p}) {a:?}: {} < {bound}", direct.len())
            })?;
            subsets += 1;
        }
        for len in 2..=6.min(p as i64) {
            for start in 0..p as i64 {
                for d in 1..p as i64 {
                    let ap: Vec<i64> = (0..len)
                        .map(|i| (start + i * d).rem_euclid(p as i64))
                        .collect();
                    let direct: BTreeSet<i64> = ap
                        .iter()
                        .flat_map(|&x| {
                            ap.iter()
                                .filter(move |&&y| y != x)
                                .map(move |&y| (x + y).rem_euclid(p as i64))
                        })
                        .collect();
                    let bound = erdos_heilbronn(len as usize, pf).map_err(|e| e.to_string())?;
                    ensure(direct.len() as u64 == bound, || {
                        format!("GF({p}) AP {ap:?}: {} != {bound}", direct.len())
                    })?;
                    progressions += 1;
                }
            }
        }
    }
    Ok(format!(
        "{subsets} subsets satisfy the bound; {progressions} progressions attain it"
    ))
}

fn criterion_7() -> Verdict {
    let mut total = 0;
    for n in 0..=6 {
        let (checked, failures) = sign_multiplicativity(n);
        ensure(failures.is_empty(), || {
            format!(
                "n = {n}: {} failures, first {:?}",
                failures.len(),
                failures[0]
            )
        })?;
        total += checked;
    }
    Ok(format!(
        "{total} (permutation, invariant subset) pairs for n <= 6"
    ))
}

fn criterion_8() -> Verdict {
    let config = ReplayConfig::from_json(
        r#"{"sample": {"fields": ["gf(3)", "gf(5)", "gf(7)", "gf(11)", "gf(13)"], "n": {"min": 1, "max": 4},
            "count": 14, "max_size": 6}, "seed": 314159}"#,
    )
    .map_err(|e| e.to_string())?;
    let result = run_proof_replay(&config).map_err(|e| e.to_string())?;
    let records: Vec<_> = result.records().collect();
    ensure(records.len() == result.instances.len(), || {
        "some replays failed an internal check".into()
    })?;
    ensure(records.len() >= 50, || {
        format!("only {} instances", records.len())
    })?;
    let mut witnesses = 0;
    for r in &records {
        ensure((factorial(r.big_n - 1) % &r.h).is_zero(), || {
            format!("h = {} does not divide (N-1)!", r.h)
        })?;
        ensure(!r.he.is_zero(), || format!("h e = 0 for {:?}", r.sizes))?;
        let grid: u128 = r.shrunk_sizes.iter().map(|&s| s as u128).product();
        if grid <= 100_000 {
            let w = r
                .witness
                .as_ref()
                .ok_or_else(|| format!("no witness for feasible grid {:?}", r.shrunk_sizes))?;
            ensure(w.coefficient == r.he, || {
                "witness certificate coefficient differs from h e".into()
            })?;
            let distinct = w.point.iter().collect::<BTreeSet<_>>().len() == w.point.len();
            ensure(distinct, || {
                format!("witness {:?} repeats a coordinate", w.point)
            })?;
            witnesses += 1;
        }
    }
    let max_h = records
        .iter()
        .map(|r| r.h.clone())
        .max()
        .unwrap_or_else(BigInt::zero);
    Ok(format!(
        "{} replays: h | (N-1)! and h e != 0 in all (largest h = {max_h}); {witnesses} witnesses found",
        records.len()
    ))
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = dir.join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_powersum"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.code() == Some(0), || {
        format!(
            "{args:?} exited with {:?}: {}",
            status.status.code(),
            String::from_utf8_lossy(&status.stderr)
        )
    })?;
    fs::read(&out).map_err(|e| e.to_string())
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let write = |name: &str, text: &str| -> Result<String, String> {
        let path = dir.path().join(name);
        fs::write(&path, text).map_err(|e| e.to_string())?;
        Ok(path.to_string_lossy().into_owned())
    };
    let bounds = write(
        "bounds.json",
        r#"{"fields": ["gf(5)", "gf(7)"], "n": {"min": 2, "max": 3}, "bounds": ["thm12", "thm11r", "anr"],
            "leading": "random", "families": {"mode": "random", "per_cell": 40, "max_size": 5}, "seed": 11}"#,
    )?;
    let tight = write(
        "tight.json",
        r#"{"fields": ["gf(7)"], "n": {"min": 2, "max": 3}, "bounds": ["conj11", "dsh", "thm13"],
            "families": {"mode": "exhaustive", "max_size": 5, "same_set": true}, "example41": {"k_max": 3, "q_max": 3}}"#,
    )?;
    let coeff = write("coeff.json", r#"{"n_max": 3, "sum_max": 4}"#)?;
    let ex41 = write(
        "ex41.json",
        r#"{"profiles": [{"k": 2, "q": 2, "r": 1, "n": 2}, {"k": 3, "q": 1, "r": 2, "n": 5}]}"#,
    )?;
    let replay = write(
        "replay.json",
        r#"{"sample": {"fields": ["gf(5)", "gf(7)"], "n": {"min": 1, "max": 3}, "count": 4, "max_size": 5}}"#,
    )?;
    let commands: Vec<Vec<&str>> = vec![
        vec!["verify-bounds", "--config", &bounds, "--seed", "99"],
        vec!["tightness", "--config", &tight],
        vec!["verify-coeff", "--config", &coeff],
        vec!["example41", "--config", &ex41],
        vec!["proof-replay", "--config", &replay, "--seed", "5"],
    ];
    let mut bytes = 0;
    for args in &commands {
        let first = run_cli(dir.path(), args)?;
        let second = run_cli(dir.path(), args)?;
        ensure(first == second, || {
            format!("{} output differs between runs", args[0])
        })?;
        ensure(!first.is_empty(), || format!("{} wrote nothing", args[0]))?;
        bytes += first.len();
    }
    Ok(format!(
        "{} commands run twice, byte-identical reports ({bytes} bytes)",
        commands.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("closed-form coefficient = expansion oracle", criterion_1),
        ("restricted value sets >= min{p, sum q_i + 1}", criterion_2),
        ("unrestricted and k >= n restricted bounds", criterion_3),
        ("equal-size identity and equal-size bound", criterion_4),
        ("ex41 model = formula", criterion_5),
        ("Erdos-Heilbronn base case and progressions", criterion_6),
        ("sign multiplicativity on invariant subsets", criterion_7),
        ("proof replay certificates and witnesses", criterion_8),
        ("CLI determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
