//! `powersum`: sweeps and reports for the restricted value-set bounds.
//!
//! Every verb reads a JSON config (unknown keys are rejected), writes its
//! report to `--out` (stdout by default) and exits with 0 when every theorem
//! assertion holds, 2 when one fails, 3 when only a conjectural bound is
//! violated. Configuration and I/O errors exit with 1.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use powersum::experiment::{
    run_example41, run_proof_replay, run_sweep, run_verify_coeff, CoeffConfig, Example41Config,
    Example41Profile, Outcome, ReplayConfig, ReportWriter, RunOptions, Summary, SweepConfig,
};

#[derive(Parser)]
#[command(
    name = "powersum",
    version,
    about = "Verify value-set bounds for x1^k + ... + xn^k + g by enumeration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the enumeration guard (tuples per value set).
    #[arg(long)]
    guard_tuples: Option<u64>,
    /// Overrides the term cap of polynomial expansions.
    #[arg(long)]
    guard_terms: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Also write a JSON-lines mirror (with the sets of each family).
    #[arg(long)]
    jsonl: Option<PathBuf>,
    /// Record per-family wall-clock time in `elapsed_ms`.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct Example41Args {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    jsonl: Option<PathBuf>,
    #[arg(long, requires_all = ["q", "r", "n"], conflicts_with = "config")]
    k: Option<usize>,
    #[arg(long)]
    q: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compare enumerated value sets with the bounds of the config.
    VerifyBounds(SweepArgs),
    /// Compare the closed-form coefficient with the expanded product.
    VerifyCoeff(Common),
    /// Scan for tight families and conjecture violations.
    Tightness(SweepArgs),
    /// Multiplicity-example rows (`ex41`): the model against the formula.
    Example41(Example41Args),
    /// Replay the shrinking construction and write certificates as JSON.
    ProofReplay(Common),
}

fn read_config(common: &Common) -> Result<String> {
    let path = common.config.as_ref().context("--config is required")?;
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn jsonl_output(path: Option<&PathBuf>) -> Result<Option<BufWriter<File>>> {
    path.map(|p| {
        File::create(p)
            .map(BufWriter::new)
            .with_context(|| format!("creating {}", p.display()))
    })
    .transpose()
}

fn report_summary(summary: &Summary) {
    eprintln!("{} rows", summary.rows);
    for (bound, t) in &summary.by_bound {
        eprintln!(
            "  {bound:<14} rows {:>9}  hypotheses_ok {:>9}  tight {:>9}  violations {:>5}  guard_hits {:>5}",
            t.rows, t.hypotheses_ok, t.tight, t.violations, t.guard_hits
        );
    }
    for row in summary.theorem_violations.iter().take(20) {
        eprintln!("THEOREM VIOLATION: {}", row.json_line());
    }
    for row in summary.conjecture_violations.iter().take(20) {
        eprintln!("conjecture violation: {}", row.json_line());
    }
}

fn sweep(args: &SweepArgs) -> Result<Outcome> {
    let mut config = SweepConfig::from_json(&read_config(&args.common)?)?;
    if let Some(seed) = args.common.seed {
        config.seed = seed;
    }
    if let Some(guard) = args.common.guard_tuples {
        if guard == 0 {
            bail!("--guard-tuples must be positive");
        }
        config.guard_tuples = Some(guard);
    }
    let options = RunOptions {
        timing: args.timing,
        with_sets: args.jsonl.is_some(),
    };
    let mut writer = ReportWriter::new(
        output(args.common.out.as_deref())?,
        jsonl_output(args.jsonl.as_ref())?,
    )?;
    run_sweep(&config, options, &mut writer)?;
    let summary = writer.finish()?;
    report_summary(&summary);
    Ok(summary.outcome())
}

fn verify_coeff(common: &Common) -> Result<Outcome> {
    let mut config = CoeffConfig::from_json(&read_config(common)?)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(cap) = common.guard_terms {
        config.guard_terms = Some(cap);
    }
    let (rows, outcome) = run_verify_coeff(&config, output(common.out.as_deref())?)?;
    let count = |s: &str| rows.iter().filter(|r| r.status == s).count();
    eprintln!(
        "{} vectors: {} agree, {} mismatch, {} too large",
        rows.len(),
        count("agree"),
        count("mismatch"),
        count("too_large")
    );
    Ok(outcome)
}

fn example41(args: &Example41Args) -> Result<Outcome> {
    let config = match (args.k, args.q, args.r, args.n) {
        (Some(k), Some(q), Some(r), Some(n)) => Example41Config {
            profiles: vec![Example41Profile { k, q, r, n }],
            seed: args.common.seed.unwrap_or(0),
        },
        _ => {
            let mut c = Example41Config::from_json(&read_config(&args.common)?)?;
            if let Some(seed) = args.common.seed {
                c.seed = seed;
            }
            c
        }
    };
    let (rows, outcome) = run_example41(
        &config,
        output(args.common.out.as_deref())?,
        jsonl_output(args.jsonl.as_ref())?,
    )?;
    for row in rows {
        eprintln!(
            "k={} |A|={} n={}: multiplicity model {}, formula {}",
            row.k,
            row.sizes[0],
            row.n,
            row.actual_cardinality.unwrap_or_default(),
            row.bound_value.unwrap_or_default()
        );
    }
    Ok(outcome)
}

fn proof_replay(common: &Common) -> Result<Outcome> {
    let mut config = ReplayConfig::from_json(&read_config(common)?)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(guard) = common.guard_tuples {
        config.guard_tuples = Some(guard);
    }
    if let Some(cap) = common.guard_terms {
        config.guard_terms = Some(cap);
    }
    let result = run_proof_replay(&config)?;
    let mut out = output(common.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &result)?;
    writeln!(out)?;
    out.flush()?;
    let witnesses = result.records().filter(|r| r.witness.is_some()).count();
    eprintln!(
        "{} instances replayed, {} with a witness, {} failures",
        result.records().count(),
        witnesses,
        result.instances.len() - result.records().count()
    );
    Ok(result.outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::VerifyBounds(a) | Command::Tightness(a) => sweep(a),
        Command::VerifyCoeff(c) => verify_coeff(c),
        Command::Example41(a) => example41(a),
        Command::ProofReplay(c) => proof_replay(c),
    };
    match result {
        Ok(outcome) => ExitCode::from(outcome.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
