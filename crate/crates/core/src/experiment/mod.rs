//! Experiment runners: bound sweeps, coefficient sweeps, multiplicity-example
//! (`ex41`) rows and proof replays, with CSV/JSON outputs and the exit-status
//! contract (0 all assertions hold, 2 a theorem assertion failed, 3 a
//! conjecture violation was observed).

use thiserror::Error;

use crate::bounds::BoundError;
use crate::coeff::CoeffError;
use crate::enumerate::EnumError;
use crate::field::FieldError;
use crate::polynomial::{ParseError, PolyError};

mod commands;
pub mod config;
mod report;
mod sweep;

pub use commands::{
    record_field, replay_instances, run_example41, run_proof_replay, run_verify_coeff, CoeffRow,
    PreparedReplay, ReplayEntry, ReplayOutcome, COEFF_CSV_HEADER,
};
pub use config::{
    CoeffConfig, Example41Config, Example41Profile, Example41Scan, FamilyShape, FamilySpec, KBound,
    Leading, MinSize, Range, ReplayConfig, ReplayInstance, ReplaySample, SweepConfig,
};
pub use report::{BoundTally, Outcome, ReportRow, ReportWriter, RowSink, Summary, CSV_HEADER};
pub use sweep::{evaluate_bound, example41_row, example41_scan, run_sweep, RowContext, RunOptions};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Enumerate(#[from] EnumError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
