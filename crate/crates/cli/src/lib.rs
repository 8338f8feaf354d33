//! Library half of the `fused-spacing` binary: CSV ingestion, the fit/test
//! pipeline, report serialization, and the oracle cross-check battery. The
//! binary itself only parses arguments and dispatches here, so everything is
//! exercisable from integration tests.

pub mod ingest;
pub mod pipeline;
pub mod report;
pub mod verify;

use thiserror::Error;

/// CLI-side error type. Display strings start with a stable `E-*` code, in
/// the same convention as the core library, so scripts can match on them.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("E-IO: {0}")]
    Io(String),

    #[error("E-CSV: {0}")]
    Csv(String),

    #[error("E-CONFIG: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] fused_spacing::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub use ingest::{ingest_csv, write_values_csv, Ingested, NaPolicy};
pub use pipeline::{default_max_steps, fit_report, resolve_sigma, test_report, TestOptions};
pub use report::{fit_csv, test_csv, to_json, FitReport, KnotRow, TestReport, TestRow, CLI_FORMAT_VERSION};
pub use verify::{run_checks, CheckOutcome};
