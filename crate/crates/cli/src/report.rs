use fused_spacing::{SigmaSource, Termination};
use serde::Serialize;

use crate::{CliError, Result};

/// Version stamp carried by every JSON report this binary emits.
pub const CLI_FORMAT_VERSION: u32 = 1;

/// One detected changepoint without inference attached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KnotRow {
    /// 1-based step number along the path.
    pub k: usize,
    /// Knot value at which the cut activated.
    pub lambda: f64,
    /// Number of samples left of the change; the jump sits between sample
    /// `cut - 1` and sample `cut`.
    pub cut: usize,
    /// The same boundary as the 0-based pair of flanking sample indices.
    pub pair: [usize; 2],
    /// Direction of the level change, +1 upward.
    pub sign: i8,
    /// Contrast scale of the step.
    pub omega: f64,
}

/// Output of the `fit` command: the solution path alone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    pub format_version: u32,
    pub command: &'static str,
    pub n: usize,
    pub max_steps: usize,
    pub termination: Termination,
    pub trailing_lambda: f64,
    pub no_changepoints: bool,
    pub steps: Vec<KnotRow>,
}

/// One tested changepoint in a `test` report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestRow {
    pub k: usize,
    /// Knot above this one; infinite for the first step.
    pub lambda_prev: f64,
    pub lambda: f64,
    /// Knot below this one; the trailing value for the last step.
    pub lambda_next: f64,
    pub cut: usize,
    pub pair: [usize; 2],
    pub sign: i8,
    pub omega: f64,
    /// The p-value the run was asked for: one-sided by default, doubled and
    /// folded when `--two-sided` is set.
    pub p_value: f64,
    /// The one-sided spacing pivot, always reported for reference.
    pub p_one_sided: f64,
    /// Fitted level change across the cut.
    pub jump_estimate: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

/// Output of the `test` command: the path plus per-step selective inference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub format_version: u32,
    pub command: &'static str,
    pub n: usize,
    pub alpha: f64,
    pub sigma: f64,
    pub sigma_source: SigmaSource,
    /// `"one_sided"` or `"two_sided"`: which p-value fills `p_value`.
    pub p_value_kind: &'static str,
    pub max_steps: usize,
    pub termination: Termination,
    pub trailing_lambda: f64,
    pub no_changepoints: bool,
    pub steps: Vec<TestRow>,
}

pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Io(format!("serializing report: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn csv_error(e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("writing CSV: {e}"))
}

/// Fixed column order: `k,lambda,cut,left,right,sign,omega`.
pub fn fit_csv(report: &FitReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "lambda", "cut", "left", "right", "sign", "omega"])
        .map_err(csv_error)?;
    for s in &report.steps {
        w.serialize((s.k, s.lambda, s.cut, s.pair[0], s.pair[1], s.sign, s.omega))
            .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}

/// Fixed column order: `k,lambda_prev,lambda,lambda_next,cut,left,right,sign,
/// omega,p_value,p_one_sided,jump_estimate,ci_lower,ci_upper`.
pub fn test_csv(report: &TestReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "k",
        "lambda_prev",
        "lambda",
        "lambda_next",
        "cut",
        "left",
        "right",
        "sign",
        "omega",
        "p_value",
        "p_one_sided",
        "jump_estimate",
        "ci_lower",
        "ci_upper",
    ])
    .map_err(csv_error)?;
    for s in &report.steps {
        w.serialize((
            s.k,
            s.lambda_prev,
            s.lambda,
            s.lambda_next,
            s.cut,
            s.pair[0],
            s.pair[1],
            s.sign,
            s.omega,
            s.p_value,
            s.p_one_sided,
            s.jump_estimate,
            s.ci_lower,
            s.ci_upper,
        ))
        .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(csv_error)?;
    String::from_utf8(bytes).map_err(csv_error)
}
