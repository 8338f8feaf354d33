use fused_spacing::{
    estimate_sigma_mad, infer_path, lars_path, Signal, SigmaSource,
};

use crate::report::{FitReport, KnotRow, TestReport, TestRow, CLI_FORMAT_VERSION};
use crate::{CliError, Result};

/// Step budget used when the caller does not pass `--max-steps`.
pub fn default_max_steps(n: usize) -> usize {
    n.saturating_sub(1).min(50)
}

/// Options shared by the `test` command and the library pipeline.
#[derive(Debug, Clone, Copy)]
pub struct TestOptions {
    /// Noise standard deviation; estimated from the data when absent.
    pub sigma: Option<f64>,
    /// Level for both the p-value cutoff convention and the (1 - alpha)
    /// confidence intervals.
    pub alpha: f64,
    pub max_steps: Option<usize>,
    /// Report `2 * min(T, 1 - T)` as the headline p-value.
    pub two_sided: bool,
}

impl Default for TestOptions {
    fn default() -> Self {
        Self { sigma: None, alpha: 0.05, max_steps: None, two_sided: false }
    }
}

fn validate_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && 0.0 < alpha && alpha < 1.0) {
        return Err(CliError::Config(format!(
            "--alpha must be strictly between 0 and 1, got {alpha}"
        )));
    }
    Ok(())
}

/// Compute the solution path for `values` and package it as a report.
pub fn fit_report(values: &[f64], max_steps: Option<usize>) -> Result<FitReport> {
    let signal = Signal::new(values.to_vec())?;
    let budget = max_steps.unwrap_or_else(|| default_max_steps(signal.len()));
    if budget == 0 {
        return Err(CliError::Config("--max-steps must be at least 1".into()));
    }
    let path = lars_path(signal.values(), budget)?;
    let steps = path
        .steps
        .iter()
        .map(|s| KnotRow {
            k: s.k,
            lambda: s.lambda,
            cut: s.cut,
            pair: [s.cut - 1, s.cut],
            sign: s.sign,
            omega: s.omega,
        })
        .collect::<Vec<_>>();
    Ok(FitReport {
        format_version: CLI_FORMAT_VERSION,
        command: "fit",
        n: signal.len(),
        max_steps: budget,
        termination: path.termination,
        trailing_lambda: path.trailing_lambda,
        no_changepoints: steps.is_empty(),
        steps,
    })
}

/// Resolve the noise scale: the explicit value wins, otherwise estimate it
/// from first differences.
pub fn resolve_sigma(values: &[f64], explicit: Option<f64>) -> Result<(f64, SigmaSource)> {
    match explicit {
        Some(s) => {
            if !(s.is_finite() && s > 0.0) {
                return Err(CliError::Config(format!(
                    "--sigma must be a positive finite number, got {s}"
                )));
            }
            Ok((s, SigmaSource::Known))
        }
        None => {
            let s = estimate_sigma_mad(values).map_err(|e| {
                CliError::Config(format!(
                    "{e}; pass --sigma to supply the noise scale explicitly"
                ))
            })?;
            Ok((s, SigmaSource::Estimated))
        }
    }
}

/// Run the full pipeline: fit the path, then test every recorded step and
/// attach (1 - alpha) selective confidence intervals.
pub fn test_report(values: &[f64], opts: &TestOptions) -> Result<TestReport> {
    validate_alpha(opts.alpha)?;
    let (sigma, source) = resolve_sigma(values, opts.sigma)?;
    let signal = Signal::with_sigma(values.to_vec(), sigma, source)?;
    let budget = opts.max_steps.unwrap_or_else(|| default_max_steps(signal.len()));
    if budget == 0 {
        return Err(CliError::Config("--max-steps must be at least 1".into()));
    }
    let path = lars_path(signal.values(), budget)?;
    let inferences = infer_path(&signal, &path, Some(opts.alpha))?;
    let steps = inferences
        .iter()
        .map(|s| {
            let two_sided = 2.0 * s.p_value.min(1.0 - s.p_value);
            let (lo, hi) = s.jump_interval.expect("intervals requested");
            TestRow {
                k: s.k,
                lambda_prev: s.upper_knot,
                lambda: s.lambda,
                lambda_next: s.lower_knot,
                cut: s.cut,
                pair: [s.cut - 1, s.cut],
                sign: s.sign,
                omega: s.omega,
                p_value: if opts.two_sided { two_sided } else { s.p_value },
                p_one_sided: s.p_value,
                jump_estimate: s.jump_estimate,
                ci_lower: lo,
                ci_upper: hi,
            }
        })
        .collect::<Vec<_>>();
    Ok(TestReport {
        format_version: CLI_FORMAT_VERSION,
        command: "test",
        n: signal.len(),
        alpha: opts.alpha,
        sigma,
        sigma_source: source,
        p_value_kind: if opts.two_sided { "two_sided" } else { "one_sided" },
        max_steps: budget,
        termination: path.termination,
        trailing_lambda: path.trailing_lambda,
        no_changepoints: steps.is_empty(),
        steps,
    })
}
