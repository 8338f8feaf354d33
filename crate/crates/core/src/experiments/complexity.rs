//! Cost growth of the solver and the reconstruction.
//!
//! Two measurements over a doubling grid of sample sizes:
//! * the number of constraint rows that actually pin each step's truncation,
//!   which should grow linearly in the step index (the full row count per
//!   step stays order n, and only a bounded number ever bind), and
//! * the wall-clock time of a full path solve, whose log-log slope against n
//!   is near one for noise input.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::config::ExperimentConfig;
use crate::experiments::rng::gaussian_noise;
use crate::path::{lars_path, FusedPath, Termination};
use crate::selective::polyhedron::POLYHEDRON_MAX_N;
use crate::selective::HitLeaveSession;

/// Binding-row growth for one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub n: usize,
    /// Steps the replicate path recorded.
    pub steps: usize,
    /// Rows pinning the truncation at step k, indexed by k - 1.
    pub reduced_rows: Vec<usize>,
    /// Least-squares slope of `reduced_rows` against the step index.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Largest raw row count of any step's full system.
    pub max_total_rows: usize,
}

/// Wall-clock measurement for one sample size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub n: usize,
    /// Path solves batched into each timed run.
    pub solves_per_run: usize,
    /// Raw run durations in seconds.
    pub run_seconds: Vec<f64>,
    /// Median run duration divided by the batch size.
    pub median_seconds_per_solve: f64,
    /// Steps of the solved path (the full path on noise).
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexitySection {
    /// Constraint growth, for sizes within the dense reconstruction cap.
    pub counts: Vec<CountRecord>,
    pub timings: Vec<TimingRecord>,
    /// Log-log least-squares slope of solve time against n.
    pub runtime_slope: f64,
}

pub(crate) fn run(config: &ExperimentConfig) -> Result<(ComplexitySection, Vec<u64>)> {
    let sizes = doubling_grid(config.n);
    let mut ties = Vec::new();
    let mut counts = Vec::new();
    let mut timings = Vec::new();

    for (si, &n) in sizes.iter().enumerate() {
        if n <= POLYHEDRON_MAX_N {
            let (y, path) = noise_path(config, n, (si as u64) << 32, &mut ties)?;
            counts.push(count_record(&y, &path)?);
        }
        let (y, path) = noise_path(config, n, ((si as u64) << 32) | 1 << 16, &mut ties)?;
        timings.push(time_record(&y, &path, config.replicates)?);
    }

    let xs: Vec<f64> = timings.iter().map(|t| (t.n as f64).ln()).collect();
    let ys: Vec<f64> = timings.iter().map(|t| t.median_seconds_per_solve.ln()).collect();
    let (runtime_slope, _, _) = linear_fit(&xs, &ys);
    Ok((ComplexitySection { counts, timings, runtime_slope }, ties))
}

/// Sample sizes from about 50 up to `top`, doubling.
fn doubling_grid(top: usize) -> Vec<usize> {
    let mut sizes = vec![top];
    while *sizes.last().expect("nonempty") / 2 >= 32 {
        let half = sizes.last().unwrap() / 2;
        sizes.push(half);
    }
    sizes.reverse();
    sizes
}

/// Noise draw whose path does not end in a tie; tied streams are recorded and
/// skipped.
fn noise_path(
    config: &ExperimentConfig,
    n: usize,
    base_stream: u64,
    ties: &mut Vec<u64>,
) -> Result<(Vec<f64>, FusedPath)> {
    let sigma = config.sigma_levels[0];
    for attempt in 0..16 {
        let stream = base_stream + attempt;
        let y = gaussian_noise(config.seed, stream, n, sigma);
        let path = lars_path(&y, n - 1)?;
        if matches!(path.termination, Termination::TieDetected { .. }) {
            ties.push(stream);
            continue;
        }
        return Ok((y, path));
    }
    Err(Error::Internal(format!("16 consecutive tied noise draws at n = {n}")))
}

fn count_record(y: &[f64], path: &FusedPath) -> Result<CountRecord> {
    let mut reduced_rows = Vec::with_capacity(path.steps.len());
    let mut max_total_rows = 0usize;
    let mut session = HitLeaveSession::new(y, path)?;
    while let Some(sys) = session.advance() {
        let sys = sys?;
        reduced_rows.push(sys.reduced_len);
        max_total_rows = max_total_rows.max(sys.rows.len());
    }
    let xs: Vec<f64> = (1..=reduced_rows.len()).map(|k| k as f64).collect();
    let ys: Vec<f64> = reduced_rows.iter().map(|&c| c as f64).collect();
    let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
    Ok(CountRecord {
        n: path.n,
        steps: path.steps.len(),
        reduced_rows,
        slope,
        intercept,
        r_squared,
        max_total_rows,
    })
}

fn time_record(y: &[f64], path: &FusedPath, runs: usize) -> Result<TimingRecord> {
    let n = y.len();
    let solves_per_run = (16384 / n).max(1);
    let mut run_seconds = Vec::with_capacity(runs);
    for _ in 0..runs {
        let started = Instant::now();
        for _ in 0..solves_per_run {
            let solved = lars_path(y, n - 1)?;
            assert_eq!(solved.steps.len(), path.steps.len());
        }
        run_seconds.push(started.elapsed().as_secs_f64());
    }
    let mut sorted = run_seconds.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("durations are finite"));
    let median = sorted[sorted.len() / 2];
    Ok(TimingRecord {
        n,
        solves_per_run,
        run_seconds,
        median_seconds_per_solve: median / solves_per_run as f64,
        steps: path.steps.len(),
    })
}

/// Ordinary least squares of `ys` on `xs`: (slope, intercept, R^2).
pub(crate) fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    assert!(xs.len() == ys.len() && xs.len() >= 2, "need at least two points");
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r_squared)
}
