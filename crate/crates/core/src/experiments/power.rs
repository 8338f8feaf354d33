//! Detection power of the first-step spacing test over a grid of jump sizes
//! and noise levels.
//!
//! The mean is a single step: zero on the first half of the samples, `delta`
//! on the second. Each replicate tests the first detected changepoint at the
//! configured level; a cell's power is the rejection fraction. The `delta = 0`
//! column doubles as a size check.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiments::config::ExperimentConfig;
use crate::experiments::rng::gaussian_noise;
use crate::path::{lars_path, Termination};
use crate::selective::spacing_pivot;

/// One replicate of one grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerRecord {
    /// Replicate stream index (unique across the whole grid).
    pub replicate: u64,
    pub delta: f64,
    pub sigma: f64,
    /// First-step spacing p-value.
    pub t1: f64,
    /// Cut the first step picked.
    pub cut: usize,
}

/// Aggregated rejection rate for one (delta, sigma) cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerCell {
    pub delta: f64,
    pub sigma: f64,
    /// Replicates entering the estimate.
    pub used: usize,
    pub rejections: usize,
    /// Rejection fraction at the configured level.
    pub power: f64,
    /// Binomial standard error of `power`.
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerSection {
    /// Test level the rejections are counted at.
    pub alpha: f64,
    pub records: Vec<PowerRecord>,
    /// One cell per (delta, sigma) pair, sigma-major order.
    pub cells: Vec<PowerCell>,
}

enum Outcome {
    Record(PowerRecord),
    TieAbort(u64),
}

pub(crate) fn run(config: &ExperimentConfig) -> Result<(PowerSection, Vec<u64>)> {
    let reps = config.replicates as u64;
    let mut cells = Vec::new();
    let mut records = Vec::new();
    let mut ties = Vec::new();

    for (si, &sigma) in config.sigma_levels.iter().enumerate() {
        for (di, &delta) in config.delta_levels.iter().enumerate() {
            let cell_index = (si * config.delta_levels.len() + di) as u64;
            let outcomes = (0..reps)
                .into_par_iter()
                .map(|r| replicate(config, delta, sigma, cell_index * reps + r))
                .collect::<Result<Vec<Outcome>>>()?;

            let mut used = 0usize;
            let mut rejections = 0usize;
            for outcome in outcomes {
                match outcome {
                    Outcome::Record(rec) => {
                        used += 1;
                        if rec.t1 < config.alpha {
                            rejections += 1;
                        }
                        records.push(rec);
                    }
                    Outcome::TieAbort(r) => ties.push(r),
                }
            }
            let power = if used == 0 { 0.0 } else { rejections as f64 / used as f64 };
            let standard_error =
                if used == 0 { 0.0 } else { (power * (1.0 - power) / used as f64).sqrt() };
            cells.push(PowerCell { delta, sigma, used, rejections, power, standard_error });
        }
    }
    Ok((PowerSection { alpha: config.alpha, records, cells }, ties))
}

/// Mean vector with one step of height `delta` at the midpoint boundary.
pub fn step_mean(n: usize, delta: f64) -> Vec<f64> {
    (0..n).map(|i| if i < n / 2 { 0.0 } else { delta }).collect()
}

fn replicate(config: &ExperimentConfig, delta: f64, sigma: f64, stream: u64) -> Result<Outcome> {
    let mut y = gaussian_noise(config.seed, stream, config.n, sigma);
    for (v, m) in y.iter_mut().zip(step_mean(config.n, delta)) {
        *v += m;
    }
    let path = lars_path(&y, 1)?;
    if matches!(path.termination, Termination::TieDetected { .. }) {
        return Ok(Outcome::TieAbort(stream));
    }
    let step = &path.steps[0];
    let (upper, value, lower) = path.pivot_bounds(1)?;
    let t1 = spacing_pivot(upper, value, lower, step.omega, sigma)?;
    Ok(Outcome::Record(PowerRecord { replicate: stream, delta, sigma, t1, cut: step.cut }))
}
