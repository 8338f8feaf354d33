//! Null calibration of the spacing p-values.
//!
//! Under pure noise the pivot at each step should be Uniform(0,1). This study
//! replicates two-step paths, collects the first- and second-step p-values,
//! and summarizes each batch with a Kolmogorov-Smirnov distance against the
//! uniform law plus the sorted sample for QQ plotting.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiments::config::ExperimentConfig;
use crate::experiments::rng::gaussian_noise;
use crate::path::{lars_path, Termination};
use crate::selective::spacing_pivot;
use crate::stats::{ks_uniform, KsResult};

/// How many leading steps the study tests.
pub const CALIBRATION_STEPS: usize = 2;

/// P-values from one replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub replicate: u64,
    /// First-step pivot.
    pub t1: f64,
    /// Second-step pivot; absent when the path stopped after one step.
    pub t2: Option<f64>,
}

/// Uniformity summary for one step index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotBatch {
    /// 1-based step the pivots belong to.
    pub k: usize,
    pub ks: KsResult,
    /// The pivots in increasing order; plotting these against `(i - 0.5) / n`
    /// gives the QQ line.
    pub sorted: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSection {
    pub records: Vec<CalibrationRecord>,
    /// One batch per tested step, `k = 1..=CALIBRATION_STEPS`.
    pub batches: Vec<PivotBatch>,
}

enum Outcome {
    Record(CalibrationRecord),
    TieAbort(u64),
}

pub(crate) fn run(config: &ExperimentConfig) -> Result<(CalibrationSection, Vec<u64>)> {
    let sigma = config.sigma_levels[0];
    let outcomes = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| replicate(config, sigma, r))
        .collect::<Result<Vec<Outcome>>>()?;

    let mut records = Vec::with_capacity(outcomes.len());
    let mut ties = Vec::new();
    for outcome in outcomes {
        match outcome {
            Outcome::Record(rec) => records.push(rec),
            Outcome::TieAbort(r) => ties.push(r),
        }
    }

    let mut batches = Vec::with_capacity(CALIBRATION_STEPS);
    for k in 1..=CALIBRATION_STEPS {
        let mut sorted: Vec<f64> = records
            .iter()
            .filter_map(|rec| if k == 1 { Some(rec.t1) } else { rec.t2 })
            .collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("pivots are finite"));
        batches.push(PivotBatch { k, ks: ks_uniform(&sorted), sorted });
    }
    Ok((CalibrationSection { records, batches }, ties))
}

fn replicate(config: &ExperimentConfig, sigma: f64, r: u64) -> Result<Outcome> {
    let y = gaussian_noise(config.seed, r, config.n, sigma);
    let path = lars_path(&y, CALIBRATION_STEPS)?;
    if matches!(path.termination, Termination::TieDetected { .. }) {
        return Ok(Outcome::TieAbort(r));
    }
    let pivot = |k: usize| -> Result<f64> {
        let (upper, value, lower) = path.pivot_bounds(k)?;
        spacing_pivot(upper, value, lower, path.steps[k - 1].omega, sigma)
    };
    let t1 = pivot(1)?;
    let t2 = if path.steps.len() >= 2 { Some(pivot(2)?) } else { None };
    Ok(Outcome::Record(CalibrationRecord { replicate: r, t1, t2 }))
}
