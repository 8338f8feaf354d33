//! Study configuration and the versioned report envelope.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bumped whenever the serialized report layout changes shape.
pub const REPORT_FORMAT_VERSION: u32 = 1;

/// Which study to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Spacing pivot versus the polyhedral reconstruction, step by step.
    Equivalence,
    /// Null uniformity of the first two pivots, KS-tested.
    Calibration,
    /// Rejection rates under a planted single jump over a (delta, sigma) grid.
    Power,
    /// Constraint growth per step and path runtime versus sample size.
    Complexity,
    /// The four-point worked example, end to end.
    Toy,
}

/// Knobs shared by every study; `defaults` fills in the standard settings
/// for each kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Samples per replicate (the largest grid point for complexity runs).
    pub n: usize,
    /// Monte-Carlo replicates (timing repetitions for complexity runs).
    pub replicates: usize,
    /// Master seed; replicate r draws from substream (seed, r).
    pub seed: u64,
    /// Noise standard deviations to sweep (power) or the single level used.
    pub sigma_levels: Vec<f64>,
    /// Jump magnitudes to sweep; ignored outside power runs.
    pub delta_levels: Vec<f64>,
    /// Nominal test level.
    pub alpha: f64,
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = Self {
            kind,
            n: 100,
            replicates: 1000,
            seed: 7,
            sigma_levels: vec![1.0],
            delta_levels: Vec::new(),
            alpha: 0.05,
        };
        match kind {
            ExperimentKind::Equivalence => base,
            ExperimentKind::Calibration => Self { replicates: 10_000, ..base },
            ExperimentKind::Power => Self {
                replicates: 2000,
                sigma_levels: vec![1.0, 1.5, 2.0],
                delta_levels: vec![0.0, 0.25, 0.5, 0.75, 1.0],
                ..base
            },
            ExperimentKind::Complexity => Self { n: 800, replicates: 3, ..base },
            ExperimentKind::Toy => Self { n: 4, replicates: 1, ..base },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::InvalidInput("replicates must be at least 1".into()));
        }
        if self.n < 2 {
            return Err(Error::InvalidInput(format!("n must be at least 2, got {}", self.n)));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidInput(format!("alpha must be in (0,1), got {}", self.alpha)));
        }
        if self.sigma_levels.is_empty() {
            return Err(Error::InvalidInput("at least one sigma level is required".into()));
        }
        for &s in &self.sigma_levels {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::InvalidSigma(format!("sigma levels must be positive, got {s}")));
            }
        }
        for &d in &self.delta_levels {
            if !(d >= 0.0) || !d.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "jump magnitudes must be nonnegative, got {d}"
                )));
            }
        }
        Ok(())
    }
}
