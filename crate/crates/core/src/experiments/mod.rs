//! Reproducible simulation studies.
//!
//! Each study is a pure function of its config; replicates draw noise from
//! per-replicate substreams of a seeded generator, so reports are identical
//! across runs and thread counts. Replicates whose paths end at a knot tie
//! are excluded from the estimates and listed in the report instead.

pub mod calibration;
pub mod complexity;
pub mod config;
pub mod equivalence;
pub mod power;
pub mod rng;
pub mod toy;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub use calibration::{CalibrationRecord, CalibrationSection, PivotBatch, CALIBRATION_STEPS};
pub use complexity::{ComplexitySection, CountRecord, TimingRecord};
pub use config::{ExperimentConfig, ExperimentKind, REPORT_FORMAT_VERSION};
pub use equivalence::{EquivalenceRecord, EquivalenceSection};
pub use power::{step_mean, PowerCell, PowerRecord, PowerSection};
pub use rng::{gaussian_noise, replicate_rng};
pub use toy::{ToySection, TOY_VALUES};

/// Output envelope shared by every study; exactly one section is populated,
/// matching `config.kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    /// Schema version of this report.
    pub format_version: u32,
    /// Configuration the study ran with.
    pub config: ExperimentConfig,
    /// Replicate stream indices excluded because the path ended at a tie.
    pub tie_aborts: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equivalence: Option<EquivalenceSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power: Option<PowerSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complexity: Option<ComplexitySection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toy: Option<ToySection>,
}

/// Run the study selected by `config.kind`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut report = ExperimentReport {
        format_version: REPORT_FORMAT_VERSION,
        config: config.clone(),
        tie_aborts: Vec::new(),
        equivalence: None,
        calibration: None,
        power: None,
        complexity: None,
        toy: None,
    };
    match config.kind {
        ExperimentKind::Equivalence => {
            let (section, ties) = equivalence::run(config)?;
            report.equivalence = Some(section);
            report.tie_aborts = ties;
        }
        ExperimentKind::Calibration => {
            let (section, ties) = calibration::run(config)?;
            report.calibration = Some(section);
            report.tie_aborts = ties;
        }
        ExperimentKind::Power => {
            let (section, ties) = power::run(config)?;
            report.power = Some(section);
            report.tie_aborts = ties;
        }
        ExperimentKind::Complexity => {
            let (section, ties) = complexity::run(config)?;
            report.complexity = Some(section);
            report.tie_aborts = ties;
        }
        ExperimentKind::Toy => {
            let (section, ties) = toy::run(config)?;
            report.toy = Some(section);
            report.tie_aborts = ties;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatch_fills_the_matching_section() {
        let mut config = ExperimentConfig::defaults(ExperimentKind::Toy);
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.format_version, REPORT_FORMAT_VERSION);
        assert!(report.toy.is_some());
        assert!(report.equivalence.is_none() && report.power.is_none());

        config = ExperimentConfig::defaults(ExperimentKind::Power);
        config.n = 20;
        config.replicates = 5;
        config.delta_levels = vec![0.0];
        config.sigma_levels = vec![1.0];
        let report = run_experiment(&config).unwrap();
        assert!(report.power.is_some());
        assert!(report.toy.is_none());
    }

    #[test]
    fn reports_round_trip_through_json() {
        let config = ExperimentConfig::defaults(ExperimentKind::Toy);
        let report = run_experiment(&config).unwrap();
        let text = serde_json::to_string_pretty(&report).unwrap();
        let back: ExperimentReport = serde_json::from_str(&text).unwrap();
        assert_eq!(report, back);
    }

    #[test]
    fn invalid_configs_are_refused() {
        let mut config = ExperimentConfig::defaults(ExperimentKind::Calibration);
        config.replicates = 0;
        assert!(run_experiment(&config).is_err());
    }
}
