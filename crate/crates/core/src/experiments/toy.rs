//! Worked example on a four-sample signal.
//!
//! The series (2, 2, 0, 0) has one clean level drop. The study records the
//! full candidate enumeration at each state of the recursion, the prefix-sum
//! envelope before and after the split, the first-step p-value, and an
//! independent certification of the knot set from the exact-solver scan. The
//! enumeration makes the bookkeeping auditable by hand: three candidate cuts
//! before the first step, none after it, so the path ends after one knot and
//! the trailing penalty is zero.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiments::config::ExperimentConfig;
use crate::oracle::scan::{knot_scan, KnotEvent};
use crate::path::solver::{lars_path, natural_candidate, segment_cut_stats, FusedPath};
use crate::path::{PathStep, Termination};
use crate::selective::spacing_pivot;

/// The worked-example observations.
pub const TOY_VALUES: [f64; 4] = [2.0, 2.0, 0.0, 0.0];

/// Grid resolution for the certifying scan.
const SCAN_GRID: usize = 4096;

/// One prospective (or taken) crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateRow {
    /// Boundary position of the cut.
    pub cut: usize,
    /// Side of the envelope the dual would leave through.
    pub sign: i8,
    /// Penalty at which the crossing would happen.
    pub lambda: f64,
}

/// The recursion's state before taking step `step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationRow {
    /// 1-based step about to be taken; the final row has no step left.
    pub step: usize,
    /// Active cuts with their jump signs entering this state.
    pub active: Vec<(usize, i8)>,
    /// Every crossing candidate over the current segments, by cut position.
    pub candidates: Vec<CandidateRow>,
    /// The candidate actually taken, absent in the terminal state.
    pub chosen: Option<CandidateRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToySection {
    pub values: Vec<f64>,
    pub steps: Vec<PathStep>,
    pub termination: Termination,
    pub trailing_lambda: f64,
    /// One row per state, from the empty active set to the terminal state.
    pub enumeration: Vec<EnumerationRow>,
    /// Prefix-sum envelope entering each state, same indexing as
    /// `enumeration`.
    pub envelopes: Vec<Vec<f64>>,
    /// Spacing p-value of the first step at the configured noise level.
    pub first_step_pivot: f64,
    /// Knots found by the independent exact-solver scan.
    pub oracle_events: Vec<KnotEvent>,
    /// True when the scan reproduces exactly the recorded knots and cuts,
    /// which also certifies that no further knot exists above zero.
    pub oracle_agrees: bool,
}

pub(crate) fn run(config: &ExperimentConfig) -> Result<(ToySection, Vec<u64>)> {
    let values = TOY_VALUES.to_vec();
    let sigma = config.sigma_levels[0];
    let path = lars_path(&values, values.len() - 1)?;

    let mut enumeration = Vec::with_capacity(path.steps.len() + 1);
    let mut envelopes = Vec::with_capacity(path.steps.len() + 1);
    for state in 1..=path.steps.len() + 1 {
        enumeration.push(enumeration_row(&values, &path, state)?);
        envelopes.push(path.cusum_envelope(&values, state)?);
    }

    let (upper, value, lower) = path.pivot_bounds(1)?;
    let first_step_pivot = spacing_pivot(upper, value, lower, path.steps[0].omega, sigma)?;

    let oracle_events = knot_scan(&values, SCAN_GRID)?;
    let oracle_agrees = oracle_events.len() == path.steps.len()
        && oracle_events.iter().zip(&path.steps).all(|(event, step)| {
            event.cuts == vec![step.cut]
                && (event.lambda - step.lambda).abs() <= 1e-6 * step.lambda.max(1.0)
        });

    let section = ToySection {
        values,
        steps: path.steps.clone(),
        termination: path.termination,
        trailing_lambda: path.trailing_lambda,
        enumeration,
        envelopes,
        first_step_pivot,
        oracle_events,
        oracle_agrees,
    };
    Ok((section, Vec::new()))
}

/// Candidate enumeration at the state entering step `state` (after
/// `state - 1` splits).
fn enumeration_row(values: &[f64], path: &FusedPath, state: usize) -> Result<EnumerationRow> {
    let active = path.active_at(state - 1)?;
    let mut candidates = Vec::new();
    for seg in path.segments_at(state - 1)? {
        segment_cut_stats(values, seg, |cut, cusum, interp| {
            if let Some(c) = natural_candidate(cut, cusum, interp) {
                candidates.push(CandidateRow { cut: c.cut, sign: c.sign, lambda: c.lambda });
            }
        });
    }
    let chosen = path
        .steps
        .get(state - 1)
        .map(|s| CandidateRow { cut: s.cut, sign: s.sign, lambda: s.lambda });
    Ok(EnumerationRow { step: state, active, candidates, chosen })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::config::ExperimentKind;
    use approx::assert_relative_eq;

    #[test]
    fn walkthrough_matches_hand_calculation() {
        let config = ExperimentConfig::defaults(ExperimentKind::Toy);
        let (toy, ties) = run(&config).unwrap();
        assert!(ties.is_empty());

        // one knot: level drop of 2 at the middle boundary, full scale
        assert_eq!(toy.steps.len(), 1);
        let step = &toy.steps[0];
        assert_relative_eq!(step.lambda, 2.0, max_relative = 1e-14);
        assert_eq!((step.cut, step.sign), (2, -1));
        assert_relative_eq!(step.omega, 1.0, max_relative = 1e-14);
        assert!(matches!(toy.termination, Termination::ResidualExhausted));
        assert_eq!(toy.trailing_lambda, 0.0);

        // state 1: no active cuts, all three cuts are candidates on the
        // negative side, with the middle one winning at twice the others
        assert_eq!(toy.enumeration.len(), 2);
        let first = &toy.enumeration[0];
        assert!(first.active.is_empty());
        let listed: Vec<(usize, i8, f64)> =
            first.candidates.iter().map(|c| (c.cut, c.sign, c.lambda)).collect();
        assert_eq!(listed, vec![(1, -1, 1.0), (2, -1, 2.0), (3, -1, 1.0)]);
        let chosen = first.chosen.unwrap();
        assert_eq!((chosen.cut, chosen.sign), (2, -1));

        // state 2: the split fits both halves exactly, nothing is left
        let second = &toy.enumeration[1];
        assert_eq!(second.active, vec![(2, -1)]);
        assert!(second.candidates.is_empty());
        assert!(second.chosen.is_none());

        // envelope (1, 2, 1) collapses to zero after the split
        assert_eq!(toy.envelopes[0].len(), 3);
        assert_relative_eq!(toy.envelopes[0][0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(toy.envelopes[0][1], 2.0, max_relative = 1e-14);
        assert_relative_eq!(toy.envelopes[0][2], 1.0, max_relative = 1e-14);
        assert!(toy.envelopes[1].iter().all(|c| c.abs() < 1e-12));

        // independent scan certifies the single knot (and hence no second
        // knot above zero)
        assert!(toy.oracle_agrees, "events: {:?}", toy.oracle_events);
        assert_eq!(toy.oracle_events.len(), 1);

        // statistic 2 at unit scale over (0, inf)
        let expect = crate::stats::normal_sf(2.0) / 0.5;
        assert_relative_eq!(toy.first_step_pivot, expect, max_relative = 1e-10);
    }
}
