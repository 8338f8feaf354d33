//! Solution-path solver for the 1D fused lasso.
//!
//! The fused-lasso fit is piecewise linear in the penalty. Jumps activate one
//! at a time as the penalty decreases, at knot values that this solver finds
//! by a LARS-style recursion on segment statistics.
//!
//! Between knots, the dual coordinate of an inactive cut `c` inside a segment
//! `[a, b)` with boundary signs `(sa, sb)` moves as `-C(c) + lambda * L(c)`,
//! where `C(c)` is the within-segment cusum and `L(c)` linearly interpolates
//! the boundary signs (zero at the series ends). The cut meets the shrinking
//! envelope `|.| = lambda` at
//!
//! ```text
//! lambda(c) = |C(c)| / (1 - s(c) L(c)),    s(c) = -sign(C(c)),
//! ```
//!
//! and the next knot is the largest crossing over all inactive cuts. Only the
//! segment split by the winner needs rescanning, so a path of `K` steps costs
//! `O(n K)` after the initial scan.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::cusum::{cusum, segment_residual};
use crate::stats::compensated_sum;

/// Relative tolerance under which two competing knot values count as tied.
pub const TIE_TOLERANCE: f64 = 1e-9;
/// Relative residual-exhaustion threshold, scaled by `n * max|centered y|`.
pub const ZERO_TOLERANCE: f64 = 1e-12;
/// Crossing denominators at or below this are treated as non-crossing.
const DEGENERATE_DENOM: f64 = 1e-12;

/// One segment of the current partition, with dual boundary signs.
/// `a..b` is half-open in sample positions; `sa`/`sb` are the signs at the
/// bounding active cuts (0 at positions 0 and n, which never activate).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SegmentState {
    pub a: usize,
    pub b: usize,
    pub sa: i8,
    pub sb: i8,
}

/// A prospective knot: cut `cut` would activate at `lambda` with jump sign
/// `sign`; `denominator` is `1 - sign * L(cut)` and `cusum` the segment cusum
/// at the cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Candidate {
    pub cut: usize,
    pub lambda: f64,
    pub sign: i8,
    pub denominator: f64,
    pub cusum: f64,
}

/// Visit `(cut, C(cut), L(cut))` for every interior cut of `seg`, in
/// increasing cut order. The cusum is accumulated with compensated summation;
/// replaying the same segment state always reproduces identical bits, which
/// the polyhedral reconstruction relies on.
pub(crate) fn segment_cut_stats(
    values: &[f64],
    seg: SegmentState,
    mut visit: impl FnMut(usize, f64, f64),
) {
    let len = seg.b - seg.a;
    if len < 2 {
        return;
    }
    let mean = compensated_sum(values[seg.a..seg.b].iter().copied()) / len as f64;
    let sa = f64::from(seg.sa);
    let slope = (f64::from(seg.sb) - sa) / len as f64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for cut in seg.a + 1..seg.b {
        let v = values[cut - 1] - mean;
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        let cusum = sum + comp;
        let interp = sa + (cut - seg.a) as f64 * slope;
        visit(cut, cusum, interp);
    }
}

/// Crossing candidate for a cut on its natural side `s = -sign(C)`.
/// Returns `None` when the cusum is exactly zero (the cut only crosses at
/// zero penalty) or the denominator is degenerate (the dual runs parallel to
/// the envelope and never crosses).
pub(crate) fn natural_candidate(cut: usize, cusum: f64, interp: f64) -> Option<Candidate> {
    if cusum == 0.0 {
        return None;
    }
    let sign: i8 = if cusum > 0.0 { -1 } else { 1 };
    let denominator = 1.0 - f64::from(sign) * interp;
    if denominator <= DEGENERATE_DENOM {
        return None;
    }
    Some(Candidate {
        cut,
        lambda: cusum.abs() / denominator,
        sign,
        denominator,
        cusum,
    })
}

/// Best and runner-up crossing inside one segment.
fn scan_segment(values: &[f64], seg: SegmentState) -> (Option<Candidate>, Option<Candidate>) {
    let mut best: Option<Candidate> = None;
    let mut second: Option<Candidate> = None;
    segment_cut_stats(values, seg, |cut, cusum, interp| {
        if let Some(cand) = natural_candidate(cut, cusum, interp) {
            match best {
                Some(b) if cand.lambda <= b.lambda => match second {
                    Some(s) if cand.lambda <= s.lambda => {}
                    _ => second = Some(cand),
                },
                _ => {
                    second = best;
                    best = Some(cand);
                }
            }
        }
    });
    (best, second)
}

/// One knot of the solution path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    /// 1-based step number.
    pub k: usize,
    /// Knot value at which the cut activates.
    pub lambda: f64,
    /// Boundary position: the jump sits between samples `cut - 1` and `cut`.
    pub cut: usize,
    /// Direction of the level change, +1 upward.
    pub sign: i8,
    /// `1 - sign * L(cut)` at entry; converts between the internal statistic
    /// and the jump size.
    pub entry_denominator: f64,
    /// Within-segment cusum at the winning cut just before entry.
    pub cusum_at_entry: f64,
    /// Half-open segment that this step split.
    pub segment: (usize, usize),
    /// Boundary signs of that segment (0 at the series ends).
    pub boundary_signs: (i8, i8),
    /// Scale of the step's contrast; the statistic `lambda_k` divided by
    /// `sigma / omega` is a standard normal under no signal.
    pub omega: f64,
}

/// Why the solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Termination {
    /// The requested number of steps was reached; `trailing_lambda` holds the
    /// next knot that was not taken.
    MaxSteps,
    /// No crossing above the numerical-zero threshold remains; the fit is
    /// exact at zero penalty from here.
    ResidualExhausted,
    /// Two distinct cuts would activate at numerically equal knots. Steps
    /// recorded so far are valid; the tied step itself is ambiguous, so it is
    /// not taken. `trailing_lambda` still equals the tied knot value.
    TieDetected { lambda: f64, cuts: (usize, usize) },
}

/// Solution path: the knots in decreasing order plus how the solve ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedPath {
    /// Number of samples.
    pub n: usize,
    /// Recorded steps, `lambda` strictly decreasing.
    pub steps: Vec<PathStep>,
    pub termination: Termination,
    /// The knot value after the last recorded step (0 when the residual is
    /// exhausted); serves as the lower truncation limit for the last step.
    pub trailing_lambda: f64,
}

impl FusedPath {
    /// Knot value `lambda_k` for 1-based `k`; `k = 0` returns infinity.
    pub fn knot(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Ok(f64::INFINITY);
        }
        self.steps
            .get(k - 1)
            .map(|s| s.lambda)
            .ok_or(Error::StepOutOfRange { k, len: self.steps.len() })
    }

    /// All recorded knot values, decreasing.
    pub fn knots(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.lambda).collect()
    }

    /// Cut positions in activation order.
    pub fn cuts(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.cut).collect()
    }

    /// Contrast scales `omega_k` in activation order.
    pub fn omegas(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.omega).collect()
    }

    /// Active cuts after `k` steps, sorted by position, with jump signs.
    pub fn active_at(&self, k: usize) -> Result<Vec<(usize, i8)>> {
        if k > self.steps.len() {
            return Err(Error::StepOutOfRange { k, len: self.steps.len() });
        }
        let mut active: Vec<(usize, i8)> =
            self.steps[..k].iter().map(|s| (s.cut, s.sign)).collect();
        active.sort_unstable_by_key(|&(c, _)| c);
        Ok(active)
    }

    /// Truncation data for step `k`: `(upper, value, lower)` =
    /// `(lambda_{k-1}, lambda_k, lambda_{k+1})`, with infinity above the
    /// first step and `trailing_lambda` below the last.
    pub fn pivot_bounds(&self, k: usize) -> Result<(f64, f64, f64)> {
        let value = self.knot(k)?;
        let upper = self.knot(k - 1)?;
        let lower = if k < self.steps.len() {
            self.steps[k].lambda
        } else {
            self.trailing_lambda
        };
        Ok((upper, value, lower))
    }

    /// Segment partition after `k` steps, with boundary signs.
    pub(crate) fn segments_at(&self, k: usize) -> Result<Vec<SegmentState>> {
        let active = self.active_at(k)?;
        let mut out = Vec::with_capacity(active.len() + 1);
        let mut a = 0usize;
        let mut sa = 0i8;
        for &(cut, sign) in &active {
            out.push(SegmentState { a, b: cut, sa, sb: sign });
            a = cut;
            sa = sign;
        }
        out.push(SegmentState { a, b: self.n, sa, sb: 0 });
        Ok(out)
    }

    /// Fitted values at penalty `lambda`, reconstructed from the active set:
    /// each segment takes its mean minus `lambda * (sa - sb) / len`.
    ///
    /// Valid for any `lambda >= trailing_lambda`; below that the path is not
    /// computed (unless it ended with the residual exhausted, in which case
    /// the fit is exact all the way to zero).
    pub fn fitted_values(&self, values: &[f64], lambda: f64) -> Result<Vec<f64>> {
        if values.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "fitted_values got {} samples for a path built on {}",
                values.len(),
                self.n
            )));
        }
        if !(lambda >= 0.0) {
            return Err(Error::InvalidInput(format!("penalty must be nonnegative, got {lambda}")));
        }
        if lambda < self.trailing_lambda && !matches!(self.termination, Termination::ResidualExhausted) {
            return Err(Error::InvalidInput(format!(
                "penalty {lambda} is below the computed portion of the path ({}); raise the step budget",
                self.trailing_lambda
            )));
        }
        let k = self.steps.iter().take_while(|s| s.lambda > lambda).count();
        let mut out = vec![0.0; self.n];
        for seg in self.segments_at(k)? {
            let len = (seg.b - seg.a) as f64;
            let mean = compensated_sum(values[seg.a..seg.b].iter().copied()) / len;
            let level = mean - lambda * (f64::from(seg.sa) - f64::from(seg.sb)) / len;
            for v in &mut out[seg.a..seg.b] {
                *v = level;
            }
        }
        Ok(out)
    }

    /// Multiplier turning the internal statistic scale into the jump size at
    /// step `k`: the fitted level change across the cut equals
    /// `jump_scale * theta` for the underlying mean parameter `theta`.
    pub fn jump_scale(&self, k: usize) -> Result<f64> {
        let step = self
            .steps
            .get(k.wrapping_sub(1))
            .ok_or(Error::StepOutOfRange { k, len: self.steps.len() })?;
        if step.entry_denominator <= DEGENERATE_DENOM {
            return Err(Error::DegenerateDirection { j: step.cut, denom: step.entry_denominator });
        }
        Ok(f64::from(step.sign) * step.omega * step.omega / step.entry_denominator)
    }

    /// Half-open interval `(lower, upper]` of penalties whose solution has
    /// exactly `m` changepoints. `m = 0` gives `(lambda_1, inf]`; the last
    /// recorded count extends down to `trailing_lambda` (0 when the residual
    /// is exhausted).
    pub fn penalty_interval(&self, m: usize) -> Result<(f64, f64)> {
        if m > self.steps.len() {
            return Err(Error::StepOutOfRange { k: m, len: self.steps.len() });
        }
        let upper = self.knot(m)?;
        let lower = if m < self.steps.len() { self.steps[m].lambda } else { self.trailing_lambda };
        Ok((lower, upper))
    }

    /// The within-segment prefix-sum statistic as it stood when step `k` was
    /// chosen (after `k - 1` splits): entry `c - 1` holds the cumulative sum
    /// of `values` minus segment means over positions `0..c`. Zero at active
    /// cuts, and the step-`k` winner attains `lambda_k` in absolute value.
    pub fn cusum_envelope(&self, values: &[f64], k: usize) -> Result<Vec<f64>> {
        if values.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "cusum_envelope got {} samples for a path built on {}",
                values.len(),
                self.n
            )));
        }
        if k == 0 {
            return Err(Error::StepOutOfRange { k, len: self.steps.len() });
        }
        let cuts: Vec<usize> = self.active_at(k - 1)?.into_iter().map(|(c, _)| c).collect();
        Ok(cusum(&segment_residual(values, &cuts)))
    }
}

/// Compute the solution path for `values`, stopping after `max_steps` knots,
/// at residual exhaustion, or at a tie, whichever comes first.
pub fn lars_path(values: &[f64], max_steps: usize) -> Result<FusedPath> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 samples, got {n}")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite sample {v}")));
    }

    let mean = compensated_sum(values.iter().copied()) / n as f64;
    let spread = values.iter().map(|v| (v - mean).abs()).fold(0.0f64, f64::max);
    let zero_tol = ZERO_TOLERANCE * n as f64 * spread.max(f64::MIN_POSITIVE);

    struct Slot {
        seg: SegmentState,
        best: Option<Candidate>,
        second: Option<Candidate>,
    }

    /// Heap entry mirroring one slot's best crossing. Candidates never carry
    /// NaN, so `total_cmp` gives the numeric order; equal values fall back to
    /// the earlier slot for a deterministic pop order.
    struct Entry {
        lambda: f64,
        slot: usize,
    }
    impl PartialEq for Entry {
        fn eq(&self, other: &Self) -> bool {
            self.cmp(other) == Ordering::Equal
        }
    }
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> Ordering {
            self.lambda.total_cmp(&other.lambda).then(other.slot.cmp(&self.slot))
        }
    }

    // Slots are append-only; a split retires the parent (entries pointing at
    // it become stale and are skipped on pop) and pushes the two children.
    let mut slots: Vec<Slot> = Vec::with_capacity(16);
    let mut retired: Vec<bool> = Vec::with_capacity(16);
    let mut heap: BinaryHeap<Entry> = BinaryHeap::with_capacity(16);
    let add_slot = |slots: &mut Vec<Slot>, retired: &mut Vec<bool>, heap: &mut BinaryHeap<Entry>, slot: Slot| {
        if let Some(b) = slot.best {
            heap.push(Entry { lambda: b.lambda, slot: slots.len() });
        }
        slots.push(slot);
        retired.push(false);
    };

    let root = SegmentState { a: 0, b: n, sa: 0, sb: 0 };
    let (b0, s0) = scan_segment(values, root);
    add_slot(&mut slots, &mut retired, &mut heap, Slot { seg: root, best: b0, second: s0 });

    let mut steps: Vec<PathStep> = Vec::new();
    let mut prev_lambda = f64::INFINITY;

    loop {
        while heap.peek().is_some_and(|e| retired[e.slot]) {
            heap.pop();
        }
        let Some(top) = heap.pop() else {
            return Ok(FusedPath {
                n,
                steps,
                termination: Termination::ResidualExhausted,
                trailing_lambda: 0.0,
            });
        };
        let slot_idx = top.slot;
        let winner = slots[slot_idx].best.expect("heap entries mirror slot bests");
        debug_assert_eq!(winner.lambda.to_bits(), top.lambda.to_bits());

        // Global runner-up: the winning segment's own second crossing or the
        // best of the next-ranked segment, whichever is larger.
        while heap.peek().is_some_and(|e| retired[e.slot]) {
            heap.pop();
        }
        let mut second = slots[slot_idx].second;
        if let Some(next) = heap.peek() {
            let cand = slots[next.slot].best.expect("heap entries mirror slot bests");
            second = match second {
                Some(s) if s.lambda >= cand.lambda => Some(s),
                _ => Some(cand),
            };
        }
        if winner.lambda <= zero_tol {
            return Ok(FusedPath {
                n,
                steps,
                termination: Termination::ResidualExhausted,
                trailing_lambda: winner.lambda,
            });
        }
        if winner.lambda > prev_lambda + TIE_TOLERANCE * prev_lambda.max(1.0) {
            return Err(Error::Internal(format!(
                "knot sequence increased: {} after {prev_lambda}",
                winner.lambda
            )));
        }
        if steps.len() == max_steps {
            return Ok(FusedPath {
                n,
                steps,
                termination: Termination::MaxSteps,
                trailing_lambda: winner.lambda,
            });
        }
        if let Some(runner) = second {
            if winner.lambda - runner.lambda <= TIE_TOLERANCE * winner.lambda.max(1.0) {
                return Ok(FusedPath {
                    n,
                    steps,
                    termination: Termination::TieDetected {
                        lambda: winner.lambda,
                        cuts: (winner.cut.min(runner.cut), winner.cut.max(runner.cut)),
                    },
                    trailing_lambda: winner.lambda,
                });
            }
        }

        let seg = slots[slot_idx].seg;
        steps.push(PathStep {
            k: steps.len() + 1,
            lambda: winner.lambda,
            cut: winner.cut,
            sign: winner.sign,
            entry_denominator: winner.denominator,
            cusum_at_entry: winner.cusum,
            segment: (seg.a, seg.b),
            boundary_signs: (seg.sa, seg.sb),
            omega: omega_for_split(seg, winner.cut, winner.sign),
        });
        prev_lambda = winner.lambda;

        retired[slot_idx] = true;
        let left = SegmentState { a: seg.a, b: winner.cut, sa: seg.sa, sb: winner.sign };
        let right = SegmentState { a: winner.cut, b: seg.b, sa: winner.sign, sb: seg.sb };
        let (lb, ls) = scan_segment(values, left);
        add_slot(&mut slots, &mut retired, &mut heap, Slot { seg: left, best: lb, second: ls });
        let (rb, rs) = scan_segment(values, right);
        add_slot(&mut slots, &mut retired, &mut heap, Slot { seg: right, best: rb, second: rs });
    }
}

/// Contrast scale for splitting `seg` at `cut` with jump sign `sign`.
///
/// The equiangular fit direction is piecewise constant; splitting changes its
/// value on the two halves from `(sa - sb)/len` to `(sa - s)/len_left` and
/// `(s - sb)/len_right`, and `omega` is the Euclidean norm of that change.
fn omega_for_split(seg: SegmentState, cut: usize, sign: i8) -> f64 {
    let a = seg.a as f64;
    let b = seg.b as f64;
    let j = cut as f64;
    let sa = f64::from(seg.sa);
    let sb = f64::from(seg.sb);
    let s = f64::from(sign);
    let c_old = (sa - sb) / (b - a);
    let c1 = (sa - s) / (j - a);
    let c2 = (s - sb) / (b - j);
    ((j - a) * (c1 - c_old).powi(2) + (b - j) * (c2 - c_old).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn toy_path_single_knot() {
        // (2,2,0,0): one level change, downward, at the middle boundary
        let path = lars_path(&[2.0, 2.0, 0.0, 0.0], 8).unwrap();
        assert_eq!(path.steps.len(), 1);
        let step = &path.steps[0];
        assert_relative_eq!(step.lambda, 2.0, max_relative = 1e-14);
        assert_eq!(step.cut, 2);
        assert_eq!(step.sign, -1);
        assert_relative_eq!(step.omega, 1.0, max_relative = 1e-14);
        assert_relative_eq!(step.entry_denominator, 1.0, max_relative = 1e-14);
        assert!(matches!(path.termination, Termination::ResidualExhausted));
        assert!(path.trailing_lambda.abs() < 1e-12);
    }

    #[test]
    fn three_point_path_has_interaction_corrected_second_knot() {
        // (0,1,-1): the naive per-segment maximum would give 0.5 for the
        // second knot; the envelope slope from the first active cut makes the
        // true value 1/3.
        let path = lars_path(&[0.0, 1.0, -1.0], 8).unwrap();
        assert_eq!(path.cuts(), vec![2, 1]);
        assert_relative_eq!(path.knot(1).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(path.knot(2).unwrap(), 1.0 / 3.0, max_relative = 1e-13);
        assert_eq!(path.steps[0].sign, -1);
        assert_eq!(path.steps[1].sign, 1);
    }

    #[test]
    fn knots_are_decreasing_and_signs_match_fitted_jumps() {
        let values = [0.7, -0.3, 1.9, 2.1, -0.5, -0.4, 0.0, 3.2, 3.0, -1.0];
        let path = lars_path(&values, values.len()).unwrap();
        assert!(path.steps.len() >= 3);
        for w in path.knots().windows(2) {
            assert!(w[0] > w[1]);
        }
        // just below each knot, the fitted jump at the entering cut has the
        // recorded sign
        for k in 1..=path.steps.len() {
            let step = path.steps[k - 1];
            let (_, value, lower) = path.pivot_bounds(k).unwrap();
            let lam = 0.5 * (value + lower);
            let fit = path.fitted_values(&values, lam).unwrap();
            let jump = fit[step.cut] - fit[step.cut - 1];
            assert!(
                jump * f64::from(step.sign) > 0.0,
                "step {k}: jump {jump} sign {}",
                step.sign
            );
        }
    }

    #[test]
    fn fitted_values_match_segment_shrinkage_at_knot_midpoint() {
        let values = [2.0, 2.0, 0.0, 0.0];
        let path = lars_path(&values, 4).unwrap();
        let fit = path.fitted_values(&values, 1.0).unwrap();
        let expect = [1.5, 1.5, 0.5, 0.5];
        for (a, b) in fit.iter().zip(expect.iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-14);
        }
        // at the first knot the fit is constant
        let at_knot = path.fitted_values(&values, 2.0).unwrap();
        for v in &at_knot {
            assert_relative_eq!(*v, 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn tie_between_symmetric_cuts_is_detected() {
        let path = lars_path(&[1.0, 0.0, 0.0, 1.0], 4).unwrap();
        assert!(path.steps.is_empty());
        match path.termination {
            Termination::TieDetected { lambda, cuts } => {
                assert_relative_eq!(lambda, 0.5, max_relative = 1e-12);
                assert_eq!(cuts, (1, 3));
            }
            other => panic!("expected tie, got {other:?}"),
        }
        assert_relative_eq!(path.trailing_lambda, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn max_steps_budget_reports_next_knot() {
        let path = lars_path(&[0.0, 1.0, -1.0], 1).unwrap();
        assert_eq!(path.steps.len(), 1);
        assert!(matches!(path.termination, Termination::MaxSteps));
        assert_relative_eq!(path.trailing_lambda, 1.0 / 3.0, max_relative = 1e-13);
        // fit below the computed range is refused
        assert!(path.fitted_values(&[0.0, 1.0, -1.0], 0.1).is_err());
    }

    #[test]
    fn constant_signal_exhausts_immediately() {
        let path = lars_path(&[3.0; 6], 5).unwrap();
        assert!(path.steps.is_empty());
        assert!(matches!(path.termination, Termination::ResidualExhausted));
        assert_eq!(path.trailing_lambda, 0.0);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(lars_path(&[1.0], 3).is_err());
        assert!(lars_path(&[1.0, f64::NAN, 0.0], 3).is_err());
    }

    #[test]
    fn penalty_intervals_partition_the_ray() {
        let path = lars_path(&[0.0, 1.0, -1.0], 8).unwrap();
        let (lo0, hi0) = path.penalty_interval(0).unwrap();
        assert_relative_eq!(lo0, 1.0, max_relative = 1e-14);
        assert_eq!(hi0, f64::INFINITY);
        let (lo1, hi1) = path.penalty_interval(1).unwrap();
        assert_relative_eq!(lo1, 1.0 / 3.0, max_relative = 1e-13);
        assert_relative_eq!(hi1, 1.0, max_relative = 1e-14);
        let (lo2, hi2) = path.penalty_interval(2).unwrap();
        assert!(lo2.abs() < 1e-12);
        assert_relative_eq!(hi2, 1.0 / 3.0, max_relative = 1e-13);
        assert!(path.penalty_interval(3).is_err());
    }

    #[test]
    fn cusum_envelope_snapshots_track_the_active_set() {
        let values = [2.0, 2.0, 0.0, 0.0];
        let path = lars_path(&values, 4).unwrap();
        let env1 = path.cusum_envelope(&values, 1).unwrap();
        assert_eq!(env1.len(), 3);
        assert_relative_eq!(env1[1], 2.0, max_relative = 1e-14);
        assert_relative_eq!(env1[0], 1.0, max_relative = 1e-14);
        // the split fits both segments exactly, so the next envelope vanishes
        let env2 = path.cusum_envelope(&values, 2).unwrap();
        assert!(env2.iter().all(|c| c.abs() < 1e-12));
        assert!(path.cusum_envelope(&values, 3).is_err());
        assert!(path.cusum_envelope(&[1.0, 2.0], 1).is_err());
    }

    #[test]
    fn knot_identity_holds_at_each_step() {
        // lambda_k * denominator == |cusum| by construction; recheck from the
        // stored snapshot as a consistency guard
        let values = [0.2, 1.4, -0.7, 0.9, -1.3, 0.4, 2.2, -0.1];
        let path = lars_path(&values, 8).unwrap();
        for s in &path.steps {
            assert_relative_eq!(
                s.lambda * s.entry_denominator,
                s.cusum_at_entry.abs(),
                max_relative = 1e-12
            );
            assert_eq!(s.sign, if s.cusum_at_entry > 0.0 { -1 } else { 1 });
        }
    }
}
