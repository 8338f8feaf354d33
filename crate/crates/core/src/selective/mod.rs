//! Post-selection inference for detected level changes.
//!
//! Each knot statistic, conditioned on the selection made so far, follows a
//! normal distribution truncated to the interval between its neighboring
//! knots. This module evaluates that truncated law stably (log-space survival
//! ratios built on `erfcx`), producing p-values and selective confidence
//! intervals, and hosts the dense polyhedral reconstruction used to
//! cross-check the shortcut formulas.

pub mod design;
pub mod polyhedron;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::solver::{FusedPath, Termination};
use crate::signal::{Signal, SigmaSource};
use crate::stats::normal::{normal_ln_sf, normal_quantile};

pub use design::{ActiveDesign, DirectionVector};
pub use polyhedron::{
    hit_leave_polyhedron, HitLeaveSession, PolyRow, PolyhedralSystem, RowProvenance,
};

/// ln(1 - exp(-m)) for m >= 0, without intermediate underflow.
fn ln_one_minus_exp_neg(m: f64) -> f64 {
    if m <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if m < std::f64::consts::LN_2 {
        (-(-m).exp_m1()).ln()
    } else {
        (-(-m).exp()).ln_1p()
    }
}

/// ln P(z_lo < Z <= z_hi) for a standard normal, uniformly accurate in both
/// tails. Mirrors to the positive side when the interval sits below zero,
/// because the survival function saturates for very negative arguments.
pub(crate) fn ln_prob_between(z_lo: f64, z_hi: f64) -> f64 {
    debug_assert!(z_lo <= z_hi);
    if z_lo >= z_hi {
        return f64::NEG_INFINITY;
    }
    let (a, b) = if z_hi <= 0.0 { (-z_hi, -z_lo) } else { (z_lo, z_hi) };
    let ln_a = normal_ln_sf(a);
    if b == f64::INFINITY {
        return ln_a;
    }
    let ln_b = normal_ln_sf(b);
    ln_a + ln_one_minus_exp_neg(ln_a - ln_b)
}

fn validate_truncation(sd: f64, lower: f64, upper: f64) -> Result<()> {
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(Error::InvalidSigma(format!("scale must be positive and finite, got {sd}")));
    }
    if !(lower < upper) {
        return Err(Error::InvalidInput(format!(
            "degenerate truncation interval [{lower}, {upper}]"
        )));
    }
    Ok(())
}

/// P(Z >= zx | za <= Z <= zb) on standardized bounds.
fn truncated_survival_z(zx: f64, za: f64, zb: f64) -> f64 {
    let clamped = zx.clamp(za, zb);
    let ln_num = ln_prob_between(clamped, zb);
    let ln_den = ln_prob_between(za, zb);
    if ln_den == f64::NEG_INFINITY {
        // the whole interval carries no representable mass; split by side
        return if zx <= 0.5 * (za + zb) { 1.0 } else { 0.0 };
    }
    (ln_num - ln_den).exp().clamp(0.0, 1.0)
}

/// Survival probability of a truncated normal:
/// P(X >= x | X in [lower, upper]) for X ~ N(mean, sd^2).
pub fn truncated_normal_survival(
    x: f64,
    mean: f64,
    sd: f64,
    lower: f64,
    upper: f64,
) -> Result<f64> {
    validate_truncation(sd, lower, upper)?;
    Ok(truncated_survival_z((x - mean) / sd, (lower - mean) / sd, (upper - mean) / sd))
}

/// CDF counterpart of [`truncated_normal_survival`].
///
/// Evaluated as the survival of the reflected variable rather than
/// `1 - survival`, so small left-tail masses keep full relative accuracy.
pub fn truncated_normal_cdf(x: f64, mean: f64, sd: f64, lower: f64, upper: f64) -> Result<f64> {
    validate_truncation(sd, lower, upper)?;
    Ok(truncated_survival_z(-(x - mean) / sd, -(upper - mean) / sd, -(lower - mean) / sd))
}

/// The spacing p-value for one knot.
///
/// Under no level change at the detected cut, the knot statistic `value`
/// conditioned on selection is N(0, (sigma/omega)^2) truncated to
/// [`lower`, `upper`] (the flanking knots), and its survival probability is
/// uniform on (0, 1). Small values are evidence of a real change.
pub fn spacing_pivot(upper: f64, value: f64, lower: f64, omega: f64, sigma: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::InvalidInput(format!("omega must be positive and finite, got {omega}")));
    }
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidSigma(format!("sigma must be positive and finite, got {sigma}")));
    }
    if !(lower >= 0.0) || !(value >= lower - 1e-9 * value.abs().max(1.0)) || !(upper >= value) {
        return Err(Error::InvalidInput(format!(
            "knot ordering violated: lower {lower}, value {value}, upper {upper}"
        )));
    }
    truncated_normal_survival(value, 0.0, sigma / omega, lower, upper)
}

/// Equal-tailed selective confidence interval for the mean of a truncated
/// normal observation.
///
/// `value` is observed from N(theta, sd^2) truncated to [lower, upper]; the
/// returned interval inverts the survival pivot at levels alpha/2 and
/// 1 - alpha/2 by bisection (the pivot is increasing in theta).
pub fn selective_interval(
    value: f64,
    sd: f64,
    lower: f64,
    upper: f64,
    alpha: f64,
) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must be in (0,1), got {alpha}")));
    }
    let lo = solve_theta(value, sd, lower, upper, 0.5 * alpha)?;
    let hi = solve_theta(value, sd, lower, upper, 1.0 - 0.5 * alpha)?;
    Ok((lo, hi))
}

/// Find theta with P(X >= value | trunc; theta) = target by bisection.
fn solve_theta(value: f64, sd: f64, lower: f64, upper: f64, target: f64) -> Result<f64> {
    let surv = |theta: f64| truncated_normal_survival(value, theta, sd, lower, upper);
    let mut left = value - 10.0 * sd;
    let mut right = value + 10.0 * sd;
    let mut step = 10.0 * sd;
    for _ in 0..64 {
        if surv(left)? < target {
            break;
        }
        step *= 2.0;
        left -= step;
    }
    if surv(left)? >= target {
        return Err(Error::RootFinding(format!(
            "no lower bracket for the interval endpoint at target {target}"
        )));
    }
    step = 10.0 * sd;
    for _ in 0..64 {
        if surv(right)? > target {
            break;
        }
        step *= 2.0;
        right += step;
    }
    if surv(right)? <= target {
        return Err(Error::RootFinding(format!(
            "no upper bracket for the interval endpoint at target {target}"
        )));
    }
    let tol = 1e-8 * sd;
    for _ in 0..200 {
        let mid = 0.5 * (left + right);
        if right - left <= tol {
            return Ok(mid);
        }
        if surv(mid)? < target {
            left = mid;
        } else {
            right = mid;
        }
    }
    Ok(0.5 * (left + right))
}

/// Inference output for one detected level change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInference {
    /// 1-based step number along the path.
    pub k: usize,
    /// Boundary position: the change sits between samples `cut - 1` and `cut`.
    pub cut: usize,
    /// Direction of the level change, +1 upward.
    pub sign: i8,
    /// Knot value (the test statistic).
    pub lambda: f64,
    /// Contrast scale; `lambda * omega / sigma` is the z-score.
    pub omega: f64,
    /// Upper truncation limit (the previous knot; infinite for the first).
    pub upper_knot: f64,
    /// Lower truncation limit (the next knot; 0 when the path ends).
    pub lower_knot: f64,
    /// Spacing p-value: survival probability of the truncated null.
    pub p_value: f64,
    /// Noise level used.
    pub sigma: f64,
    /// Point estimate of the fitted level change across the cut.
    pub jump_estimate: f64,
    /// Selective confidence interval for the level change, if requested.
    pub jump_interval: Option<(f64, f64)>,
}

/// Run the spacing test (and optional intervals) for every recorded step.
pub fn infer_path(
    signal: &Signal,
    path: &FusedPath,
    alpha: Option<f64>,
) -> Result<Vec<StepInference>> {
    if signal.len() != path.n {
        return Err(Error::InvalidInput(format!(
            "signal has {} samples but the path was built on {}",
            signal.len(),
            path.n
        )));
    }
    let sigma = match signal.sigma_source() {
        SigmaSource::Unset => {
            return Err(Error::InvalidSigma(
                "no noise level on the signal; set sigma or estimate it first".into(),
            ))
        }
        _ => signal.sigma().expect("sigma present when source is set"),
    };
    let mut out = Vec::with_capacity(path.steps.len());
    for step in &path.steps {
        let (upper, value, lower) = path.pivot_bounds(step.k)?;
        let p_value = spacing_pivot(upper, value, lower, step.omega, sigma)?;
        let scale = path.jump_scale(step.k)?;
        let jump_interval = match alpha {
            Some(a) => {
                let sd = sigma / step.omega;
                let (lo, hi) = selective_interval(value, sd, lower, upper, a)?;
                let (jl, jh) = (scale * lo, scale * hi);
                Some((jl.min(jh), jl.max(jh)))
            }
            None => None,
        };
        out.push(StepInference {
            k: step.k,
            cut: step.cut,
            sign: step.sign,
            lambda: value,
            omega: step.omega,
            upper_knot: upper,
            lower_knot: lower,
            p_value,
            sigma,
            jump_estimate: scale * value,
            jump_interval,
        });
    }
    Ok(out)
}

/// Two-sided standard-normal quantile helper for coverage targets.
pub fn normal_two_sided_quantile(alpha: f64) -> f64 {
    normal_quantile(1.0 - 0.5 * alpha)
}

/// True when the path's ending still permits inference on recorded steps.
/// A tie only makes the never-taken next step ambiguous; the recorded
/// selection event, and the tied knot value used as a truncation limit, stay
/// well defined.
pub fn termination_allows_inference(t: &Termination) -> bool {
    matches!(
        t,
        Termination::MaxSteps | Termination::ResidualExhausted | Termination::TieDetected { .. }
    )
}
