//! Exact fused-lasso solves at a fixed penalty, with an optimality
//! certificate.
//!
//! This is the reference implementation the path solver is tested against.
//! It shares no code with the path: the minimizer comes from Condat's direct
//! taut-string sweep, and the certificate checks the subgradient conditions,
//! which for this strictly convex problem are necessary and sufficient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative jump threshold when reading changepoints off a fitted sequence.
pub const JUMP_THRESHOLD: f64 = 1e-8;
/// Subgradient slack allowed by the certificate, scaled by `1 + lambda`.
pub const KKT_TOLERANCE: f64 = 1e-7;

/// Subgradient diagnostics for a candidate minimizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// How far any dual coordinate exceeds the penalty; 0 when feasible.
    pub envelope_excess: f64,
    /// Worst mismatch between the dual and `lambda * sign(jump)` at jumps.
    pub jump_sign_error: f64,
    /// |sum of residuals|; the fit must preserve the mean.
    pub mean_shift: f64,
    pub ok: bool,
}

/// An exact solve bundled with its certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlsaSolution {
    pub lambda: f64,
    pub fitted: Vec<f64>,
    /// Cut positions where the fit jumps (boundary before sample `c`).
    pub cuts: Vec<usize>,
    pub kkt: KktReport,
}

/// Condat's direct 1D total-variation denoiser:
/// argmin 0.5 ||y - x||^2 + lambda * sum |x_{i+1} - x_i|.
pub fn flsa_solve(values: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n == 0 {
        return Err(Error::InvalidInput("empty input".into()));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidInput(format!("penalty must be finite and >= 0, got {lambda}")));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite sample {v}")));
    }
    if lambda == 0.0 || n == 1 {
        return Ok(values.to_vec());
    }
    let y = values;
    let lam = lambda;
    let mut x = vec![0.0f64; n];
    let (mut k, mut k0, mut km, mut kp) = (0usize, 0usize, 0usize, 0usize);
    let mut vmin = y[0] - lam;
    let mut vmax = y[0] + lam;
    let mut umin = lam;
    let mut umax = -lam;
    loop {
        if k == n - 1 {
            if umin < 0.0 {
                // the lower string breaks: fix the segment at vmin
                while k0 <= km {
                    x[k0] = vmin;
                    k0 += 1;
                }
                if k0 >= n {
                    return Ok(x);
                }
                k = k0;
                km = k0;
                vmin = y[k];
                umin = lam;
                umax = vmin + lam - vmax;
            } else if umax > 0.0 {
                while k0 <= kp {
                    x[k0] = vmax;
                    k0 += 1;
                }
                if k0 >= n {
                    return Ok(x);
                }
                k = k0;
                kp = k0;
                vmax = y[k];
                umax = -lam;
                umin = vmax - lam - vmin;
            } else {
                // both strings taut: the final segment takes the average
                vmin += umin / (k - k0 + 1) as f64;
                while k0 <= k {
                    x[k0] = vmin;
                    k0 += 1;
                }
                return Ok(x);
            }
            if k == n - 1 {
                continue;
            }
        }
        if umin + y[k + 1] - vmin < -lam {
            // negative jump: flush the minorant segment
            while k0 <= km {
                x[k0] = vmin;
                k0 += 1;
            }
            k = k0;
            km = k0;
            kp = k0;
            vmin = y[k];
            vmax = y[k] + 2.0 * lam;
            umin = lam;
            umax = -lam;
        } else if umax + y[k + 1] - vmax > lam {
            // positive jump: flush the majorant segment
            while k0 <= kp {
                x[k0] = vmax;
                k0 += 1;
            }
            k = k0;
            km = k0;
            kp = k0;
            vmin = y[k] - 2.0 * lam;
            vmax = y[k];
            umin = lam;
            umax = -lam;
        } else {
            // extend the current segment
            k += 1;
            umin += y[k] - vmin;
            umax += y[k] - vmax;
            if umin >= lam {
                vmin += (umin - lam) / (k - k0 + 1) as f64;
                umin = lam;
                km = k;
            }
            if umax <= -lam {
                vmax += (umax + lam) / (k - k0 + 1) as f64;
                umax = -lam;
                kp = k;
            }
        }
    }
}

/// Positions where `fitted` jumps by more than `JUMP_THRESHOLD * scale`.
pub fn changepoints_of(fitted: &[f64], scale: f64) -> Vec<usize> {
    (1..fitted.len())
        .filter(|&c| (fitted[c] - fitted[c - 1]).abs() > JUMP_THRESHOLD * scale)
        .collect()
}

/// Evaluate the subgradient conditions for `fitted` as a minimizer at
/// `lambda`. The dual is the negated running sum of residuals; optimality
/// requires it inside [-lambda, lambda] everywhere, pinned to
/// `lambda * sign(jump)` at jumps, and a residual sum of zero.
pub fn kkt_certificate(values: &[f64], lambda: f64, fitted: &[f64]) -> KktReport {
    assert_eq!(values.len(), fitted.len());
    let n = values.len();
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 1.0;
    let mut dual = Vec::with_capacity(n.saturating_sub(1));
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for i in 0..n {
        let v = values[i] - fitted[i];
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        if i + 1 < n {
            dual.push(-(sum + comp));
        }
    }
    let mean_shift = (sum + comp).abs();
    let mut envelope_excess = 0.0f64;
    for &u in &dual {
        envelope_excess = envelope_excess.max(u.abs() - lambda);
    }
    envelope_excess = envelope_excess.max(0.0);
    let mut jump_sign_error = 0.0f64;
    for c in 1..n {
        let d = fitted[c] - fitted[c - 1];
        if d.abs() > JUMP_THRESHOLD * scale {
            jump_sign_error = jump_sign_error.max((dual[c - 1] - lambda * d.signum()).abs());
        }
    }
    let tol = KKT_TOLERANCE * (1.0 + lambda);
    let ok = envelope_excess <= tol
        && jump_sign_error <= tol
        && mean_shift <= 1e-9 * n as f64 * scale;
    KktReport { envelope_excess, jump_sign_error, mean_shift, ok }
}

/// Solve and certify; refuses to return an uncertified fit.
pub fn flsa_certified(values: &[f64], lambda: f64) -> Result<FlsaSolution> {
    let fitted = flsa_solve(values, lambda)?;
    let kkt = kkt_certificate(values, lambda, &fitted);
    if !kkt.ok {
        return Err(Error::KktViolation(format!(
            "solve at penalty {lambda} failed certification: envelope excess {:.3e}, jump sign error {:.3e}, mean shift {:.3e}",
            kkt.envelope_excess, kkt.jump_sign_error, kkt.mean_shift
        )));
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 1.0;
    let cuts = changepoints_of(&fitted, scale);
    Ok(FlsaSolution { lambda, fitted, cuts, kkt })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn toy_solution_at_unit_penalty() {
        let sol = flsa_certified(&[2.0, 2.0, 0.0, 0.0], 1.0).unwrap();
        let expect = [1.5, 1.5, 0.5, 0.5];
        for (a, b) in sol.fitted.iter().zip(expect.iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
        assert_eq!(sol.cuts, vec![2]);
        assert!(sol.kkt.ok);
    }

    #[test]
    fn zero_penalty_returns_data_and_large_penalty_returns_mean() {
        let y = [0.3, -1.2, 4.0, 2.2];
        assert_eq!(flsa_solve(&y, 0.0).unwrap(), y.to_vec());
        let flat = flsa_certified(&y, 1e6).unwrap();
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        for v in &flat.fitted {
            assert_relative_eq!(*v, mean, max_relative = 1e-9);
        }
        assert!(flat.cuts.is_empty());
    }

    #[test]
    fn certificate_rejects_a_wrong_fit() {
        let y = [2.0, 2.0, 0.0, 0.0];
        let wrong = [2.0, 1.0, 1.0, 0.0];
        let kkt = kkt_certificate(&y, 1.0, &wrong);
        assert!(!kkt.ok);
    }

    #[test]
    fn random_solves_certify_across_penalties() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(2..40);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            for &lam in &[1e-4, 0.1, 0.5, 1.0, 2.5, 10.0] {
                let sol = flsa_certified(&y, lam).unwrap();
                assert!(sol.kkt.ok, "n={n} lam={lam} kkt={:?}", sol.kkt);
            }
        }
    }

    #[test]
    fn objective_is_no_worse_than_perturbations() {
        use rand::{Rng, SeedableRng};
        let objective = |y: &[f64], x: &[f64], lam: f64| {
            let fit: f64 = y.iter().zip(x).map(|(a, b)| 0.5 * (a - b) * (a - b)).sum();
            let tv: f64 = x.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
            fit + lam * tv
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let n = rng.gen_range(3..20);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let lam = rng.gen_range(0.05..2.0);
            let x = flsa_solve(&y, lam).unwrap();
            let base = objective(&y, &x, lam);
            for _ in 0..30 {
                let mut xp = x.clone();
                let i = rng.gen_range(0..n);
                xp[i] += rng.gen_range(-0.1..0.1);
                assert!(objective(&y, &xp, lam) >= base - 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(flsa_solve(&[], 1.0).is_err());
        assert!(flsa_solve(&[1.0, 2.0], -1.0).is_err());
        assert!(flsa_solve(&[1.0, f64::INFINITY], 1.0).is_err());
    }
}
