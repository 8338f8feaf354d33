//! Knot detection by scanning exact solves.
//!
//! An independent (and much slower) way to find where the solution path
//! gains jumps: solve the fused lasso on a descending penalty grid, watch the
//! changepoint count, and bisect every increase down to a tight bracket.
//! Shares nothing with the path solver beyond the exact solver itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::flsa::{changepoints_of, flsa_solve};
use crate::path::cusum::cusum;
use crate::path::reparam::center;

/// A penalty at which the active set grows, with the cut(s) that appear.
/// Multiple cuts indicate a tie at grid resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotEvent {
    pub lambda: f64,
    pub cuts: Vec<usize>,
}

/// Locate all knots of the solution path by grid scan plus bisection.
///
/// `grid` coarse points are solved between just above the first knot and
/// zero; each interval where the changepoint count rises is bisected to a
/// bracket of relative width about 1e-9 and reported at the midpoint.
pub fn knot_scan(values: &[f64], grid: usize) -> Result<Vec<KnotEvent>> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 samples, got {n}")));
    }
    if grid < 2 {
        return Err(Error::InvalidInput("grid must have at least 2 points".into()));
    }
    let lam1 = cusum(&center(values))
        .iter()
        .fold(0.0f64, |m, c| m.max(c.abs()));
    if lam1 <= 0.0 {
        return Ok(Vec::new());
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 1.0;
    let count_at = |lam: f64| -> Result<usize> {
        let mu = flsa_solve(values, lam.max(0.0))?;
        Ok(changepoints_of(&mu, scale).len())
    };
    let cuts_at = |lam: f64| -> Result<Vec<usize>> {
        let mu = flsa_solve(values, lam.max(0.0))?;
        Ok(changepoints_of(&mu, scale))
    };

    let top = lam1 * 1.1;
    // built descending in lambda: i = 0 is the top of the grid, the last is 0
    let mut pts = Vec::with_capacity(grid);
    for i in 0..grid {
        let lam = top * (grid - 1 - i) as f64 / (grid - 1) as f64;
        pts.push((lam, count_at(lam)?));
    }

    let tol = 1e-9 * (1.0 + lam1);
    let mut events: Vec<KnotEvent> = Vec::new();
    let mut stack: Vec<(f64, f64, usize, usize)> = Vec::new();
    for w in pts.windows(2) {
        let (hi, chi) = w[0];
        let (lo, clo) = w[1];
        if clo < chi {
            return Err(Error::Internal(format!(
                "changepoint count dropped from {chi} to {clo} as the penalty decreased"
            )));
        }
        if clo > chi {
            stack.push((hi, lo, chi, clo));
        }
    }
    while let Some((hi, lo, chi, clo)) = stack.pop() {
        if clo == chi {
            continue;
        }
        if hi - lo < tol {
            let before: std::collections::BTreeSet<usize> = cuts_at(hi)?.into_iter().collect();
            let after: std::collections::BTreeSet<usize> = cuts_at(lo)?.into_iter().collect();
            let entered: Vec<usize> = after.difference(&before).copied().collect();
            if !entered.is_empty() {
                events.push(KnotEvent { lambda: 0.5 * (hi + lo), cuts: entered });
            }
            continue;
        }
        let mid = 0.5 * (hi + lo);
        let cmid = count_at(mid)?;
        stack.push((hi, mid, chi, cmid));
        stack.push((mid, lo, cmid, clo));
    }
    events.sort_by(|a, b| b.lambda.partial_cmp(&a.lambda).expect("finite knots"));
    Ok(events)
}
