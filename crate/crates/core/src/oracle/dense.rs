//! Explicit LARS on the materialized design.
//!
//! A second, structurally different route to the solution path: build the
//! centered data and every dense design column, then run textbook LARS with
//! small Cholesky solves. Residual correlations are linear in the penalty
//! between events, so each inactive column's crossing time has a closed form
//! and the next knot is the largest crossing. O(n^2) work per step; this is
//! a certification tool for the segment-statistic solver, not a production
//! path.

use crate::error::{Error, Result};
use crate::path::reparam::{center, design_column};
use crate::stats::compensated_sum;

/// Size cap for the dense route; it materializes all n-1 columns.
pub const DENSE_LARS_MAX_N: usize = 256;

/// One entry event found by the dense route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseStep {
    pub lambda: f64,
    pub cut: usize,
    pub sign: i8,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    compensated_sum(a.iter().zip(b).map(|(x, y)| x * y))
}

/// Solve G x = rhs for a small symmetric positive-definite G by Cholesky.
fn solve_spd(g: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let k = rhs.len();
    let mut l = vec![vec![0.0f64; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let s = g[i][j] - compensated_sum((0..j).map(|m| l[i][m] * l[j][m]));
            if i == j {
                if s <= 0.0 {
                    return Err(Error::SingularDesign(format!(
                        "active Gram matrix lost positive definiteness at pivot {i} ({s:e})"
                    )));
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut x = rhs.to_vec();
    for i in 0..k {
        let s = compensated_sum((0..i).map(|m| l[i][m] * x[m]));
        x[i] = (x[i] - s) / l[i][i];
    }
    for i in (0..k).rev() {
        let s = compensated_sum((i + 1..k).map(|m| l[m][i] * x[m]));
        x[i] = (x[i] - s) / l[i][i];
    }
    Ok(x)
}

/// Run plain LARS over the dense columns and return the entry events.
///
/// Between events the inactive correlation is `r_j + lambda * h_j` with
/// `r_j` the least-squares residual correlation and `h_j` the inner product
/// with the equiangular vector; it meets the boundary `s * lambda` at
/// `lambda = r_j / (s - h_j)`. Stops at `max_steps`, or when no crossing
/// with a meaningfully positive penalty remains.
pub fn dense_lars_path(values: &[f64], max_steps: usize) -> Result<Vec<DenseStep>> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 samples, got {n}")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("values must be finite".into()));
    }
    if n > DENSE_LARS_MAX_N {
        return Err(Error::CapExceeded(format!(
            "dense LARS materializes the design; n = {n} exceeds the cap {DENSE_LARS_MAX_N}"
        )));
    }
    let y = center(values);
    let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-12 * n as f64 * scale.max(1.0);
    let cols: Vec<Vec<f64>> = (1..n).map(|c| design_column(n, c)).collect();

    let mut active: Vec<usize> = Vec::new();
    let mut signs: Vec<f64> = Vec::new();
    let mut steps: Vec<DenseStep> = Vec::new();
    let mut lambda_prev = f64::INFINITY;

    while steps.len() < max_steps && active.len() < n - 1 {
        // residual correlation intercepts and equiangular inner products
        let k = active.len();
        let (resid, equi): (Vec<f64>, Vec<f64>) = if k == 0 {
            (y.clone(), vec![0.0; n])
        } else {
            let mut g = vec![vec![0.0f64; k]; k];
            let mut xty = vec![0.0f64; k];
            for i in 0..k {
                for j in 0..=i {
                    g[i][j] = dot(&cols[active[i] - 1], &cols[active[j] - 1]);
                    g[j][i] = g[i][j];
                }
                xty[i] = dot(&cols[active[i] - 1], &y);
            }
            let beta = solve_spd(&g, &xty)?;
            let d = solve_spd(&g, &signs)?;
            let mut resid = y.clone();
            let mut equi = vec![0.0f64; n];
            for i in 0..k {
                for (m, c) in cols[active[i] - 1].iter().enumerate() {
                    resid[m] -= beta[i] * c;
                    equi[m] += d[i] * c;
                }
            }
            (resid, equi)
        };

        let mut best: Option<DenseStep> = None;
        for c in 1..n {
            if active.contains(&c) {
                continue;
            }
            let r = dot(&cols[c - 1], &resid);
            let h = dot(&cols[c - 1], &equi);
            for s in [-1.0f64, 1.0] {
                let den = s - h;
                if den.abs() <= 1e-12 {
                    continue;
                }
                let lam = r / den;
                if !(lam > floor) || lam > lambda_prev * (1.0 + 1e-9) {
                    continue;
                }
                if best.map_or(true, |b| lam > b.lambda) {
                    best = Some(DenseStep { lambda: lam, cut: c, sign: if s > 0.0 { 1 } else { -1 } });
                }
            }
        }
        let Some(step) = best else {
            break;
        };
        steps.push(step);
        active.push(step.cut);
        signs.push(f64::from(step.sign));
        lambda_prev = step.lambda;
    }
    Ok(steps)
}
