use fused_spacing::oracle::{dense_lars_path, flsa_certified, knot_scan};
use fused_spacing::path::lars_path;
use fused_spacing::selective::HitLeaveSession;
use fused_spacing::Termination;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Result;

/// One line of `verify` output.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn noise_series(seed: u64, n: usize, with_jump: bool) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y: Vec<f64> =
        (0..n).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
    if with_jump {
        let cut = 1 + (rng.gen::<usize>() % (n - 1));
        let height: f64 = if rng.gen::<bool>() { 2.0 } else { -2.0 };
        for v in &mut y[cut..] {
            *v += height;
        }
    }
    y
}

/// Knots whose gap to the next knot is comfortably above the tie tolerance;
/// below that the winner order is not stable against reformulation rounding.
fn stable_len(lambdas: &[f64], trailing: f64) -> usize {
    for (i, &l) in lambdas.iter().enumerate() {
        let next = lambdas.get(i + 1).copied().unwrap_or(trailing);
        if l - next <= 1e-6 * l.max(1.0) {
            return i;
        }
    }
    lambdas.len()
}

fn check_exact_scan(seed: u64) -> Result<CheckOutcome> {
    let mut max_gap = 0.0f64;
    let mut mismatches = 0usize;
    let mut knots = 0usize;
    for t in 0..40u64 {
        let n = 4 + (t as usize) % 13;
        let y = noise_series(seed.wrapping_add(t), n, t % 2 == 0);
        let path = lars_path(&y, n - 1)?;
        let events = knot_scan(&y, 4096)?;
        if events.len() != path.steps.len() {
            mismatches += 1;
            continue;
        }
        for (event, step) in events.iter().zip(&path.steps) {
            max_gap = max_gap.max((event.lambda - step.lambda).abs() / step.lambda.max(1.0));
            if event.cuts != vec![step.cut] {
                mismatches += 1;
            }
            knots += 1;
        }
    }
    Ok(CheckOutcome {
        name: "exact-solver scan reproduces the path",
        pass: max_gap < 1e-6 && mismatches == 0,
        detail: format!("{knots} knots, max relative gap {max_gap:.3e}, {mismatches} mismatches"),
    })
}

fn check_dense_route(seed: u64) -> Result<CheckOutcome> {
    let mut max_rel = 0.0f64;
    let mut mismatches = 0usize;
    let mut compared = 0usize;
    for t in 0..25u64 {
        let n = 8 + (t as usize * 5) % 57;
        let y = noise_series(seed.wrapping_add(100 + t), n, t % 3 == 0);
        let path = lars_path(&y, n - 1)?;
        let lambdas: Vec<f64> = path.steps.iter().map(|s| s.lambda).collect();
        let take = stable_len(&lambdas, path.trailing_lambda);
        let dense = dense_lars_path(&y, take)?;
        for (d, s) in dense.iter().zip(&path.steps).take(take) {
            max_rel = max_rel.max((d.lambda - s.lambda).abs() / s.lambda.max(1e-300));
            if d.cut != s.cut || d.sign != s.sign {
                mismatches += 1;
            }
            compared += 1;
        }
    }
    Ok(CheckOutcome {
        name: "textbook solver on the dense design agrees",
        pass: max_rel < 1e-9 && mismatches == 0,
        detail: format!("{compared} steps, max relative gap {max_rel:.3e}, {mismatches} mismatches"),
    })
}

fn check_interval_fits(seed: u64) -> Result<CheckOutcome> {
    let mut max_rel = 0.0f64;
    let mut certified = 0usize;
    for t in 0..12u64 {
        let n = 10 + (t as usize * 7) % 40;
        let y = noise_series(seed.wrapping_add(200 + t), n, t % 2 == 1);
        let path = lars_path(&y, n - 1)?;
        let scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 1.0;
        for k in 0..path.steps.len().min(5) {
            let upper = path.steps[k].lambda;
            let lower = path
                .steps
                .get(k + 1)
                .map_or(path.trailing_lambda, |s| s.lambda);
            let mid = 0.5 * (upper + lower);
            let exact = flsa_certified(&y, mid)?;
            let ours = path.fitted_values(&y, mid)?;
            for (a, b) in exact.fitted.iter().zip(&ours) {
                max_rel = max_rel.max((a - b).abs() / scale);
            }
            certified += 1;
        }
    }
    Ok(CheckOutcome {
        name: "knot-interval fits carry optimality certificates",
        pass: max_rel < 1e-7,
        detail: format!("{certified} certified solves, max fit gap {max_rel:.3e}"),
    })
}

fn check_polyhedron(seed: u64) -> Result<CheckOutcome> {
    let mut max_knot_gap = 0.0f64;
    let mut max_pivot_gap = 0.0f64;
    let mut leave_rows = 0usize;
    let mut violations = 0usize;
    let mut steps = 0usize;
    for t in 0..6u64 {
        let y = noise_series(seed.wrapping_add(300 + t), 100, false);
        let path = lars_path(&y, 99)?;
        if matches!(path.termination, Termination::TieDetected { .. }) {
            continue;
        }
        let mut session = HitLeaveSession::new(&y, &path)?;
        let mut k = 0usize;
        while let Some(sys) = session.advance() {
            let sys = sys?;
            k += 1;
            let step = &path.steps[k - 1];
            let (upper, value, lower) = path.pivot_bounds(k)?;
            if !(sys.nu_minus - 1e-9 <= value && value <= sys.nu_plus + 1e-9) {
                violations += 1;
            }
            if sys.nu_zero_min < -1e-9 {
                violations += 1;
            }
            leave_rows += sys.leave_count;
            max_knot_gap = max_knot_gap.max((lower - sys.nu_minus).abs());
            let ours = fused_spacing::spacing_pivot(upper, value, lower, step.omega, 1.0)?;
            let polyhedral = sys.pivot_with_omega(1.0, step.omega)?;
            if !(0.0..=1.0).contains(&ours) {
                violations += 1;
            }
            max_pivot_gap = max_pivot_gap.max((ours - polyhedral).abs());
            steps += 1;
        }
    }
    Ok(CheckOutcome {
        name: "hit/leave polyhedron brackets the data",
        pass: max_knot_gap < 1e-9 && max_pivot_gap < 1e-13 && leave_rows == 0 && violations == 0,
        detail: format!(
            "{steps} steps, knot gap {max_knot_gap:.3e}, pivot gap {max_pivot_gap:.3e}, \
             {leave_rows} leave rows, {violations} bracket violations"
        ),
    })
}

/// Run the full battery of oracle cross-checks.
pub fn run_checks(seed: u64) -> Result<Vec<CheckOutcome>> {
    Ok(vec![
        check_exact_scan(seed)?,
        check_dense_route(seed)?,
        check_interval_fits(seed)?,
        check_polyhedron(seed)?,
    ])
}
