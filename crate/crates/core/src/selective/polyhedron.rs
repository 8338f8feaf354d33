//! Polyhedral description of the selection event.
//!
//! The event "these cuts activated, in this order, with these signs" is an
//! intersection of half-spaces in data space. Decomposing the data along the
//! step-k test direction turns each half-space into a one-sided bound on the
//! statistic; the surviving interval is exactly the knot-to-knot truncation
//! that the spacing pivot uses. This module materializes the rows, classifies
//! them, and reproduces the truncation limits, giving an independent route to
//! the same pivot.
//!
//! Row ratios are computed with the same segment-scan kernel the path solver
//! uses, so agreement with the path's knots is exact where the algebra says
//! it should be; the dense direction (QR route) supplies the scale
//! independently.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::path::solver::{natural_candidate, segment_cut_stats, FusedPath};
use crate::selective::design::ActiveDesign;
use crate::stats::compensated_sum;

/// Dense reconstruction is refused above this many samples; the experiments
/// that need the polyhedron stay under the cap by design.
pub const POLYHEDRON_MAX_N: usize = 512;

/// Direction coefficients within this of zero make a row a pure feasibility
/// check (it does not bound the statistic).
const G_TOLERANCE: f64 = 1e-12;

/// Where a constraint row came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowProvenance {
    /// Knot ordering between consecutive steps: `lambda_to <= lambda_from`.
    Chain { from: usize, to: usize },
    /// The final knot is nonnegative.
    Nonnegativity,
    /// At the post-step-k state, the crossing of inactive `cut` on side
    /// `sign` has not happened yet.
    Envelope { cut: usize, sign: i8 },
}

/// One half-space of the selection event, projected onto the test direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolyRow {
    pub provenance: RowProvenance,
    /// Inner product of the row with the unit-statistic direction; positive
    /// rows cap the statistic from above, negative rows from below, zero rows
    /// must simply hold.
    pub direction_coefficient: f64,
    /// Constraint slack at the observed data; nonnegative when the event
    /// holds.
    pub slack: f64,
    /// The bound this row places on the statistic (absent for zero rows).
    pub ratio: Option<f64>,
}

/// The projected selection event for one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyhedralSystem {
    /// Step the system conditions through.
    pub k: usize,
    /// Sample count.
    pub n: usize,
    /// Observed statistic, the step-k knot.
    pub statistic: f64,
    /// The same statistic recomputed densely as `eta . y`.
    pub statistic_dense: f64,
    /// Norm of the dense test direction.
    pub eta_norm: f64,
    /// Contrast scale from the dense route, `1 / eta_norm`.
    pub omega_dense: f64,
    /// Upper truncation limit: tightest positive-coefficient row.
    pub nu_plus: f64,
    /// Lower truncation limit: tightest negative-coefficient row.
    pub nu_minus: f64,
    /// Smallest slack among zero-coefficient rows (infinite when none);
    /// must be nonnegative for the event to be correctly described.
    pub nu_zero_min: f64,
    /// Number of rows that bound the statistic from above other than the
    /// knot-ordering row; always zero in one dimension.
    pub leave_count: usize,
    /// Rows that actually pin the truncation: the ordering chain, the
    /// nonnegativity row, and the binding envelope row.
    pub reduced_len: usize,
    pub rows: Vec<PolyRow>,
}

impl PolyhedralSystem {
    /// Pivot evaluated from the polyhedral quantities: survival of the
    /// statistic in its truncated null, using the dense scale.
    pub fn pivot(&self, sigma: f64) -> Result<f64> {
        self.pivot_with_omega(sigma, self.omega_dense)
    }

    /// Same pivot with an explicitly supplied contrast scale.
    pub fn pivot_with_omega(&self, sigma: f64, omega: f64) -> Result<f64> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidInput(format!("omega must be positive, got {omega}")));
        }
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::InvalidSigma(format!("sigma must be positive, got {sigma}")));
        }
        crate::selective::truncated_normal_survival(
            self.statistic,
            0.0,
            sigma / omega,
            self.nu_minus,
            self.nu_plus,
        )
    }
}

fn validate_inputs(values: &[f64], path: &FusedPath) -> Result<()> {
    let n = path.n;
    if values.len() != n {
        return Err(Error::InvalidInput(format!(
            "got {} samples for a path built on {n}",
            values.len()
        )));
    }
    if n > POLYHEDRON_MAX_N {
        return Err(Error::CapExceeded(format!(
            "dense reconstruction is capped at {POLYHEDRON_MAX_N} samples, got {n}"
        )));
    }
    Ok(())
}

/// Build the projected selection event for step `k` of `path`.
pub fn hit_leave_polyhedron(values: &[f64], path: &FusedPath, k: usize) -> Result<PolyhedralSystem> {
    validate_inputs(values, path)?;
    if k == 0 || k > path.steps.len() {
        return Err(Error::StepOutOfRange { k, len: path.steps.len() });
    }
    let mut design = ActiveDesign::new(path.n)?;
    for step in &path.steps[..k - 1] {
        design.push(step.cut, step.sign)?;
    }
    build_system(values, path, k, &design)
}

/// Walks the systems for `k = 1, 2, ...` over one path, growing a single QR
/// factorization instead of rebuilding it per step. Yields exactly the same
/// systems as repeated [`hit_leave_polyhedron`] calls at a fraction of the
/// cost, which is what the replication studies need.
pub struct HitLeaveSession<'a> {
    values: &'a [f64],
    path: &'a FusedPath,
    design: ActiveDesign,
    next_k: usize,
}

impl<'a> HitLeaveSession<'a> {
    pub fn new(values: &'a [f64], path: &'a FusedPath) -> Result<Self> {
        validate_inputs(values, path)?;
        Ok(Self { values, path, design: ActiveDesign::new(path.n)?, next_k: 1 })
    }

    /// The system for the next step, or `None` past the last recorded step.
    pub fn advance(&mut self) -> Option<Result<PolyhedralSystem>> {
        if self.next_k > self.path.steps.len() {
            return None;
        }
        let k = self.next_k;
        let sys = build_system(self.values, self.path, k, &self.design);
        if sys.is_ok() {
            let step = &self.path.steps[k - 1];
            if let Err(e) = self.design.push(step.cut, step.sign) {
                return Some(Err(e));
            }
            self.next_k += 1;
        }
        Some(sys)
    }
}

/// Assemble rows and truncation limits for step `k`; `design` must hold the
/// active columns of steps `1..k`.
fn build_system(
    values: &[f64],
    path: &FusedPath,
    k: usize,
    design: &ActiveDesign,
) -> Result<PolyhedralSystem> {
    let n = path.n;
    let lambda_k = path.steps[k - 1].lambda;

    let mut rows = Vec::new();

    // Knot ordering: lambda_{i+1} <= lambda_i for recorded steps. Projected
    // onto the step-k direction, only the row ending at k has a coefficient;
    // earlier ones are orthogonal by construction.
    for to in 2..=k {
        let from = to - 1;
        let slack = path.steps[from - 1].lambda - path.steps[to - 1].lambda;
        if to < k {
            rows.push(PolyRow {
                provenance: RowProvenance::Chain { from, to },
                direction_coefficient: 0.0,
                slack,
                ratio: None,
            });
        } else {
            rows.push(PolyRow {
                provenance: RowProvenance::Chain { from, to },
                direction_coefficient: 1.0,
                slack,
                ratio: Some(path.steps[from - 1].lambda),
            });
        }
    }
    rows.push(PolyRow {
        provenance: RowProvenance::Nonnegativity,
        direction_coefficient: -1.0,
        slack: lambda_k,
        ratio: Some(0.0),
    });

    // Envelope rows at the post-step-k state: every inactive cut, on both
    // sides, has its crossing at or below the observed statistic. The natural
    // side reuses the solver's candidate kernel so that the binding ratio is
    // the same float the path would compute for the next knot.
    for seg in path.segments_at(k)? {
        segment_cut_stats(values, seg, |cut, cusum, interp| {
            for sign in [1i8, -1i8] {
                let coef = 1.0 - f64::from(sign) * interp;
                let slack = f64::from(sign) * cusum + coef * lambda_k;
                let ratio = if coef.abs() <= G_TOLERANCE {
                    None
                } else if cusum != 0.0 && sign == if cusum > 0.0 { -1 } else { 1 } {
                    natural_candidate(cut, cusum, interp).map(|c| c.lambda)
                } else {
                    Some(-f64::from(sign) * cusum / coef)
                };
                rows.push(PolyRow {
                    provenance: RowProvenance::Envelope { cut, sign },
                    direction_coefficient: -coef,
                    slack,
                    ratio,
                });
            }
        });
    }

    let mut nu_plus = f64::INFINITY;
    let mut nu_minus = f64::NEG_INFINITY;
    let mut nu_zero_min = f64::INFINITY;
    let mut leave_count = 0usize;
    let mut has_binding_envelope = false;
    let mut binding_envelope = f64::NEG_INFINITY;
    for row in &rows {
        let g = row.direction_coefficient;
        if g > G_TOLERANCE {
            if let Some(r) = row.ratio {
                if matches!(row.provenance, RowProvenance::Envelope { .. }) {
                    leave_count += 1;
                }
                if r < nu_plus {
                    nu_plus = r;
                }
            }
        } else if g < -G_TOLERANCE {
            if let Some(r) = row.ratio {
                if r > nu_minus {
                    nu_minus = r;
                }
                if matches!(row.provenance, RowProvenance::Envelope { .. }) && r > binding_envelope
                {
                    binding_envelope = r;
                    has_binding_envelope = true;
                }
            }
        } else {
            nu_zero_min = nu_zero_min.min(row.slack);
        }
    }

    // Dense route: test direction from the QR factorization of the active
    // design before step k.
    let step_k = &path.steps[k - 1];
    let dir = design.direction(step_k.cut, step_k.sign)?;
    let centered = crate::path::reparam::center(values);
    let statistic_dense =
        compensated_sum(dir.eta.iter().zip(&centered).map(|(a, b)| a * b));

    Ok(PolyhedralSystem {
        k,
        n,
        statistic: lambda_k,
        statistic_dense,
        eta_norm: dir.norm,
        omega_dense: 1.0 / dir.norm,
        nu_plus,
        nu_minus,
        nu_zero_min,
        leave_count,
        reduced_len: k + usize::from(has_binding_envelope),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::path::reparam::{center, design_column};
    use crate::path::solver::lars_path;
    use approx::assert_relative_eq;

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn toy_system_reproduces_trivial_truncation() {
        let y = [2.0, 2.0, 0.0, 0.0];
        let path = lars_path(&y, 4).unwrap();
        let sys = hit_leave_polyhedron(&y, &path, 1).unwrap();
        assert!(sys.nu_plus.is_infinite());
        assert_eq!(sys.nu_minus, path.trailing_lambda.max(0.0));
        assert_eq!(sys.leave_count, 0);
        assert_relative_eq!(sys.statistic_dense, 2.0, max_relative = 1e-12);
        assert_relative_eq!(sys.omega_dense, 1.0, max_relative = 1e-12);
        // pivot agrees with the direct spacing computation
        let t = sys.pivot(1.0).unwrap();
        let direct = crate::selective::spacing_pivot(f64::INFINITY, 2.0, sys.nu_minus, 1.0, 1.0)
            .unwrap();
        assert_relative_eq!(t, direct, max_relative = 1e-12);
    }

    #[test]
    fn truncation_limits_bitwise_match_path_knots() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0usize;
        for _ in 0..60 {
            let n = rng.gen_range(5..22);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.5..2.5)).collect();
            let path = lars_path(&y, n).unwrap();
            for k in 1..=path.steps.len() {
                let sys = hit_leave_polyhedron(&y, &path, k).unwrap();
                let (upper, value, lower) = path.pivot_bounds(k).unwrap();
                // same floats, not merely close: the polyhedron replays the
                // identical scan kernel
                assert_eq!(sys.nu_minus, lower.max(0.0), "k={k} n={n}");
                if k > 1 {
                    assert_eq!(sys.nu_plus, upper);
                } else {
                    assert!(sys.nu_plus.is_infinite());
                }
                assert_eq!(sys.statistic, value);
                assert_eq!(sys.leave_count, 0);
                assert!(sys.nu_zero_min >= -1e-9);
                for row in &sys.rows {
                    assert!(row.slack >= -1e-7 * (1.0 + value), "slack {}", row.slack);
                }
                // dense route agreement at analytical tolerance
                assert_relative_eq!(
                    sys.statistic_dense,
                    value,
                    max_relative = 1e-9,
                    epsilon = 1e-12
                );
                assert_relative_eq!(
                    sys.omega_dense,
                    path.steps[k - 1].omega,
                    max_relative = 1e-9
                );
                checked += 1;
            }
        }
        assert!(checked > 100, "only {checked} step systems exercised");
    }

    #[test]
    fn rows_match_their_dense_half_space_form() {
        // rebuild each row's constraint vector explicitly and verify the
        // projected coefficient, the slack, and the bound it implies
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let n = rng.gen_range(6..14);
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let path = lars_path(&y, 4).unwrap();
            let yc = center(&y);
            for k in 1..=path.steps.len() {
                let sys = hit_leave_polyhedron(&y, &path, k).unwrap();
                // dense directions for every step prefix
                let mut dirs = Vec::new();
                let mut design = ActiveDesign::new(n).unwrap();
                for step in &path.steps[..k] {
                    dirs.push(design.direction(step.cut, step.sign).unwrap());
                    design.push(step.cut, step.sign).unwrap();
                }
                let eta = &dirs[k - 1].eta;
                let ne2 = dot(eta, eta);
                let u = dot(eta, &yc);
                let equi = design_prefix_equiangular(&path, k, n);
                for row in &sys.rows {
                    let a: Vec<f64> = match row.provenance {
                        RowProvenance::Chain { from, to } => dirs[to - 1]
                            .eta
                            .iter()
                            .zip(&dirs[from - 1].eta)
                            .map(|(t, f)| t - f)
                            .collect(),
                        RowProvenance::Nonnegativity => eta.iter().map(|v| -v).collect(),
                        RowProvenance::Envelope { cut, sign } => {
                            let xj = design_column(n, cut);
                            let w = design.project_out(&xj);
                            let h = dot(&xj, &equi);
                            let coef = 1.0 - f64::from(sign) * h;
                            (0..n)
                                .map(|i| f64::from(sign) * w[i] - coef * eta[i])
                                .collect()
                        }
                    };
                    let g_dense = dot(&a, eta) / ne2;
                    let slack_dense = -dot(&a, &yc);
                    assert_relative_eq!(
                        g_dense,
                        row.direction_coefficient,
                        max_relative = 1e-7,
                        epsilon = 1e-8
                    );
                    assert_relative_eq!(row.slack, slack_dense, max_relative = 1e-7, epsilon = 1e-8);
                    if g_dense.abs() > 1e-6 {
                        let lee_ratio = u + slack_dense / g_dense;
                        assert_relative_eq!(
                            lee_ratio,
                            row.ratio.expect("nonzero row has a ratio"),
                            max_relative = 1e-6,
                            epsilon = 1e-8
                        );
                    }
                }
            }
        }
    }

    // Equiangular vector of the active set before step k via the closed
    // per-segment form, for rebuilding envelope rows independently.
    fn design_prefix_equiangular(path: &FusedPath, k: usize, n: usize) -> Vec<f64> {
        let mut design = ActiveDesign::new(n).unwrap();
        for step in &path.steps[..k] {
            design.push(step.cut, step.sign).unwrap();
        }
        design.equiangular()
    }

    #[test]
    fn session_reproduces_from_scratch_systems_exactly() {
        let y = [0.4, -1.1, 0.9, 2.3, -0.2, 0.0, 1.7, -2.4];
        let path = lars_path(&y, y.len()).unwrap();
        let mut session = HitLeaveSession::new(&y, &path).unwrap();
        let mut seen = 0usize;
        while let Some(sys) = session.advance() {
            let sys = sys.unwrap();
            let scratch = hit_leave_polyhedron(&y, &path, sys.k).unwrap();
            assert_eq!(sys, scratch);
            seen += 1;
        }
        assert_eq!(seen, path.steps.len());
    }

    #[test]
    fn cap_and_range_errors() {
        let y = vec![0.0; POLYHEDRON_MAX_N + 1];
        let mut y = y;
        y[0] = 1.0;
        let path = lars_path(&y, 1).unwrap();
        assert!(matches!(
            hit_leave_polyhedron(&y, &path, 1),
            Err(Error::CapExceeded(_))
        ));
        let y2 = [2.0, 2.0, 0.0, 0.0];
        let path2 = lars_path(&y2, 4).unwrap();
        assert!(hit_leave_polyhedron(&y2, &path2, 2).is_err());
        assert!(hit_leave_polyhedron(&y2, &path2, 0).is_err());
    }
}
