//! Change-of-variables for the 1D fused lasso.
//!
//! The fused lasso penalizes first differences of the fitted sequence. The
//! solver works in a transformed design where each candidate cut position
//! `c` (a boundary between samples `c-1` and `c`, `1 <= c <= n-1`) owns one
//! centered column. Everything downstream only ever needs three closed forms:
//! the column itself, its squared norm, and pairwise inner products, so no
//! matrix is materialized.

/// First-difference operator on a length-`n` sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DifferenceOperator {
    n: usize,
}

impl DifferenceOperator {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "difference operator needs at least 2 samples");
        Self { n }
    }

    /// Number of difference rows, `n - 1`.
    pub fn nrows(&self) -> usize {
        self.n - 1
    }

    /// (D mu)_c = mu[c] - mu[c-1] for cuts c = 1..n-1, indexed from 0 in the
    /// output.
    pub fn apply(&self, mu: &[f64]) -> Vec<f64> {
        assert_eq!(mu.len(), self.n);
        mu.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// D^T u for a dual vector of length `n - 1`.
    pub fn transpose_apply(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.n - 1);
        let mut out = vec![0.0; self.n];
        for (c, &uc) in u.iter().enumerate() {
            out[c] -= uc;
            out[c + 1] += uc;
        }
        out
    }
}

/// Subtract the mean. The transformed problem is fit on centered data; the
/// mean reenters only when reconstructing fitted values.
pub fn center(values: &[f64]) -> Vec<f64> {
    let mean = crate::stats::compensated_sum(values.iter().copied()) / values.len() as f64;
    values.iter().map(|v| v - mean).collect()
}

/// Centered design column for cut `c` in a length-`n` problem:
/// entries `-(n-c)/n` for rows before the cut and `c/n` after. The column is
/// the centered step function that a unit jump at `c` produces.
pub fn design_column(n: usize, cut: usize) -> Vec<f64> {
    assert!(n >= 2 && cut >= 1 && cut < n, "cut {cut} out of range for n={n}");
    let nf = n as f64;
    let lo = -((n - cut) as f64) / nf;
    let hi = cut as f64 / nf;
    (0..n).map(|i| if i < cut { lo } else { hi }).collect()
}

/// Squared norm of the column for cut `c`: `c (n - c) / n`.
pub fn design_column_norm_sq(n: usize, cut: usize) -> f64 {
    assert!(n >= 2 && cut >= 1 && cut < n);
    (cut * (n - cut)) as f64 / n as f64
}

/// Inner product of the columns for cuts `a` and `b`:
/// `min(a,b) * (n - max(a,b)) / n`, the Brownian-bridge covariance kernel on
/// the integer grid.
pub fn design_inner_product(n: usize, a: usize, b: usize) -> f64 {
    assert!(n >= 2 && a >= 1 && a < n && b >= 1 && b < n);
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    (lo * (n - hi)) as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn center_matches_hand_values() {
        let c = center(&[0.3, -1.2, 4.0]);
        assert_relative_eq!(c[0], -0.733_333_333_333_333_4, max_relative = 1e-14);
        assert_relative_eq!(c[1], -2.233_333_333_333_333_4, max_relative = 1e-14);
        assert_relative_eq!(c[2], 2.966_666_666_666_666_7, max_relative = 1e-14);
        let s: f64 = c.iter().sum();
        assert!(s.abs() < 1e-15);
    }

    #[test]
    fn design_columns_n4() {
        assert_eq!(design_column(4, 1), vec![-0.75, 0.25, 0.25, 0.25]);
        assert_eq!(design_column(4, 2), vec![-0.5, -0.5, 0.5, 0.5]);
        assert_eq!(design_column(4, 3), vec![-0.25, -0.25, -0.25, 0.75]);
    }

    #[test]
    fn norms_and_inner_products_match_explicit_columns() {
        let n = 9;
        for a in 1..n {
            let ca = design_column(n, a);
            let explicit: f64 = ca.iter().map(|v| v * v).sum();
            assert_relative_eq!(design_column_norm_sq(n, a), explicit, max_relative = 1e-13);
            for b in 1..n {
                let cb = design_column(n, b);
                let dot: f64 = ca.iter().zip(&cb).map(|(x, y)| x * y).sum();
                assert_relative_eq!(design_inner_product(n, a, b), dot, max_relative = 1e-13, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn columns_are_centered_unit_jumps() {
        let n = 7;
        for c in 1..n {
            let col = design_column(n, c);
            let sum: f64 = col.iter().sum();
            assert!(sum.abs() < 1e-14);
            // jump of exactly 1 at the cut, flat elsewhere
            for i in 1..n {
                let d = col[i] - col[i - 1];
                if i == c {
                    assert_relative_eq!(d, 1.0, max_relative = 1e-14);
                } else {
                    assert!(d.abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn difference_operator_round_trip() {
        let op = DifferenceOperator::new(5);
        let mu = [1.0, 1.0, 3.0, 0.0, 0.0];
        assert_eq!(op.apply(&mu), vec![0.0, 2.0, -3.0, 0.0]);
        let u = [1.0, -2.0, 0.5, 0.0];
        let dt = op.transpose_apply(&u);
        // <D mu, u> == <mu, D^T u>
        let lhs: f64 = op.apply(&mu).iter().zip(&u).map(|(a, b)| a * b).sum();
        let rhs: f64 = mu.iter().zip(&dt).map(|(a, b)| a * b).sum();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-14);
    }
}
