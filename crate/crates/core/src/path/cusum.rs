//! Cumulative-sum statistics of residuals.
//!
//! For centered data the transformed design reduces correlation bookkeeping
//! to prefix sums: the column for cut `c` has inner product `-C(c)` with any
//! zero-sum vector, where `C(c)` is the prefix sum through position `c - 1`.

/// Prefix sums `C(c) = sum_{i < c} r[i]` for cuts `c = 1..n-1`.
///
/// Output index `c - 1` holds `C(c)`. Sums are compensated so that knot
/// comparisons downstream are not at the mercy of cancellation.
pub fn cusum(residual: &[f64]) -> Vec<f64> {
    assert!(residual.len() >= 2);
    let mut out = Vec::with_capacity(residual.len() - 1);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &v in &residual[..residual.len() - 1] {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        out.push(sum + comp);
    }
    out
}

/// Residual after removing segment means.
///
/// `cuts` lists active boundaries (each `c` splits positions `c-1 | c`),
/// must be strictly increasing and inside `1..len`. With no cuts this equals
/// centering.
pub fn segment_residual(values: &[f64], cuts: &[usize]) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 1);
    let mut out = vec![0.0; n];
    let mut start = 0usize;
    let bounds = cuts.iter().copied().chain(std::iter::once(n));
    for end in bounds {
        assert!(end > start && end <= n, "cuts must be strictly increasing and in range");
        let seg = &values[start..end];
        let mean = crate::stats::compensated_sum(seg.iter().copied()) / seg.len() as f64;
        for i in start..end {
            out[i] = values[i] - mean;
        }
        start = end;
    }
    out
}
