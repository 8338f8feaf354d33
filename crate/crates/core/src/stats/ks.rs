//! Kolmogorov-Smirnov test of a sample against Uniform(0,1).
//!
//! Used to check that p-values which should be uniform under the null
//! actually are. The p-value uses the asymptotic Kolmogorov series, which is
//! accurate for the sample sizes the experiments run at (hundreds and up).

/// One-sample KS result against the Uniform(0,1) CDF.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct KsResult {
    /// Sup-norm distance between the empirical CDF and the identity.
    pub statistic: f64,
    /// Asymptotic p-value P(sup |B(t)| > sqrt(n) * statistic).
    pub p_value: f64,
    /// Number of observations used.
    pub n: usize,
}

/// Two-sided KS test of `sample` against Uniform(0,1).
///
/// Values are clamped to [0, 1] before ranking; NaN is rejected by panic since
/// upstream pivots are already validated to be probabilities.
pub fn ks_uniform(sample: &[f64]) -> KsResult {
    assert!(!sample.is_empty(), "ks_uniform requires a nonempty sample");
    let mut xs: Vec<f64> = sample
        .iter()
        .map(|&v| {
            assert!(v.is_finite(), "ks_uniform got a non-finite value");
            v.clamp(0.0, 1.0)
        })
        .collect();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite after clamp"));
    let n = xs.len();
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let above = (i as f64 + 1.0) / nf - x;
        let below = x - i as f64 / nf;
        d = d.max(above).max(below);
    }
    KsResult {
        statistic: d,
        p_value: kolmogorov_sf(nf.sqrt() * d),
        n,
    }
}

/// Kolmogorov distribution survival function
/// Q(x) = 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2).
fn kolmogorov_sf(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100u32 {
        let jf = f64::from(j);
        let term = (-2.0 * jf * jf * x * x).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
