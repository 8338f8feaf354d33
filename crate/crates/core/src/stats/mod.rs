//! Shared numerical statistics: normal tail machinery and a KS uniformity
//! check used by the calibration experiments.

pub mod ks;
pub mod normal;

pub use ks::{ks_uniform, KsResult};
pub use normal::{
    compensated_sum, erfcx, normal_cdf, normal_ln_sf, normal_pdf, normal_quantile, normal_sf,
};

/// Robust sigma estimate from first differences: median absolute deviation of
/// y_{i+1} - y_i, scaled by the normal MAD constant and by sqrt(2) because a
/// difference of two independent N(0, sigma^2) values has variance 2 sigma^2.
pub fn estimate_sigma_mad(values: &[f64]) -> crate::error::Result<f64> {
    if values.len() < 3 {
        return Err(crate::error::Error::InvalidInput(
            "sigma estimation needs at least 3 observations".into(),
        ));
    }
    let mut diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let med = median_in_place(&mut diffs);
    let mut dev: Vec<f64> = diffs.iter().map(|d| (d - med).abs()).collect();
    let mad = median_in_place(&mut dev);
    // 0.6744898 is the normal quartile Phi^{-1}(0.75)
    let sigma = mad / (0.674_489_8 * std::f64::consts::SQRT_2);
    if sigma <= 0.0 || !sigma.is_finite() {
        return Err(crate::error::Error::InvalidSigma(format!(
            "estimated sigma {sigma} is not positive; signal may be piecewise constant with no noise"
        )));
    }
    Ok(sigma)
}

fn median_in_place(xs: &mut [f64]) -> f64 {
    let n = xs.len();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sigma_mad_on_known_diffs() {
        // diffs of (0, 1, -1, 2): (1, -2, 3); median 1; |d - 1| = (0, 3, 2); MAD 2
        let v = [0.0, 1.0, -1.0, 2.0];
        let s = estimate_sigma_mad(&v).unwrap();
        assert_relative_eq!(s, 2.0 / (0.674_489_8 * std::f64::consts::SQRT_2), max_relative = 1e-12);
    }

    #[test]
    fn sigma_mad_rejects_constant_signal() {
        assert!(estimate_sigma_mad(&[1.0, 1.0, 1.0, 1.0]).is_err());
        assert!(estimate_sigma_mad(&[1.0, 2.0]).is_err());
    }
}
