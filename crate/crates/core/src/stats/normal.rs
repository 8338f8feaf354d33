//! Standard-normal primitives tuned for tail-stable ratio work.
//!
//! The spacing pivot and the truncated-normal CDF are ratios of differences of
//! normal tail probabilities. Far in the tail the naive `cdf` differences
//! cancel catastrophically, so everything here is built on the survival
//! function and on the scaled complement `erfcx(x) = exp(x^2) * erfc(x)`,
//! which stays O(1/x) instead of underflowing.

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;
const FRAC_1_SQRT_2PI: f64 = 0.3989422804014327;

pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// P(Z <= x).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// P(Z > x); accurate to tiny values for large x.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / SQRT_2)
}

/// exp(x^2) * erfc(x) for x >= 0.
///
/// Small arguments use the direct product; beyond that a continued fraction
/// (modified Lentz) avoids the exp overflow that hits the direct form near
/// x = 26.6.
pub fn erfcx(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    if x < 4.0 {
        return (x * x).exp() * libm::erfc(x);
    }
    // erfcx(x) = (1/sqrt(pi)) * K with
    // K = 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + 2/(x + ...))))),
    // i.e. partial numerators 1, 1/2, 1, 3/2, 2, ... and denominators all x.
    let tiny = 1e-300;
    let mut f = tiny;
    let mut c = f;
    let mut d = 0.0;
    for i in 0..200u32 {
        let a = if i == 0 { 1.0 } else { 0.5 * f64::from(i) };
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 2.0 * f64::EPSILON {
            break;
        }
    }
    f / std::f64::consts::PI.sqrt()
}

/// ln P(Z > x), valid for all x (asymptotic-safe for large x).
pub fn normal_ln_sf(x: f64) -> f64 {
    if x == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    if x < 8.0 {
        normal_sf(x).ln()
    } else {
        // sf(x) = 0.5 * erfcx(x/sqrt2) * exp(-x^2/2)
        (0.5 * erfcx(x / SQRT_2)).ln() - 0.5 * x * x
    }
}

/// Inverse standard-normal CDF. Acklam's rational approximation polished with
/// one Halley step against the erfc-based CDF; relative error near machine
/// precision across (0, 1).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile requires p in (0,1), got {p}");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    // One Halley iteration: e = cdf(x) - p, step = e / pdf adjusted.
    let e = if x > 0.0 {
        (1.0 - p) - normal_sf(x)
    } else {
        normal_cdf(x) - p
    };
    let u = e / normal_pdf(x).max(f64::MIN_POSITIVE);
    x - u / (1.0 + 0.5 * x * u)
}

/// Neumaier compensated sum; used wherever prefix sums feed knot decisions.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
