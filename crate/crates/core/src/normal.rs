//! Standard normal distribution function and quantiles.
//!
//! The quantile starts from Acklam's rational approximation (relative error
//! below 1.2e-9) and takes one Halley step against the `erfc`-based
//! distribution function, which brings the error to near machine precision.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

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
    -2.549671010115819e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
const D: [f64; 4] = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00, 3.754408661907416e+00];
const P_LOW: f64 = 0.02425;

/// `Φ(x)`.
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// `1 - Φ(x)`, accurate in the upper tail.
pub fn sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * core::f64::consts::PI).sqrt()
}

/// `Φ^{-1}(p)` for `p` in `(0, 1)`.
pub fn quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain { value: p, domain: "(0, 1)" });
    }
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
    // Halley refinement; work in the tail where the residual is best resolved
    let e = if x > 0.0 { (1.0 - p) - sf(x) } else { cdf(x) - p };
    let u = e * (2.0 * core::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    Ok(x - u / (1.0 + 0.5 * x * u))
}

/// Upper-tail critical value `z_α = Φ^{-1}(1 - α)`.
pub fn upper_quantile(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain { value: alpha, domain: "(0, 1)" });
    }
    // -Φ^{-1}(α) keeps precision for small α
    Ok(-quantile(alpha)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    // 40-digit reference values
    const Z95: f64 = 1.644853626951472284276315603538939202588;
    const Z975: f64 = 1.959963984540053855604430649826643177289;
    const Z99: f64 = 2.326347874040840767637189236888376811255;

    #[test]
    fn reference_quantiles() {
        assert!((upper_quantile(0.05).unwrap() - Z95).abs() < 1e-12);
        assert!((upper_quantile(0.025).unwrap() - Z975).abs() < 1e-12);
        assert!((upper_quantile(0.01).unwrap() - Z99).abs() < 1e-12);
        assert!((quantile(0.5).unwrap()).abs() < 1e-15);
        assert!((quantile(0.05).unwrap() + Z95).abs() < 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for k in 1..2000 {
            let p = k as f64 / 2000.0;
            let x = quantile(p).unwrap();
            assert!((cdf(x) - p).abs() < 1e-14, "p={p}");
        }
        for p in [1e-12, 1e-8, 1e-5, 1e-3] {
            let x = quantile(p).unwrap();
            assert!((cdf(x) / p - 1.0).abs() < 1e-9, "p={p}");
            let y = upper_quantile(p).unwrap();
            assert!((sf(y) / p - 1.0).abs() < 1e-9, "p={p}");
        }
    }

    #[test]
    fn domain() {
        assert!(quantile(0.0).is_err());
        assert!(quantile(1.0).is_err());
        assert!(upper_quantile(f64::NAN).is_err());
        assert_eq!(cdf(0.0), 0.5);
        assert!((cdf(1.0) + sf(1.0) - 1.0).abs() < 1e-16);
        assert!((pdf(0.0) - 0.3989422804014327).abs() < 1e-16);
    }
}
