//! Closed-form exponential tilts of a Poisson variable.
//!
//! With `Z ~ Poisson(μ)` and `M(λ) = E[e^{-λZ}] = exp(μ(e^{-λ} - 1))`:
//!
//! * `f(λ) = E[(Z-h0)^2 e^{-λ(Z-h0)}]`
//! * `g(λ) = Var[(Z-h0) e^{-λ(Z-h0)}]`
//!
//! and the root of `E[(Z-h0) e^{-λ(Z-h0)}]` is `λ° = log(μ/h0)`. The
//! asymptotic variance of the sparse-regime multiplier is `g(λ°)/f(λ°)^2`.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonTilt {
    mu: f64,
    h0: f64,
}

impl PoissonTilt {
    pub fn new(mu: f64, h0: f64) -> Result<Self> {
        for v in [mu, h0] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain { value: v, domain: "(0, inf)" });
            }
        }
        Ok(Self { mu, h0 })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }
}

/// `E[e^{-λZ}] = exp(μ(e^{-λ} - 1))`.
pub fn tilted_mgf(mu: f64, lambda: f64) -> f64 {
    (mu * (-lambda).exp_m1()).exp()
}

/// `(E[Z e^{-λZ}], E[Z^2 e^{-λZ}])`.
pub fn tilted_moments(mu: f64, lambda: f64) -> (f64, f64) {
    let m = tilted_mgf(mu, lambda);
    let a = mu * (-lambda).exp();
    (a * m, (a + a * a) * m)
}

/// `E[(Z-h0) e^{-λ(Z-h0)}] = e^{λh0} M(λ) (μe^{-λ} - h0)`.
pub fn centered_tilt_mean(tilt: &PoissonTilt, lambda: f64) -> f64 {
    let (mu, h0) = (tilt.mu, tilt.h0);
    // fold e^{λh0} into the exponent of M(λ)
    (lambda * h0 + mu * (-lambda).exp_m1()).exp() * (mu * (-lambda).exp() - h0)
}

/// `f(λ) = e^{λh0} M(λ) [μe^{-λ} + μ²e^{-2λ} - 2h0μe^{-λ} + h0²]`.
pub fn centered_tilt_moment2(tilt: &PoissonTilt, lambda: f64) -> f64 {
    let (mu, h0) = (tilt.mu, tilt.h0);
    let a = mu * (-lambda).exp();
    (lambda * h0 + mu * (-lambda).exp_m1()).exp() * (a + a * a - 2.0 * h0 * a + h0 * h0)
}

/// `g(λ) = E[Y²] - E[Y]²` with `Y = (Z-h0) e^{-λ(Z-h0)}`, where
/// `E[Y²] = e^{2λh0} M(2λ) [μe^{-2λ} + μ²e^{-4λ} - 2h0μe^{-2λ} + h0²]`.
pub fn centered_tilt_variance(tilt: &PoissonTilt, lambda: f64) -> f64 {
    let (mu, h0) = (tilt.mu, tilt.h0);
    let b = mu * (-2.0 * lambda).exp();
    let second = (2.0 * lambda * h0 + mu * (-2.0 * lambda).exp_m1()).exp() * (b + b * b - 2.0 * h0 * b + h0 * h0);
    let first = centered_tilt_mean(tilt, lambda);
    second - first * first
}

/// `λ° = log(μ/h0)`, the root of [`centered_tilt_mean`].
pub fn lambda_star(tilt: &PoissonTilt) -> f64 {
    (tilt.mu / tilt.h0).ln()
}

/// `g(λ°) / f(λ°)²`.
pub fn asymptotic_variance(tilt: &PoissonTilt, lambda_star: f64) -> Result<f64> {
    if !lambda_star.is_finite() {
        return Err(Error::Domain { value: lambda_star, domain: "finite reals" });
    }
    let f = centered_tilt_moment2(tilt, lambda_star);
    Ok(centered_tilt_variance(tilt, lambda_star) / (f * f))
}
