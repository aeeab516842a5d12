//! The constant-graphon variational problem behind the dense-regime tests.
//!
//! For an ERGM with coefficients `β` and a motif `H` the tilted free energy is
//!
//! ```text
//! G(λ) = sup_{u ∈ [0,1]}  -λ u^{e(H)}/|Aut(H)| + Σ_k β_k u^{e(T_k)} - I(u)/2
//! ```
//!
//! with `I(u) = u log u + (1-u) log(1-u)`. The limit function is
//! `𝔤(λ) = λ p0^{e(H)}/|Aut(H)| + G(λ) - G(0)`, which is convex with
//! derivative `(p0^e - u*(λ)^e)/|Aut|`.

use alloc::boxed::Box;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motif::Motif;
use crate::sampler::{subcritical_check, ErgmTerms};

pub const GRID_POINTS: usize = 10_001;
pub const U_CLAMP: f64 = 1e-12;
/// Two local maxima closer than this in value are reported as a near tie.
pub const TIE_TOL: f64 = 1e-6;
/// Largest `|λ|` searched for the critical point of `𝔤`.
pub const LAMBDA_BOUND: f64 = 1e3;
pub const LAMBDA_TOL: f64 = 1e-10;
/// `|u*^e - p0^e|` below this makes the sharp-rate constant degenerate.
pub const DEGENERATE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationalModel {
    terms: ErgmTerms,
    motif: Motif,
    p0: f64,
}

impl VariationalModel {
    /// Refuses non-subcritical coefficients and `p0` outside `(0, 1)`.
    pub fn new(terms: ErgmTerms, motif: Motif, p0: f64) -> Result<Self> {
        if !(p0 > 0.0 && p0 < 1.0) {
            return Err(Error::Domain { value: p0, domain: "(0, 1)" });
        }
        let report = subcritical_check(&terms)?;
        if !report.is_subcritical {
            return Err(Error::NotSubcritical(Box::new(report)));
        }
        Ok(Self { terms, motif, p0 })
    }

    pub fn terms(&self) -> &ErgmTerms {
        &self.terms
    }

    pub fn motif(&self) -> &Motif {
        &self.motif
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    fn motif_power(&self, u: f64) -> f64 {
        u.powi(self.motif.edge_count() as i32) / self.motif.aut() as f64
    }

    /// Derivative of the objective in `u` and its second derivative.
    fn first_order(&self, lambda: f64, u: f64) -> (f64, f64) {
        let e = self.motif.edge_count() as i32;
        let aut = self.motif.aut() as f64;
        let d = -lambda * e as f64 * u.powi(e - 1) / aut + self.terms.phi_big(u) - 0.5 * (u / (1.0 - u)).ln();
        let dd = -lambda * (e * (e - 1)) as f64 * u.powi(e - 2) / aut + self.terms.phi_big_prime(u)
            - 0.5 / (u * (1.0 - u));
        (d, dd)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariationalResult {
    pub u_star: f64,
    pub value: f64,
    /// A second local maximum lies within [`TIE_TOL`] of the best value.
    pub multiplicity_flag: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SharpRate {
    Value(f64),
    Degenerate,
}

/// `I(u) = u log u + (1-u) log(1-u)`, with `I(0) = I(1) = 0`.
pub fn entropy_i(u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain { value: u, domain: "[0, 1]" });
    }
    Ok(xlogx(u) + xlogx(1.0 - u))
}

fn xlogx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `-λ u^{e(H)}/|Aut(H)| + Σ β_k u^{e(T_k)} - I(u)/2`.
pub fn objective(lambda: f64, u: f64, model: &VariationalModel) -> Result<f64> {
    let i = entropy_i(u)?;
    let ergm: f64 = model.terms.terms().iter().map(|(t, b)| b * u.powi(t.edge_count() as i32)).sum();
    Ok(-lambda * model.motif_power(u) + ergm - 0.5 * i)
}

/// Global maximizer of [`objective`] over `[0, 1]`.
///
/// Every local maximum of a 10001-point grid is polished by safeguarded
/// Newton on the first-order condition; the best one wins.
pub fn maximize_u(lambda: f64, model: &VariationalModel) -> VariationalResult {
    let h = 1.0 / (GRID_POINTS - 1) as f64;
    let vals: Vec<f64> = (0..GRID_POINTS)
        .map(|k| objective(lambda, k as f64 * h, model).unwrap_or(f64::NEG_INFINITY))
        .collect();
    let last = GRID_POINTS - 1;
    let mut maxima: Vec<(f64, f64)> = Vec::new();
    for k in 0..GRID_POINTS {
        let left = k == 0 || vals[k] >= vals[k - 1];
        let right = k == last || vals[k] > vals[k + 1];
        if left && right {
            let lo = (k.saturating_sub(1) as f64 * h).max(U_CLAMP);
            let hi = ((k + 1).min(last) as f64 * h).min(1.0 - U_CLAMP);
            let u = polish(lambda, model, lo, hi);
            let v = objective(lambda, u, model).unwrap_or(f64::NEG_INFINITY);
            maxima.push((u, v));
        }
    }
    let best = maxima.iter().copied().fold((0.5, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let multiplicity_flag = maxima.iter().filter(|&&(u, v)| (u - best.0).abs() > h && best.1 - v <= TIE_TOL).count() > 0;
    VariationalResult { u_star: best.0, value: best.1, multiplicity_flag }
}

/// Root of the first-order condition in `[lo, hi]`; falls back to the
/// better endpoint when the derivative does not change sign there.
fn polish(lambda: f64, model: &VariationalModel, mut lo: f64, mut hi: f64) -> f64 {
    let d = |u: f64| model.first_order(lambda, u);
    let (dlo, _) = d(lo);
    let (dhi, _) = d(hi);
    if dlo <= 0.0 {
        return lo;
    }
    if dhi >= 0.0 {
        return hi;
    }
    let mut u = 0.5 * (lo + hi);
    for _ in 0..100 {
        let (g, gp) = d(u);
        if g == 0.0 {
            return u;
        }
        if g > 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        let step = u - g / gp;
        let next = if gp < 0.0 && step > lo && step < hi { step } else { 0.5 * (lo + hi) };
        if (next - u).abs() <= 1e-15 * u.max(1e-300) || hi - lo <= 1e-16 {
            return next;
        }
        u = next;
    }
    u
}

/// `𝔤(λ) = λ p0^e/|Aut| + G(λ) - G(0)`.
pub fn g_of_lambda(lambda: f64, model: &VariationalModel) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    lambda * model.motif_power(model.p0) + maximize_u(lambda, model).value - maximize_u(0.0, model).value
}

/// `𝔤'(λ) = (p0^e - u*(λ)^e)/|Aut|`.
pub fn g_prime(lambda: f64, model: &VariationalModel) -> f64 {
    model.motif_power(model.p0) - model.motif_power(maximize_u(lambda, model).u_star)
}

/// The unique critical point `λ°` of `𝔤`, by bisection on its increasing
/// derivative.
pub fn lambda_circ(model: &VariationalModel) -> Result<f64> {
    let (mut lo, mut hi) = (-1.0, 1.0);
    while g_prime(lo, model) > 0.0 {
        if lo <= -LAMBDA_BOUND {
            return Err(Error::NoCriticalPoint { bound: LAMBDA_BOUND });
        }
        hi = lo;
        lo = (2.0 * lo).max(-LAMBDA_BOUND);
    }
    while g_prime(hi, model) < 0.0 {
        if hi >= LAMBDA_BOUND {
            return Err(Error::NoCriticalPoint { bound: LAMBDA_BOUND });
        }
        lo = hi;
        hi = (2.0 * hi).min(LAMBDA_BOUND);
    }
    while hi - lo > LAMBDA_TOL {
        let mid = 0.5 * (lo + hi);
        let g = g_prime(mid, model);
        if g == 0.0 {
            return Ok(mid);
        }
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `1 / ((u*^e - p0^e)/|Aut|)` with `u* = u*(λ°)`; requires `λ° < 0`.
pub fn sharp_rate_constant(model: &VariationalModel, lambda_circ: f64) -> Result<SharpRate> {
    if !(lambda_circ < 0.0) {
        return Err(Error::UnsupportedRegime("sharp-rate constant needs a negative critical point".into()));
    }
    let u = maximize_u(lambda_circ, model).u_star;
    Ok(sharp_rate_from(u, model.p0, &model.motif))
}

/// The sharp-rate formula evaluated at explicit `u*` and `p0`.
pub fn sharp_rate_from(u_star: f64, p0: f64, motif: &Motif) -> SharpRate {
    let e = motif.edge_count() as i32;
    let diff = u_star.powi(e) - p0.powi(e);
    if diff.abs() < DEGENERATE_TOL {
        SharpRate::Degenerate
    } else {
        SharpRate::Value(motif.aut() as f64 / diff)
    }
}
