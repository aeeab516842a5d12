//! The Lagrange multiplier of the entropy-maximization problem
//!
//! ```text
//! max -Σ w_i log w_i   s.t.  Σ w_i h_i = 0,  Σ w_i = 1,  w_i >= 0
//! ```
//!
//! is the unique root of `Σ h_i exp(-λ h_i) = 0`, which exists exactly when the
//! centered counts `h_i` take both signs. The solver works on the log of the
//! positive and negative parts so that counts of order 1e7 never overflow:
//!
//! ```text
//! g(λ) = LSE{ log h_i - λ h_i : h_i > 0 } - LSE{ log(-h_i) - λ h_i : h_i < 0 }
//! ```
//!
//! `g` is strictly decreasing and shares its root with the raw equation.

use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BRACKET_REL_WIDTH: f64 = 1e-12;
pub const MAX_BISECTIONS: u32 = 200;
pub const RESIDUAL_TOL: f64 = 1e-9;
const MAX_DOUBLINGS: u32 = 1100;

/// Centered sample `h_i = count_i - h0` with a positive scale `s`
/// (`1` for fixed-size and sparse tests, `m^{v(H)-2}` for dense ones).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteredCounts {
    values: Vec<f64>,
    h0: f64,
    scale: f64,
}

impl CenteredCounts {
    pub fn new(values: Vec<f64>, h0: f64, scale: f64) -> Result<Self> {
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain { value: bad, domain: "finite reals" });
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain { value: scale, domain: "(0, inf)" });
        }
        if !h0.is_finite() {
            return Err(Error::Domain { value: h0, domain: "finite reals" });
        }
        Ok(Self { values, h0, scale })
    }

    /// Centers raw counts at `h0`.
    pub fn from_counts(counts: &[f64], h0: f64, scale: f64) -> Result<Self> {
        Self::new(counts.iter().map(|c| c - h0).collect(), h0, scale)
    }

    /// Already-centered values with `h0 = 0` and unit scale.
    pub fn unit(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 0.0, 1.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeasibilityStatus {
    /// `min h < 0 < max h`: a unique finite root exists.
    Feasible,
    /// Every value is zero: every λ is a root.
    AllZero,
    /// No negative value (and not all zero): the root equation has no solution.
    AllNonNegative,
    /// No positive value (and not all zero).
    AllNonPositive,
}

impl fmt::Display for FeasibilityStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Feasible => "feasible",
            Self::AllZero => "all-zero",
            Self::AllNonNegative => "all-non-negative",
            Self::AllNonPositive => "all-non-positive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangeSolution {
    pub lambda_hat: f64,
    pub status: FeasibilityStatus,
    pub bracket: (f64, f64),
    /// Split log-sum-exp objective evaluated at `lambda_hat`.
    pub residual: f64,
    /// Magnitude of the two log-sum-exp terms; `|residual|` is compared to
    /// `RESIDUAL_TOL` times this.
    pub objective_scale: f64,
    pub iterations: u32,
}

impl LagrangeSolution {
    pub fn residual_within_tolerance(&self) -> bool {
        self.residual.abs() <= RESIDUAL_TOL * self.objective_scale
    }
}

pub fn feasibility(h: &CenteredCounts) -> Result<FeasibilityStatus> {
    classify(h.values(), None)
}

fn classify(values: &[f64], weights: Option<&[f64]>) -> Result<FeasibilityStatus> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut neg = false;
    let mut pos = false;
    for (i, &v) in values.iter().enumerate() {
        if weights.is_some_and(|w| w[i] <= 0.0) {
            continue;
        }
        neg |= v < 0.0;
        pos |= v > 0.0;
    }
    Ok(match (neg, pos) {
        (true, true) => FeasibilityStatus::Feasible,
        (false, false) => FeasibilityStatus::AllZero,
        (false, true) => FeasibilityStatus::AllNonNegative,
        (true, false) => FeasibilityStatus::AllNonPositive,
    })
}

/// Root of `Σ h_i exp(-λ h_i) = 0`.
///
/// `AllZero` input returns `λ = 0` flagged as such; one-signed input is a
/// [`Error::NoRoot`].
pub fn solve_root(h: &CenteredCounts) -> Result<LagrangeSolution> {
    solve_impl(h.values(), None)
}

/// Root of the population equation `Σ_a p_a h_a exp(-λ h_a) = 0` for a
/// distribution with support `values` and probabilities `probs`.
pub fn solve_root_weighted(values: &[f64], probs: &[f64]) -> Result<LagrangeSolution> {
    if values.len() != probs.len() {
        return Err(Error::InvalidParameter("values and probabilities differ in length".into()));
    }
    if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidParameter("probabilities must be finite and non-negative".into()));
    }
    solve_impl(values, Some(probs))
}

/// Critical point of `(1/n) Σ exp(-λ h_i / s)`, i.e. `s` times [`solve_root`].
pub fn solve_root_scaled(h: &CenteredCounts) -> Result<LagrangeSolution> {
    let s = h.scale();
    let mut sol = solve_root(h)?;
    sol.lambda_hat *= s;
    sol.bracket = (sol.bracket.0 * s, sol.bracket.1 * s);
    Ok(sol)
}

/// Maximum-entropy weights `w_i ∝ exp(-λ h_i)`, normalized to sum to one.
pub fn weights(h: &CenteredCounts, lambda_hat: f64) -> Vec<f64> {
    let exps: Vec<f64> = h.values().iter().map(|v| -lambda_hat * v).collect();
    let lse = log_sum_exp(exps.iter().copied());
    exps.iter().map(|e| (e - lse).exp()).collect()
}

/// Numerically stable `log Σ exp(x_i)`; `-inf` for an empty input.
pub fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + xs.map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Split log-sum-exp objective, its derivative, and the larger LSE magnitude.
struct SplitObjective<'a> {
    values: &'a [f64],
    log_w: Option<Vec<f64>>,
}

impl SplitObjective<'_> {
    fn terms(&self, lambda: f64, sign: f64) -> impl Iterator<Item = (f64, f64)> + Clone + '_ {
        self.values.iter().enumerate().filter_map(move |(i, &h)| {
            let lw = self.log_w.as_ref().map_or(0.0, |w| w[i]);
            (h * sign > 0.0 && lw > f64::NEG_INFINITY).then(|| (lw + (h * sign).ln() - lambda * h, h))
        })
    }

    fn eval(&self, lambda: f64) -> (f64, f64, f64) {
        let (a, ma) = self.side(lambda, 1.0);
        let (b, mb) = self.side(lambda, -1.0);
        // d/dλ LSE = -(softmax-weighted mean of h)
        (a - b, mb - ma, a.abs().max(b.abs()).max(1.0))
    }

    fn side(&self, lambda: f64, sign: f64) -> (f64, f64) {
        let it = self.terms(lambda, sign);
        let lse = log_sum_exp(it.clone().map(|t| t.0));
        let mean = it.map(|(x, h)| (x - lse).exp() * h).sum::<f64>();
        (lse, mean)
    }
}

fn solve_impl(values: &[f64], probs: Option<&[f64]>) -> Result<LagrangeSolution> {
    let status = classify(values, probs)?;
    match status {
        FeasibilityStatus::Feasible => {}
        FeasibilityStatus::AllZero => {
            return Ok(LagrangeSolution {
                lambda_hat: 0.0,
                status,
                bracket: (0.0, 0.0),
                residual: 0.0,
                objective_scale: 1.0,
                iterations: 0,
            })
        }
        _ => return Err(Error::NoRoot(status)),
    }
    let obj = SplitObjective {
        values,
        log_w: probs.map(|p| p.iter().map(|w| if *w > 0.0 { w.ln() } else { f64::NEG_INFINITY }).collect()),
    };
    let g = |l: f64| obj.eval(l).0;

    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    let mut doublings = 0;
    while g(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::NoCriticalPoint { bound: hi });
        }
    }
    while g(lo) < 0.0 {
        hi = lo;
        lo *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::NoCriticalPoint { bound: -lo });
        }
    }

    let mut iterations = 0;
    let mut root = None;
    while iterations < MAX_BISECTIONS {
        if hi - lo <= BRACKET_REL_WIDTH * lo.abs().max(hi.abs()) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let gm = g(mid);
        if gm == 0.0 {
            root = Some(mid);
            break;
        }
        if gm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut lambda = root.unwrap_or(0.5 * (lo + hi));
    let (mut val, deriv, mut scale) = obj.eval(lambda);
    if val != 0.0 && deriv < 0.0 {
        let cand = lambda - val / deriv;
        if cand >= lo && cand <= hi {
            let (cv, _, cs) = obj.eval(cand);
            if cv.abs() <= val.abs() {
                lambda = cand;
                val = cv;
                scale = cs;
            }
        }
    }
    Ok(LagrangeSolution { lambda_hat: lambda, status, bracket: (lo, hi), residual: val, objective_scale: scale, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn unit(v: &[f64]) -> CenteredCounts {
        CenteredCounts::unit(v.to_vec()).unwrap()
    }

    /// Plain bisection on the naive objective Σ h e^{-λh}, run to 1e-14.
    fn naive_root(h: &[f64]) -> f64 {
        let f = |l: f64| h.iter().map(|x| x * (-l * x).exp()).sum::<f64>();
        let (mut lo, mut hi) = (-60.0f64, 60.0f64);
        assert!(f(lo) > 0.0 && f(hi) < 0.0);
        while hi - lo > 1e-14 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn feasibility_examples() {
        assert_eq!(feasibility(&unit(&[-1.0, 1.0])).unwrap(), FeasibilityStatus::Feasible);
        assert_eq!(feasibility(&unit(&[0.0, 0.0, 0.0])).unwrap(), FeasibilityStatus::AllZero);
        assert_eq!(feasibility(&unit(&[1.0, 2.0])).unwrap(), FeasibilityStatus::AllNonNegative);
        assert_eq!(feasibility(&unit(&[0.0, -2.0])).unwrap(), FeasibilityStatus::AllNonPositive);
        assert_eq!(feasibility(&unit(&[])), Err(Error::EmptySample));
    }

    #[test]
    fn solve_root_examples() {
        let s = solve_root(&unit(&[-1.0, 1.0])).unwrap();
        assert_eq!(s.lambda_hat, 0.0);
        let s = solve_root(&unit(&[-1.0, 2.0])).unwrap();
        assert!((s.lambda_hat - 2f64.ln() / 3.0).abs() < 1e-12);
        assert!(s.bracket.0 <= s.lambda_hat && s.lambda_hat <= s.bracket.1);
        assert!(s.residual_within_tolerance());
        let s = solve_root(&unit(&[-1.0, -1.0, 3.0])).unwrap();
        assert!((s.lambda_hat - 1.5f64.ln() / 4.0).abs() < 1e-12);
        assert!((s.lambda_hat - 0.1013663).abs() < 1e-7);
    }

    #[test]
    fn solve_root_all_zero_and_infeasible() {
        let s = solve_root(&unit(&[0.0, 0.0])).unwrap();
        assert_eq!((s.lambda_hat, s.status), (0.0, FeasibilityStatus::AllZero));
        assert_eq!(solve_root(&unit(&[1.0, 2.0])), Err(Error::NoRoot(FeasibilityStatus::AllNonNegative)));
        assert_eq!(solve_root(&unit(&[-1.0, 0.0])), Err(Error::NoRoot(FeasibilityStatus::AllNonPositive)));
    }

    #[test]
    fn scaled_examples() {
        let h = CenteredCounts::new(vec![-1.0, 1.0], 0.0, 9.0).unwrap();
        assert_eq!(solve_root_scaled(&h).unwrap().lambda_hat, 0.0);
        let h = CenteredCounts::new(vec![-1.0, 2.0], 0.0, 1.0).unwrap();
        assert!((solve_root_scaled(&h).unwrap().lambda_hat - 2f64.ln() / 3.0).abs() < 1e-12);
        let h = CenteredCounts::new(vec![-1.0, 2.0], 0.0, 10.0).unwrap();
        let l = solve_root_scaled(&h).unwrap().lambda_hat;
        assert_eq!(l, 10.0 * solve_root(&h).unwrap().lambda_hat);
        assert!((l - 2.3104906).abs() < 1e-7);
    }

    #[test]
    fn weights_examples() {
        assert_eq!(weights(&unit(&[-1.0, 1.0]), 0.0), vec![0.5, 0.5]);
        assert_eq!(weights(&unit(&[0.0, 0.0]), 0.0), vec![0.5, 0.5]);
        let w = weights(&unit(&[-1.0, 2.0]), 2f64.ln() / 3.0);
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-14 && (w[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn weighted_root_matches_replicated_sample() {
        // weights 1/4, 3/4 on {-1, 2} equal the sample {-1, 2, 2, 2}
        let a = solve_root_weighted(&[-1.0, 2.0], &[0.25, 0.75]).unwrap().lambda_hat;
        let b = solve_root(&unit(&[-1.0, 2.0, 2.0, 2.0])).unwrap().lambda_hat;
        assert!((a - b).abs() < 1e-12);
        // zero-probability atoms do not count towards feasibility
        assert!(solve_root_weighted(&[-1.0, 2.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn overflow_safety() {
        let h = unit(&[-1e9, -3e8, 2e9, 5e8]);
        let s = solve_root(&h).unwrap();
        assert!(s.lambda_hat.is_finite() && s.residual.is_finite());
        let g = SplitObjective { values: h.values(), log_w: None };
        for l in [-1e-5, -5e-6, 5e-6, 1e-5] {
            // exponents up to 2e4 in magnitude
            let (v, d, _) = g.eval(l);
            assert!(v.is_finite() && d.is_finite());
        }
    }

    #[test]
    fn weights_entropy_beats_random_feasible_weights() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let h = unit(&[-2.0, -0.5, 1.0, 3.0, 0.25]);
        let l = solve_root(&h).unwrap().lambda_hat;
        let w = weights(&h, l);
        let entropy = |w: &[f64]| -w.iter().filter(|x| **x > 0.0).map(|x| x * x.ln()).sum::<f64>();
        let best = entropy(&w);
        assert!(w.iter().zip(h.values()).map(|(a, b)| a * b).sum::<f64>().abs() < 1e-10);
        let mut accepted = 0;
        while accepted < 100 {
            // random weights, then fix the moment constraint by mixing with
            // a two-point feasible vector
            let mut r: Vec<f64> = (0..5).map(|_| rng.random::<f64>()).collect();
            let s: f64 = r.iter().sum();
            r.iter_mut().for_each(|x| *x /= s);
            let moment: f64 = r.iter().zip(h.values()).map(|(a, b)| a * b).sum();
            // mix in a point mass of the opposite sign to zero the moment
            let i = if moment > 0.0 { 0 } else { 3 };
            let t = moment / (moment - h.values()[i]);
            if !(0.0..1.0).contains(&t) {
                continue;
            }
            let mut v: Vec<f64> = r.iter().map(|x| (1.0 - t) * x).collect();
            v[i] += t;
            let mom: f64 = v.iter().zip(h.values()).map(|(a, b)| a * b).sum();
            assert!(mom.abs() < 1e-12);
            assert!(entropy(&v) <= best + 1e-12);
            accepted += 1;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn matches_naive_bisection(
            neg in proptest::collection::vec(-5.0f64..-0.01, 1..3),
            pos in proptest::collection::vec(0.01f64..5.0, 1..4),
        ) {
            let mut v = neg.clone();
            v.extend(pos);
            let s = solve_root(&unit(&v)).unwrap();
            prop_assert!((s.lambda_hat - naive_root(&v)).abs() < 1e-9);
            prop_assert!(s.residual_within_tolerance());
        }

        #[test]
        fn objective_strictly_decreasing(
            neg in proptest::collection::vec(-50.0f64..-0.01, 1..8),
            pos in proptest::collection::vec(0.01f64..50.0, 1..8),
        ) {
            let mut v = neg;
            v.extend(pos);
            let g = SplitObjective { values: &v, log_w: None };
            let mut last = f64::INFINITY;
            for k in 0..10 {
                let l = -2.0 + 0.4 * k as f64;
                let (val, d, _) = g.eval(l);
                prop_assert!(val < last);
                prop_assert!(d < 0.0);
                last = val;
            }
        }

        #[test]
        fn scaling_covariance(
            neg in proptest::collection::vec(-5.0f64..-0.01, 1..5),
            pos in proptest::collection::vec(0.01f64..5.0, 1..5),
            k in 0.01f64..100.0,
        ) {
            let mut v = neg;
            v.extend(pos);
            let base = solve_root(&unit(&v)).unwrap().lambda_hat;
            let scaled: Vec<f64> = v.iter().map(|x| x * k).collect();
            let l = solve_root(&unit(&scaled)).unwrap().lambda_hat;
            prop_assert!((l - base / k).abs() <= 1e-9 * (base / k).abs().max(1e-300) + 1e-15);
        }

        #[test]
        fn weights_satisfy_moment(
            neg in proptest::collection::vec(-5.0f64..-0.01, 1..6),
            pos in proptest::collection::vec(0.01f64..5.0, 1..6),
        ) {
            let mut v = neg;
            v.extend(pos);
            let h = unit(&v);
            let l = solve_root(&h).unwrap().lambda_hat;
            let w = weights(&h, l);
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let mean_abs: f64 = w.iter().zip(&v).map(|(a, b)| a * b.abs()).sum();
            let mom: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
            prop_assert!(mom.abs() <= 1e-10 * mean_abs);
        }
    }
}
