//! Goodness-of-fit and two-sample tests built on the Lagrange multiplier.
//!
//! * fixed vertex count: one-sided upper test on `√n λ̂ / σ̂₀`;
//! * sparse Erdős–Rényi: one-sided upper GOF and a two-sided two-sample test
//!   with the Poisson plug-in variance;
//! * dense subcritical ERGM: one-sided lower GOF on the scaled root and a
//!   two-sample test against `c/m²`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::count::{count_motif, expected_count_er, falling_factorial};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lagrange::{solve_root, solve_root_scaled, solve_root_weighted, CenteredCounts, FeasibilityStatus};
use crate::motif::Motif;
use crate::normal;
use crate::poisson::{asymptotic_variance, PoissonTilt};
use crate::sampler::{ergm_hamiltonian, subcritical_check, ErModel, ErgmModel, ErgmTerms};

/// Samples with one-signed evidence at least this large decide the test;
/// smaller ones are an error.
pub const ONE_SIDED_MIN_N: usize = 30;
/// Largest vertex count for [`exact_lambda_fixed`].
pub const EXACT_MAX_VERTICES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decision {
    Reject,
    #[serde(rename = "fail")]
    FailToReject,
}

impl Decision {
    pub fn is_reject(self) -> bool {
        self == Decision::Reject
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Reject => "reject",
            Decision::FailToReject => "fail",
        })
    }
}

/// How `statistic` is compared to `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    /// Reject when `statistic > threshold`.
    Upper,
    /// Reject when `statistic < threshold`.
    Lower,
    /// `statistic` is an absolute difference; reject when it exceeds `threshold`.
    TwoSided,
}

impl Direction {
    pub fn decide(self, statistic: f64, threshold: f64) -> Decision {
        let reject = match self {
            Direction::Upper | Direction::TwoSided => statistic > threshold,
            Direction::Lower => statistic < threshold,
        };
        if reject {
            Decision::Reject
        } else {
            Decision::FailToReject
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// One entry per sample.
    pub feasibility: Vec<FeasibilityStatus>,
    pub iterations: Vec<u32>,
    pub h0: f64,
    /// Named variance components and other intermediate quantities.
    pub components: BTreeMap<String, f64>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test_id: String,
    pub n: usize,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub m: usize,
    pub motif: String,
    #[serde(with = "serde_real::vec")]
    pub lambda_hat: Vec<f64>,
    #[serde(with = "serde_real::one")]
    pub statistic: f64,
    #[serde(with = "serde_real::one")]
    pub threshold: f64,
    pub direction: Direction,
    pub p_value: Option<f64>,
    pub alpha: Option<f64>,
    pub decision: Decision,
    pub diagnostics: Diagnostics,
}

impl TestReport {
    /// The decision implied by `(statistic, threshold, direction)` alone.
    pub fn recomputed_decision(&self) -> Decision {
        self.direction.decide(self.statistic, self.threshold)
    }
}

/// Serde helpers that keep infinities as the strings `"inf"` / `"-inf"`, for
/// use with `#[serde(with = "...")]`.
pub mod serde_real {
    use core::fmt;

    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};

    fn ser<S: Serializer>(x: f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    struct RealVisitor;

    impl<'de> Visitor<'de> for RealVisitor {
        type Value = f64;

        fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
            }
        }
    }

    pub mod one {
        use super::*;

        pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
            ser(*x, s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
            d.deserialize_any(RealVisitor)
        }
    }

    pub mod vec {
        use alloc::vec::Vec;

        use serde::de::{SeqAccess, Visitor};
        use serde::ser::SerializeSeq;
        use serde::Deserialize;

        use super::*;

        struct Real(f64);

        impl<'de> Deserialize<'de> for Real {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                d.deserialize_any(RealVisitor).map(Real)
            }
        }

        pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
            struct One(f64);
            impl serde::Serialize for One {
                fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                    ser(self.0, s)
                }
            }
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for &x in xs {
                seq.serialize_element(&One(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            struct SeqVisitor;
            impl<'de> Visitor<'de> for SeqVisitor {
                type Value = Vec<f64>;

                fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                    f.write_str("a sequence of reals")
                }

                fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Vec<f64>, A::Error> {
                    let mut out = Vec::new();
                    while let Some(Real(x)) = seq.next_element()? {
                        out.push(x);
                    }
                    Ok(out)
                }
            }
            d.deserialize_seq(SeqVisitor)
        }
    }
}

/// Sparse-regime reference: `μ0 = c0^{v(H)}/|Aut(H)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSpec {
    c0: f64,
    motif: Motif,
    alpha: f64,
}

impl SparseSpec {
    pub fn new(c0: f64, motif: Motif, alpha: f64) -> Result<Self> {
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::Domain { value: c0, domain: "(0, inf)" });
        }
        check_alpha(alpha)?;
        if !motif.is_strictly_balanced() {
            return Err(Error::UnsupportedMotif(format!("{} is not strictly balanced", motif.name())));
        }
        Ok(Self { c0, motif, alpha })
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn motif(&self) -> &Motif {
        &self.motif
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `μ0 = c0^{v(H)}/|Aut(H)|`.
    pub fn mu0(&self) -> f64 {
        self.c0.powi(self.motif.vertex_count() as i32) / self.motif.aut() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DenseNull {
    Er { p0: f64 },
    Ergm { terms: ErgmTerms },
}

/// `c_n` for the dense GOF threshold `-1/c_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum CnRule {
    /// `m²/log(m²)`.
    Default,
    Fixed(f64),
}

impl CnRule {
    pub fn value(self, m: usize) -> f64 {
        match self {
            CnRule::Default => {
                let m2 = (m * m) as f64;
                m2 / m2.ln()
            }
            CnRule::Fixed(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseSpec {
    null: DenseNull,
    motif: Motif,
    cn: CnRule,
    epsilon: f64,
    c: f64,
    /// `p(β0)`, the edge density of the null.
    p_null: f64,
}

impl DenseSpec {
    /// Refuses an ERGM null that is not subcritical.
    pub fn new(null: DenseNull, motif: Motif, cn: CnRule, epsilon: f64, c: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Domain { value: epsilon, domain: "(0, 1)" });
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain { value: c, domain: "(0, inf)" });
        }
        if let CnRule::Fixed(v) = cn {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain { value: v, domain: "(0, inf)" });
            }
        }
        let p_null = match &null {
            DenseNull::Er { p0 } => {
                if !(*p0 > 0.0 && *p0 < 1.0) {
                    return Err(Error::Domain { value: *p0, domain: "(0, 1)" });
                }
                *p0
            }
            DenseNull::Ergm { terms } => {
                let report = subcritical_check(terms)?;
                match report.p_star() {
                    Some(p) => p,
                    None => return Err(Error::NotSubcritical(alloc::boxed::Box::new(report))),
                }
            }
        };
        Ok(Self { null, motif, cn, epsilon, c, p_null })
    }

    pub fn null(&self) -> &DenseNull {
        &self.null
    }

    pub fn motif(&self) -> &Motif {
        &self.motif
    }

    pub fn cn(&self) -> CnRule {
        self.cn
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn p_null(&self) -> f64 {
        self.p_null
    }

    /// Null expected count at `m` vertices.
    pub fn h0(&self, m: usize) -> f64 {
        let e = self.motif.edge_count() as i32;
        match self.null {
            DenseNull::Er { p0 } => expected_count_er(m, p0, &self.motif, true).unwrap_or(f64::NAN),
            DenseNull::Ergm { .. } => {
                falling_factorial(m, self.motif.vertex_count()) * self.p_null.powi(e) / self.motif.aut() as f64
            }
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain { value: alpha, domain: "(0, 1)" });
    }
    Ok(())
}

/// Common vertex count of a sample.
pub fn common_vertex_count(samples: &[Graph]) -> Result<usize> {
    let m = samples.first().ok_or(Error::EmptySample)?.vertex_count();
    if let Some(g) = samples.iter().find(|g| g.vertex_count() != m) {
        return Err(Error::IncompatibleSamples(format!(
            "graphs with {} and {} vertices in one sample",
            m,
            g.vertex_count()
        )));
    }
    Ok(m)
}

/// Motif counts of each graph, as floats.
pub fn motif_counts(samples: &[Graph], motif: &Motif) -> Result<Vec<f64>> {
    samples.iter().map(|g| count_motif(g, motif).map(|c| c as f64)).collect()
}

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)
}

/// `λ̂` for an upper-tail test, with the one-sided policy applied:
/// all-zero gives `0`, all-non-positive `-inf`, all-non-negative `+inf`
/// (or an error below [`ONE_SIDED_MIN_N`]).
fn upper_root(h: &CenteredCounts, diag: &mut Diagnostics) -> Result<f64> {
    one_sided_root(h, diag, FeasibilityStatus::AllNonNegative, false)
}

fn lower_root(h: &CenteredCounts, diag: &mut Diagnostics) -> Result<f64> {
    one_sided_root(h, diag, FeasibilityStatus::AllNonPositive, true)
}

fn one_sided_root(h: &CenteredCounts, diag: &mut Diagnostics, evidence: FeasibilityStatus, scaled: bool) -> Result<f64> {
    let status = crate::lagrange::feasibility(h)?;
    diag.feasibility.push(status);
    match status {
        FeasibilityStatus::Feasible | FeasibilityStatus::AllZero => {
            let sol = if scaled { solve_root_scaled(h)? } else { solve_root(h)? };
            diag.iterations.push(sol.iterations);
            if status == FeasibilityStatus::AllZero {
                diag.notes.push("all centered counts are zero; multiplier set to 0".to_string());
            }
            Ok(sol.lambda_hat)
        }
        s if s == evidence => {
            diag.iterations.push(0);
            if h.len() < ONE_SIDED_MIN_N {
                return Err(Error::InfeasibleSample { status: s, n: h.len(), required: ONE_SIDED_MIN_N });
            }
            diag.notes.push(format!("centered counts are {s}: no finite root, one-sided evidence decides"));
            Ok(if s == FeasibilityStatus::AllNonNegative { f64::INFINITY } else { f64::NEG_INFINITY })
        }
        s => {
            diag.iterations.push(0);
            diag.notes.push(format!("centered counts are {s}: no evidence in the tested direction"));
            Ok(if s == FeasibilityStatus::AllNonNegative { f64::INFINITY } else { f64::NEG_INFINITY })
        }
    }
}

/// Fixed-size GOF test: reject when `√n λ̂ / σ̂₀ > z_α`, where `σ̂₀²` is the
/// reciprocal of the sample variance of the counts.
pub fn gof_fixed(samples: &[Graph], motif: &Motif, h0: f64, alpha: f64) -> Result<TestReport> {
    let m = common_vertex_count(samples)?;
    gof_fixed_from_counts(&motif_counts(samples, motif)?, m, motif.name(), h0, alpha)
}

pub fn gof_fixed_from_counts(counts: &[f64], m: usize, motif: &str, h0: f64, alpha: f64) -> Result<TestReport> {
    check_alpha(alpha)?;
    if counts.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = counts.len();
    let z = normal::upper_quantile(alpha)?;
    let h = CenteredCounts::from_counts(counts, h0, 1.0)?;
    let mut diag = Diagnostics { h0, ..Default::default() };
    let all_zero = crate::lagrange::feasibility(&h)? == FeasibilityStatus::AllZero;
    let var = if n >= 2 { sample_variance(counts) } else { 0.0 };
    if !all_zero && !(var > 0.0) {
        return Err(Error::DegenerateSample);
    }
    let lambda = upper_root(&h, &mut diag)?;
    let sd = var.sqrt();
    let statistic = if all_zero { 0.0 } else { (n as f64).sqrt() * lambda * sd };
    diag.components.insert("sample_variance".into(), var);
    if var > 0.0 {
        diag.components.insert("sigma0_hat".into(), 1.0 / sd);
    }
    Ok(TestReport {
        test_id: "gof-fixed".into(),
        n,
        n1: None,
        n2: None,
        m,
        motif: motif.into(),
        lambda_hat: vec![lambda],
        statistic,
        threshold: z,
        direction: Direction::Upper,
        p_value: Some(normal::sf(statistic)),
        alpha: Some(alpha),
        decision: Direction::Upper.decide(statistic, z),
        diagnostics: diag,
    })
}

/// A distribution over graphs on at most [`EXACT_MAX_VERTICES`] vertices.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphLaw {
    Er(ErModel),
    Ergm(ErgmModel),
}

impl GraphLaw {
    pub fn vertex_count(&self) -> usize {
        match self {
            GraphLaw::Er(e) => e.m,
            GraphLaw::Ergm(e) => e.m,
        }
    }
}

/// Population multiplier: the root of `Σ_a (a - h0) e^{-λ(a - h0)} P(count = a)`,
/// by enumerating every graph on `m <= 5` vertices.
pub fn exact_lambda_fixed(law: &GraphLaw, motif: &Motif, h0: f64) -> Result<f64> {
    let m = law.vertex_count();
    if m > EXACT_MAX_VERTICES {
        return Err(Error::SizeLimit { what: "enumeration vertices", limit: EXACT_MAX_VERTICES, got: m });
    }
    let pairs = m * m.saturating_sub(1) / 2;
    let mut by_count: BTreeMap<u64, f64> = BTreeMap::new();
    let mut log_w = Vec::with_capacity(1 << pairs);
    let mut counts = Vec::with_capacity(1 << pairs);
    for mask in 0u64..1 << pairs {
        let mut g = Graph::empty(m);
        for b in 0..pairs {
            if mask >> b & 1 == 1 {
                g.set_bit(b, true);
            }
        }
        let lw = match law {
            GraphLaw::Er(er) => {
                let e = g.edge_count() as f64;
                e * er.p.ln() + (pairs as f64 - e) * (1.0 - er.p).ln()
            }
            GraphLaw::Ergm(model) => ergm_hamiltonian(&g, &model.terms)?,
        };
        log_w.push(lw);
        counts.push(count_motif(&g, motif)?);
    }
    let lse = crate::lagrange::log_sum_exp(log_w.iter().copied());
    for (c, lw) in counts.iter().zip(&log_w) {
        *by_count.entry(*c).or_insert(0.0) += (lw - lse).exp();
    }
    let values: Vec<f64> = by_count.keys().map(|&c| c as f64 - h0).collect();
    let probs: Vec<f64> = by_count.values().copied().collect();
    let sol = solve_root_weighted(&values, &probs)?;
    if sol.status != FeasibilityStatus::Feasible && sol.status != FeasibilityStatus::AllZero {
        return Err(Error::NoRoot(sol.status));
    }
    Ok(sol.lambda_hat)
}

fn growth_warning(m: usize, n: usize, motif: &Motif) -> Option<String> {
    let k = motif.max_subgraph_density().as_f64();
    if k >= 2.0 {
        return None;
    }
    let bound = (n as f64).powf(1.0 / (2.0 * (2.0 - k)));
    (m as f64 <= bound).then(|| format!("m = {m} is not large against n^(1/(2(2-k))) = {bound:.3}; CLT bias may be visible"))
}

/// Sparse GOF: centering `μ0`, reject when `λ̂ > z_α/√(μ0 n)`.
pub fn gof_sparse(samples: &[Graph], spec: &SparseSpec) -> Result<TestReport> {
    let m = common_vertex_count(samples)?;
    gof_sparse_from_counts(&motif_counts(samples, &spec.motif)?, m, spec)
}

pub fn gof_sparse_from_counts(counts: &[f64], m: usize, spec: &SparseSpec) -> Result<TestReport> {
    if counts.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = counts.len();
    let mu0 = spec.mu0();
    let z = normal::upper_quantile(spec.alpha)?;
    let h = CenteredCounts::from_counts(counts, mu0, 1.0)?;
    let mut diag = Diagnostics { h0: mu0, ..Default::default() };
    let lambda = upper_root(&h, &mut diag)?;
    let root_n = (mu0 * n as f64).sqrt();
    let threshold = z / root_n;
    diag.components.insert("mu0".into(), mu0);
    diag.components.insert("standardized".into(), root_n * lambda);
    diag.warnings.extend(growth_warning(m, n, &spec.motif));
    Ok(TestReport {
        test_id: "gof-sparse".into(),
        n,
        n1: None,
        n2: None,
        m,
        motif: spec.motif.name().into(),
        lambda_hat: vec![lambda],
        statistic: lambda,
        threshold,
        direction: Direction::Upper,
        p_value: Some(normal::sf(root_n * lambda)),
        alpha: Some(spec.alpha),
        decision: Direction::Upper.decide(lambda, threshold),
        diagnostics: diag,
    })
}

fn feasible_root(h: &CenteredCounts, sample: usize, scaled: bool, diag: &mut Diagnostics) -> Result<f64> {
    let status = crate::lagrange::feasibility(h)?;
    diag.feasibility.push(status);
    if status != FeasibilityStatus::Feasible {
        return Err(Error::TwoSampleInfeasible { sample, status });
    }
    let sol = if scaled { solve_root_scaled(h)? } else { solve_root(h)? };
    diag.iterations.push(sol.iterations);
    Ok(sol.lambda_hat)
}

/// Sparse two-sample test: reject when `|λ̂₁ - λ̂₂| > σ̂ z_{α/2}` with the
/// Poisson plug-in `σ̂² = (1/n₁ + 1/n₂) g(λ̄)/f(λ̄)²` at `μ̂ = h0 e^{λ̄}`.
pub fn two_sample_sparse(samples1: &[Graph], samples2: &[Graph], spec: &SparseSpec) -> Result<TestReport> {
    let m1 = common_vertex_count(samples1)?;
    let m2 = common_vertex_count(samples2)?;
    if m1 != m2 {
        return Err(Error::IncompatibleSamples(format!("samples have {m1} and {m2} vertices")));
    }
    two_sample_sparse_from_counts(&motif_counts(samples1, &spec.motif)?, &motif_counts(samples2, &spec.motif)?, m1, spec)
}

pub fn two_sample_sparse_from_counts(counts1: &[f64], counts2: &[f64], m: usize, spec: &SparseSpec) -> Result<TestReport> {
    if counts1.is_empty() || counts2.is_empty() {
        return Err(Error::EmptySample);
    }
    let (n1, n2) = (counts1.len(), counts2.len());
    let h0 = spec.mu0();
    let mut diag = Diagnostics { h0, ..Default::default() };
    let l1 = feasible_root(&CenteredCounts::from_counts(counts1, h0, 1.0)?, 1, false, &mut diag)?;
    let l2 = feasible_root(&CenteredCounts::from_counts(counts2, h0, 1.0)?, 2, false, &mut diag)?;
    let bar = 0.5 * (l1 + l2);
    let mu_hat = h0 * bar.exp();
    let tilt = PoissonTilt::new(mu_hat, h0)?;
    let ratio = asymptotic_variance(&tilt, bar)?;
    let sigma = ((1.0 / n1 as f64 + 1.0 / n2 as f64) * ratio).sqrt();
    let z = normal::upper_quantile(spec.alpha / 2.0)?;
    let statistic = (l1 - l2).abs();
    let threshold = sigma * z;
    diag.components.insert("lambda_bar".into(), bar);
    diag.components.insert("mu_hat".into(), mu_hat);
    diag.components.insert("g_over_f2".into(), ratio);
    diag.components.insert("sigma_hat".into(), sigma);
    diag.warnings.extend(growth_warning(m, n1.min(n2), &spec.motif));
    Ok(TestReport {
        test_id: "two-sample-sparse".into(),
        n: n1 + n2,
        n1: Some(n1),
        n2: Some(n2),
        m,
        motif: spec.motif.name().into(),
        lambda_hat: vec![l1, l2],
        statistic,
        threshold,
        direction: Direction::TwoSided,
        p_value: Some((2.0 * normal::sf(statistic / sigma)).min(1.0)),
        alpha: Some(spec.alpha),
        decision: Direction::TwoSided.decide(statistic, threshold),
        diagnostics: diag,
    })
}

fn dense_scale(m: usize, motif: &Motif) -> f64 {
    (m as f64).powi(motif.vertex_count() as i32 - 2)
}

fn require_strictly_balanced(motif: &Motif) -> Result<()> {
    if motif.is_strictly_balanced() {
        Ok(())
    } else {
        Err(Error::UnsupportedMotif(format!("{} is not strictly balanced", motif.name())))
    }
}

/// Dense GOF: scaled root centered at the null expected count; reject when
/// `λ̂ < -1/c_n`. No p-value.
pub fn gof_dense(samples: &[Graph], spec: &DenseSpec) -> Result<TestReport> {
    let m = common_vertex_count(samples)?;
    gof_dense_from_counts(&motif_counts(samples, &spec.motif)?, m, spec)
}

pub fn gof_dense_from_counts(counts: &[f64], m: usize, spec: &DenseSpec) -> Result<TestReport> {
    require_strictly_balanced(&spec.motif)?;
    if counts.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = counts.len();
    let h0 = spec.h0(m);
    let scale = dense_scale(m, &spec.motif);
    let h = CenteredCounts::from_counts(counts, h0, scale)?;
    let mut diag = Diagnostics { h0, ..Default::default() };
    let lambda = lower_root(&h, &mut diag)?;
    let cn = spec.cn.value(m);
    let threshold = -1.0 / cn;
    diag.components.insert("c_n".into(), cn);
    diag.components.insert("scale".into(), scale);
    diag.components.insert("p_null".into(), spec.p_null);
    Ok(TestReport {
        test_id: "gof-dense".into(),
        n,
        n1: None,
        n2: None,
        m,
        motif: spec.motif.name().into(),
        lambda_hat: vec![lambda],
        statistic: lambda,
        threshold,
        direction: Direction::Lower,
        p_value: None,
        alpha: None,
        decision: Direction::Lower.decide(lambda, threshold),
        diagnostics: diag,
    })
}

/// `C(m, v)` as a float.
fn binomial(m: usize, v: usize) -> f64 {
    (0..v).map(|i| (m - i) as f64 / (i + 1) as f64).product()
}

/// Dense two-sample test: both scaled roots centered at `C(m, v)(1-ε)^e`;
/// reject when `|λ̂ - λ̃| > c/m²`.
pub fn two_sample_dense(samples1: &[Graph], samples2: &[Graph], spec: &DenseSpec) -> Result<TestReport> {
    let m1 = common_vertex_count(samples1)?;
    let m2 = common_vertex_count(samples2)?;
    if m1 != m2 {
        return Err(Error::IncompatibleSamples(format!("samples have {m1} and {m2} vertices")));
    }
    two_sample_dense_from_counts(&motif_counts(samples1, &spec.motif)?, &motif_counts(samples2, &spec.motif)?, m1, spec)
}

pub fn two_sample_dense_from_counts(counts1: &[f64], counts2: &[f64], m: usize, spec: &DenseSpec) -> Result<TestReport> {
    if counts1.is_empty() || counts2.is_empty() {
        return Err(Error::EmptySample);
    }
    let (n1, n2) = (counts1.len(), counts2.len());
    let v = spec.motif.vertex_count();
    if v > m {
        return Err(Error::InvalidParameter(format!("motif has {v} vertices but graphs have {m}")));
    }
    let h0 = binomial(m, v) * (1.0 - spec.epsilon).powi(spec.motif.edge_count() as i32);
    let scale = dense_scale(m, &spec.motif);
    let mut diag = Diagnostics { h0, ..Default::default() };
    let l1 = feasible_root(&CenteredCounts::from_counts(counts1, h0, scale)?, 1, true, &mut diag)?;
    let l2 = feasible_root(&CenteredCounts::from_counts(counts2, h0, scale)?, 2, true, &mut diag)?;
    let statistic = (l1 - l2).abs();
    let threshold = spec.c / (m * m) as f64;
    diag.components.insert("scale".into(), scale);
    diag.components.insert("epsilon".into(), spec.epsilon);
    Ok(TestReport {
        test_id: "two-sample-dense".into(),
        n: n1 + n2,
        n1: Some(n1),
        n2: Some(n2),
        m,
        motif: spec.motif.name().into(),
        lambda_hat: vec![l1, l2],
        statistic,
        threshold,
        direction: Direction::TwoSided,
        p_value: None,
        alpha: None,
        decision: Direction::TwoSided.decide(statistic, threshold),
        diagnostics: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::sampler::sample_er;

    fn rep(v: f64, k: usize) -> Vec<f64> {
        vec![v; k]
    }

    #[test]
    fn gof_fixed_examples() {
        let h0 = 2.5;
        let r = gof_fixed_from_counts(&rep(h0, 10), 5, "triangle", h0, 0.05).unwrap();
        assert_eq!(r.lambda_hat[0], 0.0);
        assert_eq!(r.diagnostics.feasibility[0], FeasibilityStatus::AllZero);
        assert_eq!(r.decision, Decision::FailToReject);

        let mut c = rep(h0 - 1.0, 500);
        c.extend(rep(h0 + 1.0, 500));
        let r = gof_fixed_from_counts(&c, 5, "triangle", h0, 0.05).unwrap();
        assert!(r.lambda_hat[0].abs() < 1e-12);
        assert_eq!(r.decision, Decision::FailToReject);

        let mut c = rep(h0 + 2.0, 900);
        c.extend(rep(h0 - 1.0, 100));
        let r = gof_fixed_from_counts(&c, 5, "triangle", h0, 0.05).unwrap();
        assert!((r.lambda_hat[0] - 18f64.ln() / 3.0).abs() < 1e-10);
        assert_eq!(r.decision, Decision::Reject);
        assert_eq!(r.recomputed_decision(), r.decision);
    }

    #[test]
    fn gof_fixed_statistic_matches_definition() {
        let c = [0.0, 1.0, 1.0, 2.0, 4.0, 0.0, 3.0];
        let r = gof_fixed_from_counts(&c, 5, "triangle", 1.0, 0.05).unwrap();
        let mean = c.iter().sum::<f64>() / 7.0;
        let var = c.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 6.0;
        let sigma0 = 1.0 / var.sqrt();
        assert!((r.statistic - 7f64.sqrt() * r.lambda_hat[0] / sigma0).abs() < 1e-12);
        assert!((r.p_value.unwrap() - (1.0 - normal::cdf(r.statistic))).abs() < 1e-12);
    }

    #[test]
    fn gof_fixed_infeasible_policies() {
        // all above h0: reject with n >= 30, error below
        let c: Vec<f64> = (0..40).map(|i| 2.0 + (i % 3) as f64).collect();
        let r = gof_fixed_from_counts(&c, 5, "triangle", 1.0, 0.05).unwrap();
        assert_eq!(r.decision, Decision::Reject);
        assert_eq!(r.lambda_hat[0], f64::INFINITY);
        assert!(matches!(gof_fixed_from_counts(&c[..10], 5, "t", 1.0, 0.05), Err(Error::InfeasibleSample { .. })));
        // all below h0: fail to reject
        let r = gof_fixed_from_counts(&c[..10], 5, "t", 10.0, 0.05).unwrap();
        assert_eq!(r.decision, Decision::FailToReject);
        assert_eq!(r.p_value, Some(1.0));
        // constant but not at h0
        assert_eq!(gof_fixed_from_counts(&rep(3.0, 50), 5, "t", 1.0, 0.05), Err(Error::DegenerateSample));
    }

    #[test]
    fn gof_fixed_centering_invariance() {
        let c = [0.0, 1.0, 1.0, 2.0, 4.0, 0.0, 3.0];
        let a = gof_fixed_from_counts(&c, 5, "t", 1.3, 0.05).unwrap();
        let shifted: Vec<f64> = c.iter().map(|x| x + 7.0).collect();
        let b = gof_fixed_from_counts(&shifted, 5, "t", 8.3, 0.05).unwrap();
        assert!((a.lambda_hat[0] - b.lambda_hat[0]).abs() < 1e-12);
    }

    #[test]
    fn exact_lambda_examples() {
        let t = Motif::triangle();
        let l = exact_lambda_fixed(&GraphLaw::Er(ErModel::new(3, 0.5).unwrap()), &t, 0.125).unwrap();
        assert!(l.abs() < 1e-12);
        let p: f64 = 0.3;
        let l = exact_lambda_fixed(&GraphLaw::Er(ErModel::new(3, p).unwrap()), &t, p.powi(3)).unwrap();
        assert!(l.abs() < 1e-12);
        let l = exact_lambda_fixed(&GraphLaw::Er(ErModel::new(5, 0.5).unwrap()), &t, 1.0).unwrap();
        assert!((l - 0.14322477353949278).abs() < 1e-10);
        assert!(exact_lambda_fixed(&GraphLaw::Er(ErModel::new(6, 0.5).unwrap()), &t, 1.0).is_err());
    }

    #[test]
    fn exact_lambda_matches_frozen_distribution() {
        // triangle counts of G(5, 1/2), tallied over all 1024 graphs
        let dist = [(0.0, 388.0), (1.0, 290.0), (2.0, 195.0), (3.0, 70.0), (4.0, 40.0), (5.0, 30.0), (7.0, 10.0), (10.0, 1.0)];
        let f = |l: f64| dist.iter().map(|(a, p)| p * (a - 1.0) * (-l * (a - 1.0)).exp()).sum::<f64>();
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let l = exact_lambda_fixed(&GraphLaw::Er(ErModel::new(5, 0.5).unwrap()), &Motif::triangle(), 1.0).unwrap();
        assert!((l - lo).abs() < 1e-10);
    }

    #[test]
    fn sparse_examples() {
        let spec = SparseSpec::new(2.0, Motif::triangle(), 0.05).unwrap();
        assert!((spec.mu0() - 4.0 / 3.0).abs() < 1e-15);
        let c: Vec<f64> = (0..100).map(|i| (i % 3) as f64).collect();
        let r = gof_sparse_from_counts(&c, 1000, &spec).unwrap();
        let want = normal::upper_quantile(0.05).unwrap() / (100.0f64 * 4.0 / 3.0).sqrt();
        assert!((r.threshold - want).abs() < 1e-15);
        assert!((r.threshold - 0.1424485).abs() < 1e-6);
        // λ̂ = 0 fails to reject
        let zero = gof_sparse_from_counts(&[4.0 / 3.0 - 1.0, 4.0 / 3.0 + 1.0], 100, &spec).unwrap();
        assert!(zero.lambda_hat[0].abs() < 1e-12);
        assert_eq!(zero.decision, Decision::FailToReject);
        assert!(SparseSpec::new(2.0, Motif::path2(), 0.05).is_ok());
        assert!(SparseSpec::new(0.0, Motif::triangle(), 0.05).is_err());
    }

    #[test]
    fn sparse_triangle_free_sample_fails_to_reject() {
        let spec = SparseSpec::new(2.0, Motif::triangle(), 0.05).unwrap();
        let r = gof_sparse_from_counts(&rep(0.0, 5), 50, &spec).unwrap();
        assert_eq!(r.diagnostics.feasibility[0], FeasibilityStatus::AllNonPositive);
        assert_eq!(r.decision, Decision::FailToReject);
    }

    #[test]
    fn two_sample_sparse_examples() {
        let spec = SparseSpec::new(2.0, Motif::triangle(), 0.05).unwrap();
        let c: Vec<f64> = (0..100).map(|i| (i % 4) as f64).collect();
        let r = two_sample_sparse_from_counts(&c, &c, 100, &spec).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.decision, Decision::FailToReject);

        // symmetric counts around h0 give λ̂ = 0 in both samples
        let h0 = 4.0 / 3.0;
        let mut s = rep(h0 - 1.0, 50);
        s.extend(rep(h0 + 1.0, 50));
        let r = two_sample_sparse_from_counts(&s, &s, 100, &spec).unwrap();
        let sigma2 = (0.02) / h0;
        assert!((r.diagnostics.components["sigma_hat"].powi(2) - sigma2).abs() < 1e-12);
        assert!((r.threshold - 0.2400).abs() < 5e-5);
        assert!((r.threshold - normal::upper_quantile(0.025).unwrap() * sigma2.sqrt()).abs() < 1e-12);

        match two_sample_sparse_from_counts(&rep(0.0, 10), &c, 100, &spec) {
            Err(Error::TwoSampleInfeasible { sample, status }) => {
                assert_eq!(sample, 1);
                assert_eq!(status, FeasibilityStatus::AllNonPositive);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dense_examples() {
        let spec = DenseSpec::new(DenseNull::Er { p0: 0.3 }, Motif::triangle(), CnRule::Default, 0.1, 1.0).unwrap();
        let cn = spec.cn().value(30);
        assert!((cn - 900.0 / 900f64.ln()).abs() < 1e-12);
        assert!((-1.0 / cn + 0.0075582164).abs() < 1e-9);
        assert_eq!(Direction::Lower.decide(-0.1, -1.0 / cn), Decision::Reject);
        assert_eq!(Direction::Lower.decide(0.001, -1.0 / cn), Decision::FailToReject);
        assert!((spec.h0(30) - 4060.0 * 0.027).abs() < 1e-9);

        let s: Vec<f64> = (0..40).map(|i| 100.0 + i as f64).collect();
        let r = two_sample_dense_from_counts(&s, &s, 30, &DenseSpec::new(DenseNull::Er { p0: 0.3 }, Motif::triangle(), CnRule::Default, 0.69, 1.0).unwrap()).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.threshold - 1.0 / 900.0).abs() < 1e-15);
        assert_eq!(Direction::TwoSided.decide(0.01, r.threshold), Decision::Reject);
    }

    #[test]
    fn dense_scaled_identity() {
        let spec = DenseSpec::new(DenseNull::Er { p0: 0.3 }, Motif::triangle(), CnRule::Default, 0.1, 1.0).unwrap();
        let mut rng = RngStream::new(3, 0);
        let gs: Vec<Graph> = (0..20).map(|_| sample_er(&ErModel::new(30, 0.3).unwrap(), &mut rng)).collect();
        let r = gof_dense(&gs, &spec).unwrap();
        let counts = motif_counts(&gs, &Motif::triangle()).unwrap();
        let raw = solve_root(&CenteredCounts::from_counts(&counts, spec.h0(30), 1.0).unwrap()).unwrap();
        assert_eq!(r.lambda_hat[0], 30.0 * raw.lambda_hat);
    }

    #[test]
    fn dense_refusals() {
        let bad = ErgmTerms::edge_triangle(-1.0, 1.0).unwrap();
        assert!(matches!(
            DenseSpec::new(DenseNull::Ergm { terms: bad }, Motif::triangle(), CnRule::Default, 0.1, 1.0),
            Err(Error::NotSubcritical(_))
        ));
        assert!(DenseSpec::new(DenseNull::Er { p0: 0.3 }, Motif::triangle(), CnRule::Default, 1.0, 1.0).is_err());
        let spec = DenseSpec::new(DenseNull::Er { p0: 0.3 }, Motif::triangle(), CnRule::Default, 0.1, 1.0).unwrap();
        // all far below the null on a small sample: one-sided evidence but too few graphs
        assert!(matches!(gof_dense_from_counts(&rep(1.0, 5), 30, &spec), Err(Error::InfeasibleSample { .. })));
        let r = gof_dense_from_counts(&rep(1.0, 40), 30, &spec).unwrap();
        assert_eq!(r.decision, Decision::Reject);
        assert_eq!(r.lambda_hat[0], f64::NEG_INFINITY);
        assert!(two_sample_dense_from_counts(&rep(1.0, 5), &rep(1.0, 5), 30, &spec).is_err());
    }

    #[test]
    fn ergm_null_center_uses_fixed_point() {
        let terms = ErgmTerms::edge_triangle(-0.35, 0.05).unwrap();
        let p = subcritical_check(&terms).unwrap().p_star().unwrap();
        let spec = DenseSpec::new(DenseNull::Ergm { terms }, Motif::triangle(), CnRule::Default, 0.1, 1.0).unwrap();
        assert!((spec.h0(20) - 6840.0 * p.powi(3) / 6.0).abs() < 1e-9);
    }

    #[test]
    fn mixed_vertex_counts_rejected() {
        let gs = [Graph::empty(4), Graph::empty(5)];
        assert!(matches!(gof_fixed(&gs, &Motif::triangle(), 1.0, 0.05), Err(Error::IncompatibleSamples(_))));
    }
}
