//! Erdős–Rényi and ferromagnetic ERGM samplers, and the subcritical
//! fixed-point analysis of the mean-field equation `φ_β(u) = u`.
//!
//! The ERGM puts mass proportional to `exp(H(G))` on graphs with
//! `H(G) = m² Σ_k β_k t(T_k, G)`. Chains use systematic-scan Glauber
//! dynamics: every edge slot is resampled from its full conditional
//! `exp(ΔH) / (1 + exp(ΔH))` once per sweep.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::count::hom_count;
use crate::error::{Error, Result};
use crate::graph::{Adjacency, Graph};
use crate::motif::Motif;
use crate::rng::RngStream;

/// Grid resolution of the fixed-point scan.
pub const FIXED_POINT_GRID: usize = 10_000;
/// Bisection tolerance on each fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-12;

/// `G(m, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErModel {
    pub m: usize,
    pub p: f64,
}

impl ErModel {
    pub fn new(m: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Domain { value: p, domain: "[0, 1]" });
        }
        if m == 0 {
            return Err(Error::InvalidParameter("graphs need at least one vertex".into()));
        }
        Ok(Self { m, p })
    }
}

/// The coefficients `(T_k, β_k)` of an ERGM, independent of the graph size.
/// `T_1` is always the single edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgmTerms {
    terms: Vec<(Motif, f64)>,
    ferromagnetic: bool,
}

impl ErgmTerms {
    pub fn new(terms: Vec<(Motif, f64)>) -> Result<Self> {
        match terms.first() {
            Some((t, _)) if t.edge_count() == 1 => {}
            _ => return Err(Error::InvalidParameter("the first ERGM term must be the single edge".into())),
        }
        if let Some((_, b)) = terms.iter().find(|(_, b)| !b.is_finite()) {
            return Err(Error::Domain { value: *b, domain: "finite reals" });
        }
        let ferromagnetic = terms[1..].iter().all(|(_, b)| *b > 0.0);
        Ok(Self { terms, ferromagnetic })
    }

    /// Edge-only model, i.e. `G(m, e^{2β}/(1+e^{2β}))`.
    pub fn edge_only(beta: f64) -> Result<Self> {
        Self::new(alloc::vec![(Motif::edge(), beta)])
    }

    /// Edge plus triangle.
    pub fn edge_triangle(beta1: f64, beta2: f64) -> Result<Self> {
        Self::new(alloc::vec![(Motif::edge(), beta1), (Motif::triangle(), beta2)])
    }

    pub fn terms(&self) -> &[(Motif, f64)] {
        &self.terms
    }

    pub fn betas(&self) -> Vec<f64> {
        self.terms.iter().map(|(_, b)| *b).collect()
    }

    /// All non-edge coefficients are strictly positive.
    pub fn is_ferromagnetic(&self) -> bool {
        self.ferromagnetic
    }

    /// `Φ_β(a) = Σ β_k e_k a^{e_k - 1}`.
    pub fn phi_big(&self, a: f64) -> f64 {
        self.terms.iter().map(|(t, b)| b * t.edge_count() as f64 * a.powi(t.edge_count() as i32 - 1)).sum()
    }

    /// `Φ'_β(a)`.
    pub fn phi_big_prime(&self, a: f64) -> f64 {
        self.terms
            .iter()
            .filter(|(t, _)| t.edge_count() > 1)
            .map(|(t, b)| {
                let e = t.edge_count() as f64;
                b * e * (e - 1.0) * a.powi(t.edge_count() as i32 - 2)
            })
            .sum()
    }

    /// `φ_β(a) = e^{2Φ}/(1 + e^{2Φ})`.
    pub fn phi(&self, a: f64) -> f64 {
        logistic(2.0 * self.phi_big(a))
    }

    /// `φ'_β(a) = 2Φ'(a) φ(a) (1 - φ(a))`.
    pub fn phi_prime(&self, a: f64) -> f64 {
        let f = self.phi(a);
        2.0 * self.phi_big_prime(a) * f * (1.0 - f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgmModel {
    pub m: usize,
    pub terms: ErgmTerms,
}

impl ErgmModel {
    pub fn new(m: usize, terms: ErgmTerms) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("graphs need at least one vertex".into()));
        }
        Ok(Self { m, terms })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub seed: u64,
    /// Sweeps discarded before the first retained graph.
    pub burn_in: usize,
    /// Sweeps between retained graphs; at least one.
    pub thin: usize,
    pub stream: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self { seed: 0, burn_in: 50, thin: 5, stream: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubcriticalReport {
    /// Solutions of `φ_β(u) = u` in `(0, 1)`, ascending.
    pub fixed_points: Vec<f64>,
    /// `φ'_β` at each fixed point.
    pub derivatives: Vec<f64>,
    pub is_subcritical: bool,
}

impl SubcriticalReport {
    /// `p(β)`, the unique fixed point of a subcritical model.
    pub fn p_star(&self) -> Option<f64> {
        if self.is_subcritical {
            self.fixed_points.first().copied()
        } else {
            None
        }
    }
}

pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Samples `G(m, p)`. Sparse models skip over absent pairs geometrically.
pub fn sample_er(model: &ErModel, rng: &mut RngStream) -> Graph {
    let mut g = Graph::empty(model.m);
    let n = g.pair_count();
    let p = model.p;
    if p <= 0.0 {
        return g;
    }
    if p >= 1.0 {
        return Graph::complete(model.m);
    }
    if p < 0.1 {
        let log_q = (-p).ln_1p();
        let mut idx = 0usize;
        loop {
            // skip ~ Geometric(p) failures before the next success
            let u: f64 = 1.0 - rng.random::<f64>();
            let skip = (u.ln() / log_q).floor();
            if skip >= (n - idx) as f64 {
                break;
            }
            idx += skip as usize;
            g.set_bit(idx, true);
            idx += 1;
            if idx >= n {
                break;
            }
        }
    } else {
        for idx in 0..n {
            if rng.random::<f64>() < p {
                g.set_bit(idx, true);
            }
        }
    }
    g
}

/// `H(G) = m² Σ_k β_k t(T_k, G)`.
pub fn ergm_hamiltonian(g: &Graph, terms: &ErgmTerms) -> Result<f64> {
    let m = g.vertex_count() as f64;
    let mut total = 0.0;
    for (t, b) in terms.terms() {
        if *b == 0.0 {
            continue;
        }
        let hom = hom_count(g, t)? as f64;
        total += b * hom / m.powi(t.vertex_count() as i32 - 2);
    }
    Ok(total)
}

/// Fixed points of `φ_β(u) = u`, with their derivatives.
///
/// Scans `φ_β(u) - u` on a regular grid of `10^4` cells and refines each sign
/// change by bisection. Only ferromagnetic coefficients are supported.
pub fn subcritical_check(terms: &ErgmTerms) -> Result<SubcriticalReport> {
    if !terms.is_ferromagnetic() {
        return Err(Error::UnsupportedRegime(format!(
            "non-ferromagnetic coefficients {:?}; every non-edge coefficient must be positive",
            terms.betas()
        )));
    }
    let d = |u: f64| terms.phi(u) - u;
    let mut fixed_points = Vec::new();
    let mut prev_u = 0.0;
    let mut prev = d(prev_u);
    for k in 1..=FIXED_POINT_GRID {
        let u = k as f64 / FIXED_POINT_GRID as f64;
        let cur = d(u);
        if cur == 0.0 {
            fixed_points.push(u);
        } else if prev != 0.0 && (prev > 0.0) != (cur > 0.0) {
            let (mut lo, mut hi) = (prev_u, u);
            let lo_pos = prev > 0.0;
            while hi - lo > FIXED_POINT_TOL {
                let mid = 0.5 * (lo + hi);
                if (d(mid) > 0.0) == lo_pos {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            fixed_points.push(0.5 * (lo + hi));
        }
        prev_u = u;
        prev = cur;
    }
    fixed_points.retain(|&u| u > 0.0 && u < 1.0);
    let derivatives: Vec<f64> = fixed_points.iter().map(|&u| terms.phi_prime(u)).collect();
    let is_subcritical = fixed_points.len() == 1 && derivatives[0] < 1.0;
    Ok(SubcriticalReport { fixed_points, derivatives, is_subcritical })
}

/// Change in `H` from switching pair `(i, j)` on, given the rest of the graph.
struct DeltaH<'a> {
    terms: &'a ErgmTerms,
    m: f64,
    /// Coefficient on `codeg(i, j)` from triangle terms.
    triangle: f64,
    /// Constant part from edge terms.
    edge: f64,
    fallback: bool,
}

impl<'a> DeltaH<'a> {
    fn new(terms: &'a ErgmTerms, m: usize) -> Self {
        let mut edge = 0.0;
        let mut triangle = 0.0;
        let mut fallback = false;
        for (t, b) in terms.terms() {
            match (t.vertex_count(), t.edge_count()) {
                (2, 1) => edge += 2.0 * b,
                (3, 3) => triangle += 6.0 * b / m as f64,
                _ => fallback |= *b != 0.0,
            }
        }
        Self { terms, m: m as f64, triangle, edge, fallback }
    }

    fn eval(&self, g: &mut Graph, adj: &Adjacency, i: usize, j: usize) -> Result<f64> {
        let mut dh = self.edge;
        if self.triangle != 0.0 {
            dh += self.triangle * adj.codegree(i, j) as f64;
        }
        if self.fallback {
            let was = g.has_edge(i, j);
            let mut other = 0.0;
            for on in [true, false] {
                g.set_edge(i, j, on);
                let sign = if on { 1.0 } else { -1.0 };
                for (t, b) in self.terms.terms() {
                    if *b == 0.0 || matches!((t.vertex_count(), t.edge_count()), (2, 1) | (3, 3)) {
                        continue;
                    }
                    let hom = hom_count(g, t)? as f64;
                    other += sign * b * hom / self.m.powi(t.vertex_count() as i32 - 2);
                }
            }
            g.set_edge(i, j, was);
            dh += other;
        }
        Ok(dh)
    }
}

/// A single Glauber chain; exposed so long runs can be inspected sweep by sweep.
pub struct GlauberChain<'a> {
    graph: Graph,
    adj: Adjacency,
    delta: DeltaH<'a>,
    rng: RngStream,
}

impl<'a> GlauberChain<'a> {
    pub fn new(model: &'a ErgmModel, start: Graph, rng: RngStream) -> Self {
        let adj = Adjacency::new(&start);
        Self { delta: DeltaH::new(&model.terms, model.m), graph: start, adj, rng }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    /// One systematic-scan pass over all pairs.
    pub fn sweep(&mut self) -> Result<()> {
        let m = self.graph.vertex_count();
        for i in 0..m {
            for j in i + 1..m {
                let dh = self.delta.eval(&mut self.graph, &self.adj, i, j)?;
                let on = self.rng.random::<f64>() < logistic(dh);
                if on != self.graph.has_edge(i, j) {
                    self.graph.set_edge(i, j, on);
                    self.adj.set(i, j, on);
                }
            }
        }
        Ok(())
    }
}

/// `n` graphs from one Glauber chain started at `G(m, p*)`.
///
/// A model that is not subcritical is refused unless `allow_supercritical`
/// is set, in which case the chain starts from the smallest fixed point.
pub fn sample_ergm(model: &ErgmModel, config: &SamplerConfig, n: usize, allow_supercritical: bool) -> Result<Vec<Graph>> {
    if config.thin == 0 {
        return Err(Error::InvalidParameter("thin must be at least 1".into()));
    }
    let start_p = if model.terms.is_ferromagnetic() {
        let report = subcritical_check(&model.terms)?;
        match report.p_star() {
            Some(p) => p,
            None if allow_supercritical => report.fixed_points.first().copied().unwrap_or(0.5),
            None => return Err(Error::NotSubcritical(Box::new(report))),
        }
    } else if allow_supercritical {
        model.terms.phi(0.5)
    } else {
        return Err(Error::UnsupportedRegime("non-ferromagnetic ERGM".into()));
    };
    let mut rng = RngStream::new(config.seed, config.stream);
    let start = sample_er(&ErModel { m: model.m, p: start_p }, &mut rng);
    let mut chain = GlauberChain::new(model, start, rng);
    for _ in 0..config.burn_in {
        chain.sweep()?;
    }
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        for _ in 0..config.thin {
            chain.sweep()?;
        }
        out.push(chain.graph().clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn all_graphs(m: usize) -> impl Iterator<Item = Graph> {
        let n = m * (m - 1) / 2;
        (0u64..1 << n).map(move |mask| {
            let mut g = Graph::empty(m);
            for b in 0..n {
                if mask >> b & 1 == 1 {
                    g.set_bit(b, true);
                }
            }
            g
        })
    }

    fn mask_of(g: &Graph) -> usize {
        (0..g.pair_count()).filter(|&b| g.bit(b)).map(|b| 1 << b).sum()
    }

    #[test]
    fn er_extremes_and_determinism() {
        let mut rng = RngStream::new(1, 0);
        assert_eq!(sample_er(&ErModel::new(7, 0.0).unwrap(), &mut rng).edge_count(), 0);
        assert_eq!(sample_er(&ErModel::new(7, 1.0).unwrap(), &mut rng).edge_count(), 21);
        let model = ErModel::new(50, 0.5).unwrap();
        let a = sample_er(&model, &mut RngStream::new(9, 2));
        let b = sample_er(&model, &mut RngStream::new(9, 2));
        assert_eq!(a.bits(), b.bits());
        assert!(ErModel::new(3, 1.5).is_err());
    }

    #[test]
    fn er_edge_frequency() {
        // both the skipping path and the Bernoulli path
        for p in [0.02, 0.3] {
            let model = ErModel::new(60, p).unwrap();
            let mut rng = RngStream::new(5, 0);
            let reps = 200;
            let total: usize = (0..reps).map(|_| sample_er(&model, &mut rng).edge_count()).sum();
            let n = (reps * 60 * 59 / 2) as f64;
            let se = (p * (1.0 - p) / n).sqrt();
            assert!((total as f64 / n - p).abs() < 4.0 * se, "p={p}");
        }
    }

    #[test]
    fn hamiltonian_examples() {
        let k4 = Graph::complete(4);
        let edge = ErgmTerms::edge_only(0.5).unwrap();
        assert_eq!(ergm_hamiltonian(&Graph::empty(4), &edge).unwrap(), 0.0);
        assert!((ergm_hamiltonian(&k4, &edge).unwrap() - 6.0).abs() < 1e-12);
        let tri = ErgmTerms::edge_triangle(0.0, 1.0).unwrap();
        assert!((ergm_hamiltonian(&k4, &tri).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn incremental_delta_matches_recount() {
        let terms = ErgmTerms::new(vec![(Motif::edge(), -0.3), (Motif::triangle(), 0.4), (Motif::cycle(4), 0.2)]).unwrap();
        let model = ErgmModel::new(7, terms).unwrap();
        let mut g = sample_er(&ErModel::new(7, 0.5).unwrap(), &mut RngStream::new(3, 0));
        let adj = Adjacency::new(&g);
        let delta = DeltaH::new(&model.terms, 7);
        for (i, j) in [(0, 1), (2, 5), (3, 6)] {
            let got = delta.eval(&mut g, &adj, i, j).unwrap();
            let mut on = g.clone();
            on.add_edge(i, j);
            let mut off = g.clone();
            off.remove_edge(i, j);
            let want = ergm_hamiltonian(&on, &model.terms).unwrap() - ergm_hamiltonian(&off, &model.terms).unwrap();
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn subcritical_examples() {
        let r = subcritical_check(&ErgmTerms::edge_only(0.0).unwrap()).unwrap();
        assert!(r.is_subcritical);
        assert!((r.fixed_points[0] - 0.5).abs() < 1e-12);
        assert_eq!(r.derivatives[0], 0.0);

        let b = -0.4;
        let r = subcritical_check(&ErgmTerms::edge_only(b).unwrap()).unwrap();
        let p = r.p_star().unwrap();
        assert!((p - logistic(2.0 * b)).abs() < 1e-12);
        // 2Φ(p*) = logit(p*)
        assert!((2.0 * b - (p / (1.0 - p)).ln()).abs() < 1e-9);

        let r = subcritical_check(&ErgmTerms::edge_triangle(-1.0, 1.0).unwrap()).unwrap();
        assert_eq!(r.fixed_points.len(), 3);
        assert!(!r.is_subcritical);

        assert!(matches!(
            subcritical_check(&ErgmTerms::edge_triangle(0.1, -0.2).unwrap()),
            Err(Error::UnsupportedRegime(_))
        ));
    }

    #[test]
    fn fixed_points_match_naive_scan() {
        // sign changes of 2Φ(u) - logit(u) on a finer grid
        let terms = ErgmTerms::edge_triangle(-1.0, 1.0).unwrap();
        let f = |u: f64| 2.0 * terms.phi_big(u) - (u / (1.0 - u)).ln();
        let grid = 200_000;
        let mut naive = vec![];
        for k in 1..grid - 1 {
            let (a, b) = (k as f64 / grid as f64, (k + 1) as f64 / grid as f64);
            if (f(a) > 0.0) != (f(b) > 0.0) {
                naive.push(a);
            }
        }
        let r = subcritical_check(&terms).unwrap();
        assert_eq!(naive.len(), r.fixed_points.len());
        for (x, y) in naive.iter().zip(&r.fixed_points) {
            assert!((x - y).abs() < 2.0 / grid as f64);
        }
    }

    #[test]
    fn refuses_non_subcritical_without_override() {
        let model = ErgmModel::new(6, ErgmTerms::edge_triangle(-1.0, 1.0).unwrap()).unwrap();
        let cfg = SamplerConfig::default();
        match sample_ergm(&model, &cfg, 2, false) {
            Err(Error::NotSubcritical(r)) => assert_eq!(r.fixed_points.len(), 3),
            other => panic!("{other:?}"),
        }
        assert_eq!(sample_ergm(&model, &cfg, 2, true).unwrap().len(), 2);
    }

    #[test]
    fn glauber_matches_enumeration() {
        let m = 4;
        let model = ErgmModel::new(m, ErgmTerms::edge_triangle(0.2, 0.1).unwrap()).unwrap();
        let graphs: Vec<Graph> = all_graphs(m).collect();
        let logw: Vec<f64> = graphs.iter().map(|g| ergm_hamiltonian(g, &model.terms).unwrap()).collect();
        let z: f64 = logw.iter().map(|w| w.exp()).sum();
        let exact: Vec<f64> = logw.iter().map(|w| w.exp() / z).collect();
        let cfg = SamplerConfig { seed: 11, burn_in: 50, thin: 1, stream: 0 };
        let n = 200_000;
        let mut freq = vec![0usize; graphs.len()];
        for g in sample_ergm(&model, &cfg, n, false).unwrap() {
            freq[mask_of(&g)] += 1;
        }
        let tv: f64 = 0.5 * freq.iter().zip(&exact).map(|(&c, p)| (c as f64 / n as f64 - p).abs()).sum::<f64>();
        assert!(tv <= 0.02, "tv={tv}");
    }

    #[test]
    fn ergm_sampling_is_deterministic() {
        let model = ErgmModel::new(10, ErgmTerms::edge_triangle(-0.35, 0.05).unwrap()).unwrap();
        let cfg = SamplerConfig { seed: 4, burn_in: 3, thin: 1, stream: 1 };
        let a = sample_ergm(&model, &cfg, 5, false).unwrap();
        let b = sample_ergm(&model, &cfg, 5, false).unwrap();
        assert_eq!(a, b);
    }
}
