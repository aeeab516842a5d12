//! Monte Carlo level and power studies.
//!
//! Replication `r` draws its first sample from stream `2r` and its second
//! (two-sample tests only) from stream `2r + 1` of the study seed, so results
//! do not depend on how replications are scheduled across threads.

use std::time::{Duration, Instant};

use lmnet_core::nettest::{self, serde_real, CnRule, DenseNull, DenseSpec, SparseSpec, TestReport};
use lmnet_core::{
    count_motif, sample_er, sample_ergm, Decision, ErModel, ErgmModel, ErgmTerms, FeasibilityStatus, Graph, Motif,
    RngStream, SamplerConfig,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Er {
        m: usize,
        p: f64,
    },
    Ergm {
        m: usize,
        motifs: Vec<String>,
        betas: Vec<f64>,
        #[serde(default)]
        allow_supercritical: bool,
    },
}

impl GeneratorSpec {
    pub fn vertex_count(&self) -> usize {
        match self {
            GeneratorSpec::Er { m, .. } | GeneratorSpec::Ergm { m, .. } => *m,
        }
    }
}

/// Null model of a dense test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NullSpec {
    Er { p0: f64 },
    Ergm { motifs: Vec<String>, betas: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "test", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TestSpec {
    GofFixed {
        motif: String,
        h0: f64,
    },
    GofSparse {
        motif: String,
        c0: f64,
    },
    TwoSampleSparse {
        motif: String,
        c0: f64,
    },
    GofDense {
        motif: String,
        null: NullSpec,
        /// Fixed `c_n`; `m²/log(m²)` when absent.
        cn: Option<f64>,
    },
    TwoSampleDense {
        motif: String,
        epsilon: f64,
        #[serde(default = "default_c")]
        c: f64,
    },
}

fn default_c() -> f64 {
    1.0
}

fn default_alpha() -> f64 {
    0.05
}

impl TestSpec {
    pub fn is_two_sample(&self) -> bool {
        matches!(self, TestSpec::TwoSampleSparse { .. } | TestSpec::TwoSampleDense { .. })
    }

    pub fn motif_name(&self) -> &str {
        match self {
            TestSpec::GofFixed { motif, .. }
            | TestSpec::GofSparse { motif, .. }
            | TestSpec::TwoSampleSparse { motif, .. }
            | TestSpec::GofDense { motif, .. }
            | TestSpec::TwoSampleDense { motif, .. } => motif,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSettings {
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
    #[serde(default = "default_thin")]
    pub thin: usize,
}

fn default_burn_in() -> usize {
    SamplerConfig::default().burn_in
}

fn default_thin() -> usize {
    SamplerConfig::default().thin
}

impl Default for ChainSettings {
    fn default() -> Self {
        Self { burn_in: default_burn_in(), thin: default_thin() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub generator: GeneratorSpec,
    /// Generator of the second sample; defaults to `generator`.
    #[serde(default)]
    pub generator2: Option<GeneratorSpec>,
    pub test: TestSpec,
    pub replications: usize,
    pub n: usize,
    /// Second sample size; defaults to `n`.
    #[serde(default)]
    pub n2: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default)]
    pub chain: ChainSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub index: usize,
    #[serde(with = "serde_real::vec")]
    pub lambda_hat: Vec<f64>,
    #[serde(with = "serde_real::one")]
    pub statistic: f64,
    #[serde(with = "serde_real::one")]
    pub threshold: f64,
    pub p_value: Option<f64>,
    pub decision: Decision,
    pub feasibility: Vec<FeasibilityStatus>,
}

/// Mean and standard deviation over the finite values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub finite: usize,
    pub non_finite: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
}

impl Summary {
    pub fn of(xs: impl IntoIterator<Item = f64>) -> Self {
        let mut finite = Vec::new();
        let mut non_finite = 0;
        for x in xs {
            if x.is_finite() {
                finite.push(x);
            } else {
                non_finite += 1;
            }
        }
        let k = finite.len();
        let mean = (k > 0).then(|| finite.iter().sum::<f64>() / k as f64);
        let sd = mean.filter(|_| k > 1).map(|mu| {
            (finite.iter().map(|x| (x - mu) * (x - mu)).sum::<f64>() / (k - 1) as f64).sqrt()
        });
        Self { finite: k, non_finite, mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub replications: usize,
    pub rejections: usize,
    pub rejection_rate: f64,
    /// One summary per multiplier position (two for two-sample tests).
    pub lambda_hat: Vec<Summary>,
    pub statistic: Summary,
    pub records: Vec<ReplicationRecord>,
    /// Wall-clock time; not serialized, so the JSON is reproducible.
    #[serde(skip)]
    pub runtime: Duration,
}

impl StudyResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("study results always serialize")
    }

    /// One CSV line per replication, header first.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("replication,lambda_hat,statistic,threshold,p_value,decision\n");
        for r in &self.records {
            let lambda = r.lambda_hat.iter().map(|&l| crate::report::fmt_real(l)).collect::<Vec<_>>().join(";");
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.index,
                lambda,
                crate::report::fmt_real(r.statistic),
                crate::report::fmt_real(r.threshold),
                r.p_value.map(crate::report::fmt_real).unwrap_or_default(),
                r.decision
            ));
        }
        out
    }
}

pub(crate) fn parse_terms(motifs: &[String], betas: &[f64]) -> Result<ErgmTerms> {
    if motifs.len() != betas.len() {
        return Err(Error::Usage(format!("{} motifs but {} coefficients", motifs.len(), betas.len())));
    }
    let terms = motifs
        .iter()
        .zip(betas)
        .map(|(name, &b)| Motif::by_name(name).map(|t| (t, b)))
        .collect::<lmnet_core::Result<Vec<_>>>()?;
    Ok(ErgmTerms::new(terms)?)
}

/// A generator with its model validated once up front.
enum Generator {
    Er(ErModel),
    Ergm { model: ErgmModel, allow: bool },
}

impl Generator {
    fn new(spec: &GeneratorSpec) -> Result<Self> {
        Ok(match spec {
            GeneratorSpec::Er { m, p } => Generator::Er(ErModel::new(*m, *p)?),
            GeneratorSpec::Ergm { m, motifs, betas, allow_supercritical } => Generator::Ergm {
                model: ErgmModel::new(*m, parse_terms(motifs, betas)?)?,
                allow: *allow_supercritical,
            },
        })
    }

    fn sample(&self, n: usize, seed: u64, stream: u64, chain: ChainSettings) -> lmnet_core::Result<Vec<Graph>> {
        match self {
            Generator::Er(model) => {
                let mut rng = RngStream::new(seed, stream);
                Ok((0..n).map(|_| sample_er(model, &mut rng)).collect())
            }
            Generator::Ergm { model, allow } => {
                let cfg = SamplerConfig { seed, burn_in: chain.burn_in, thin: chain.thin, stream };
                sample_ergm(model, &cfg, n, *allow)
            }
        }
    }
}

/// The test of a study, with its specification validated once.
pub enum PreparedTest {
    Fixed { motif: Motif, h0: f64, alpha: f64 },
    Sparse { spec: SparseSpec, two_sample: bool },
    Dense { spec: DenseSpec, two_sample: bool },
}

impl PreparedTest {
    pub fn new(spec: &TestSpec, alpha: f64) -> Result<Self> {
        Ok(match spec {
            TestSpec::GofFixed { motif, h0 } => PreparedTest::Fixed { motif: Motif::by_name(motif)?, h0: *h0, alpha },
            TestSpec::GofSparse { motif, c0 } => {
                PreparedTest::Sparse { spec: SparseSpec::new(*c0, Motif::by_name(motif)?, alpha)?, two_sample: false }
            }
            TestSpec::TwoSampleSparse { motif, c0 } => {
                PreparedTest::Sparse { spec: SparseSpec::new(*c0, Motif::by_name(motif)?, alpha)?, two_sample: true }
            }
            TestSpec::GofDense { motif, null, cn } => {
                let null = match null {
                    NullSpec::Er { p0 } => DenseNull::Er { p0: *p0 },
                    NullSpec::Ergm { motifs, betas } => DenseNull::Ergm { terms: parse_terms(motifs, betas)? },
                };
                let cn = cn.map(CnRule::Fixed).unwrap_or(CnRule::Default);
                PreparedTest::Dense { spec: DenseSpec::new(null, Motif::by_name(motif)?, cn, 0.5, 1.0)?, two_sample: false }
            }
            TestSpec::TwoSampleDense { motif, epsilon, c } => PreparedTest::Dense {
                // the null does not enter the two-sample statistic
                spec: DenseSpec::new(DenseNull::Er { p0: 1.0 - epsilon }, Motif::by_name(motif)?, CnRule::Default, *epsilon, *c)?,
                two_sample: true,
            },
        })
    }

    pub fn motif(&self) -> &Motif {
        match self {
            PreparedTest::Fixed { motif, .. } => motif,
            PreparedTest::Sparse { spec, .. } => spec.motif(),
            PreparedTest::Dense { spec, .. } => spec.motif(),
        }
    }

    pub fn is_two_sample(&self) -> bool {
        matches!(self, PreparedTest::Sparse { two_sample: true, .. } | PreparedTest::Dense { two_sample: true, .. })
    }

    /// Runs the test on motif counts of graphs with `m` vertices.
    pub fn run_counts(&self, counts1: &[f64], counts2: Option<&[f64]>, m: usize) -> lmnet_core::Result<TestReport> {
        let need_second = || {
            counts2.ok_or_else(|| lmnet_core::Error::InvalidParameter("two-sample test needs a second sample".into()))
        };
        match self {
            PreparedTest::Fixed { motif, h0, alpha } => nettest::gof_fixed_from_counts(counts1, m, motif.name(), *h0, *alpha),
            PreparedTest::Sparse { spec, two_sample: false } => nettest::gof_sparse_from_counts(counts1, m, spec),
            PreparedTest::Sparse { spec, two_sample: true } => {
                nettest::two_sample_sparse_from_counts(counts1, need_second()?, m, spec)
            }
            PreparedTest::Dense { spec, two_sample: false } => nettest::gof_dense_from_counts(counts1, m, spec),
            PreparedTest::Dense { spec, two_sample: true } => {
                nettest::two_sample_dense_from_counts(counts1, need_second()?, m, spec)
            }
        }
    }
}

fn counts_of(graphs: &[Graph], motif: &Motif) -> lmnet_core::Result<Vec<f64>> {
    graphs.iter().map(|g| count_motif(g, motif).map(|c| c as f64)).collect()
}

/// Runs `config.replications` independent replications in parallel.
pub fn mc_study(config: &StudyConfig) -> Result<StudyResult> {
    if config.replications == 0 || config.n == 0 || config.n2 == Some(0) {
        return Err(Error::Config("replications and sample sizes must be at least 1".into()));
    }
    let start = Instant::now();
    let test = PreparedTest::new(&config.test, config.alpha)?;
    let gen1 = Generator::new(&config.generator)?;
    let spec2 = config.generator2.as_ref().unwrap_or(&config.generator);
    let gen2 = Generator::new(spec2)?;
    let m = config.generator.vertex_count();
    if spec2.vertex_count() != m {
        return Err(Error::Config("both generators must use the same vertex count".into()));
    }
    let n2 = config.n2.unwrap_or(config.n);
    let motif = test.motif().clone();

    let run = |r: usize| -> lmnet_core::Result<ReplicationRecord> {
        let s1 = gen1.sample(config.n, config.seed, 2 * r as u64, config.chain)?;
        let c1 = counts_of(&s1, &motif)?;
        drop(s1);
        let c2 = if test.is_two_sample() {
            Some(counts_of(&gen2.sample(n2, config.seed, 2 * r as u64 + 1, config.chain)?, &motif)?)
        } else {
            None
        };
        let report = test.run_counts(&c1, c2.as_deref(), m)?;
        Ok(ReplicationRecord {
            index: r,
            lambda_hat: report.lambda_hat,
            statistic: report.statistic,
            threshold: report.threshold,
            p_value: report.p_value,
            decision: report.decision,
            feasibility: report.diagnostics.feasibility,
        })
    };
    // indexed collection keeps replication order regardless of scheduling
    let outcomes: Vec<lmnet_core::Result<ReplicationRecord>> = (0..config.replications).into_par_iter().map(run).collect();
    let mut records = Vec::with_capacity(outcomes.len());
    for (r, out) in outcomes.into_iter().enumerate() {
        records.push(out.map_err(|source| Error::Replication { replication: r, source })?);
    }
    Ok(summarize(config.clone(), records, start.elapsed()))
}

/// Aggregates replication records; the result depends only on the records'
/// contents, not on the order they arrive in.
pub fn summarize(config: StudyConfig, mut records: Vec<ReplicationRecord>, runtime: Duration) -> StudyResult {
    records.sort_by_key(|r| r.index);
    let replications = records.len();
    let rejections = records.iter().filter(|r| r.decision.is_reject()).count();
    let width = records.iter().map(|r| r.lambda_hat.len()).max().unwrap_or(0);
    let lambda_hat = (0..width).map(|k| Summary::of(records.iter().filter_map(|r| r.lambda_hat.get(k).copied()))).collect();
    let statistic = Summary::of(records.iter().map(|r| r.statistic));
    StudyResult {
        config,
        replications,
        rejections,
        rejection_rate: rejections as f64 / replications as f64,
        lambda_hat,
        statistic,
        records,
        runtime,
    }
}
