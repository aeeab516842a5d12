use alloc::boxed::Box;
use alloc::string::String;

use crate::lagrange::FeasibilityStatus;
use crate::sampler::SubcriticalReport;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid vertex pair ({i}, {j}) for a graph on {m} vertices")]
    InvalidPair { i: usize, j: usize, m: usize },

    #[error("{what}: size {got} exceeds the limit {limit}")]
    SizeLimit { what: &'static str, limit: usize, got: usize },

    #[error("unsupported motif: {0}")]
    UnsupportedMotif(String),

    #[error("empty sample")]
    EmptySample,

    #[error("no finite root: centered counts are {0}")]
    NoRoot(FeasibilityStatus),

    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("model is not subcritical")]
    NotSubcritical(Box<SubcriticalReport>),

    #[error("no critical point with |lambda| <= {bound}")]
    NoCriticalPoint { bound: f64 },

    #[error("sample has zero variance")]
    DegenerateSample,

    #[error("only {n} samples with {status} centered counts; at least {required} needed to decide")]
    InfeasibleSample { status: FeasibilityStatus, n: usize, required: usize },

    #[error("two-sample test infeasible: sample {sample} has {status} centered counts")]
    TwoSampleInfeasible { sample: usize, status: FeasibilityStatus },

    #[error("incompatible samples: {0}")]
    IncompatibleSamples(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("64-bit count overflow")]
    CountOverflow,
}
