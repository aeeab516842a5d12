//! Maximum-entropy Lagrange-multiplier tests for samples of random graphs.
//!
//! The crate is `no_std` and only needs `alloc`. It contains the pure
//! algorithmic pieces: graph storage and motif counting, Erdős–Rényi and
//! ERGM samplers, the tilted root solver, closed-form Poisson tilts, the
//! constant-graphon variational problem, and the hypothesis tests built on
//! top of them. File formats, Monte Carlo studies and the CLI live in the
//! `lmnet` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod count;
pub mod error;
pub mod graph;
pub mod lagrange;
pub mod motif;
pub mod nettest;
pub mod normal;
pub mod poisson;
pub mod rng;
pub mod sampler;
pub mod variational;

pub use count::{count_motif, expected_count_er, hom_count, hom_density};
pub use error::{Error, Result};
pub use graph::{edge_index, Graph};
pub use lagrange::{
    feasibility, solve_root, solve_root_scaled, weights, CenteredCounts, FeasibilityStatus,
    LagrangeSolution,
};
pub use motif::{aut_count, motif_profile, Density, Motif};
pub use nettest::{
    exact_lambda_fixed, gof_dense, gof_fixed, gof_sparse, two_sample_dense, two_sample_sparse, CnRule,
    Decision, DenseNull, DenseSpec, Direction, GraphLaw, SparseSpec, TestReport,
};
pub use poisson::PoissonTilt;
pub use rng::RngStream;
pub use sampler::{
    ergm_hamiltonian, sample_er, sample_ergm, subcritical_check, ErModel, ErgmModel, ErgmTerms,
    SamplerConfig, SubcriticalReport,
};
pub use variational::{g_of_lambda, lambda_circ, maximize_u, sharp_rate_constant, SharpRate, VariationalModel};
