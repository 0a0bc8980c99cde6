//! Homogeneous bent Boolean functions: exact transforms and properties,
//! counts and densities by enumeration and closed forms, and a steady-state
//! evolutionary search over four genotype encodings.

pub mod boolfn;
pub mod census;
pub mod encodings;
pub mod engine;
pub mod error;
pub mod fitness;
pub mod harness;

pub use boolfn::{
    algebraic_degree, anf_to_truth_table, homogeneity_repair, is_bent, is_homogeneous,
    mobius_transform, monomial_count, nonlinearity, walsh_hadamard, AnfVector, TruthTable,
    WalshSpectrum,
};
pub use encodings::{Encoding, Genotype};
pub use engine::{run_sst, EngineConfig, FitnessKind, RunResult};
pub use error::{Error, Result};
pub use fitness::{fit_bent, fit_bent_k, FitnessValue};
