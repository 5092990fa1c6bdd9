//! Simulation and analysis of repeated Ramsey measurements under low-frequency qubit noise.
//!
//! The crate covers telegraph (TLS) noise and Gaussian noise with closed-form outcome correlators,
//! Monte-Carlo generation of measurement records, and estimators for the statistics they produce.

pub mod acquisition;
pub mod error;
pub mod estimate;
pub mod gaussian;
pub mod model;
pub mod quad;
pub mod rng;
pub mod scenario;
pub mod simulate;
pub mod special;
pub mod theory;
pub mod tls;

pub use error::{Error, Result};
pub use model::{
    mean_frequency_shift, ramsey_probability, tls_stationary, CorrelatorEstimate, GaussianNoiseSpec, OutcomeSeries,
    PhaseCorrelators, RamseyProtocol, TlsEnsemble, TlsParams,
};
