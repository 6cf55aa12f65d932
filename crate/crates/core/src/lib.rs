//! Simulation library for continuous-variable quantum telecloning.
//!
//! The crate computes clone fidelities, quadrature nonclassicality, and
//! entanglement references for teleportation-based cloning networks built
//! from Gaussian and photon-added/subtracted resource states.
//!
//! Quadrature convention: `x = a + a†`, `p = -i(a - a†)`, so the vacuum has
//! unit variance in each quadrature and the Wigner function of a Gaussian
//! state is the normal density with the state's mean and covariance. Mode
//! quadratures are interleaved as `(x1, p1, ..., xN, pN)` everywhere,
//! including serialized output.
//!
//! Layer map:
//! - [`phase_space`] — Gaussian states, symplectic maps, Gaussian measures.
//! - [`poly`] / [`wigner`] — sparse polynomials and the exact
//!   `polynomial × Gaussian` Wigner calculus (ladder superoperators,
//!   pushforwards, overlaps).
//! - [`states`] — input and resource constructors, CLI spec parsing.
//! - [`protocols`] / [`asymmetric`] — the telecloning pipelines.
//! - [`measures`] — fidelity thresholds, the Q measure, closed-form
//!   entanglement references.
//! - [`oracle`] — truncated Fock-space and Monte-Carlo verification backends.
//! - [`search`] — grid plus golden-section optimization.
//! - [`validate`] — the acceptance-criteria runner shared by tests and the CLI.

pub mod asymmetric;
pub mod measures;
pub mod oracle;
pub mod phase_space;
pub mod poly;
pub mod protocols;
pub mod search;
pub mod states;
pub mod validate;
pub mod wigner;

pub use phase_space::{GaussianState, SymplecticMap};
pub use poly::{Monomial, Polynomial};
pub use protocols::{CloneReport, ProtocolSpec, Variant};
pub use states::{InputSpec, ResourceFamily, ResourceSpec};
pub use wigner::PolyGaussian;

/// Errors surfaced by the simulation layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid mode index {0}")]
    InvalidMode(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unphysical construction: {0}")]
    NonPhysical(String),
    #[error("polynomial degree {degree} exceeds limit {limit}")]
    DegreeLimit { degree: u32, limit: u32 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
