//! Pure-state quantum toolkit centered on the interplay between probabilistic
//! exact cloning, unambiguous state discrimination, and remote state
//! preparation.
//!
//! The library provides:
//!
//! - construction and Bloch-sphere geometry of pure states, including the
//!   decomposition of any three distinct qubit states over a common
//!   amplitude profile ([`bloch::common_amplitude_basis`]);
//! - linear-independence certification via singular values and via the
//!   phase determinant of fixed-amplitude ensembles ([`independence`]);
//! - unambiguous state discrimination POVMs with feasibility certificates
//!   and success-probability optimization ([`discrimination`]);
//! - probabilistic exact 1→2 cloning machines: feasibility, maximal equal
//!   success probability, explicit isometric realizations, and
//!   impossibility certificates for linearly dependent sets ([`cloning`]);
//! - exact remote state preparation over Schmidt-form entangled states with
//!   classical-bit accounting ([`rsp`]);
//! - an end-to-end signalling audit combining all of the above ([`audit`]).
//!
//! All numerics are generic over the real scalar type through
//! [`RealScalar`]; `f64` aliases are exported at the crate root and are what
//! the CLI and the test suite use.

pub mod audit;
pub mod bloch;
pub mod cloning;
pub mod discrimination;
pub mod embedding;
pub mod ensemble;
pub mod error;
pub mod independence;
pub mod io;
pub mod operator;
pub mod rsp;
pub mod scalar;
pub mod state;

pub use error::{Error, Result};
pub use scalar::{real, RealScalar};

use num_complex::Complex;

/// Dense complex matrix over the real scalar `T`.
pub type CMat<T> = nalgebra::DMatrix<Complex<T>>;
/// Dense complex column vector over the real scalar `T`.
pub type CVec<T> = nalgebra::DVector<Complex<T>>;

/// `f64` aliases for the main domain types.
pub type PureState64 = state::PureState<f64>;
pub type Operator64 = operator::Operator<f64>;
pub type PhaseEnsembleSpec64 = ensemble::PhaseEnsembleSpec<f64>;
pub type PhasePoint64 = ensemble::PhasePoint<f64>;
pub type AmplitudeDecomposition64 = bloch::AmplitudeDecomposition<f64>;
pub type IndependenceVerdict64 = independence::IndependenceVerdict<f64>;
pub type DependenceCertificate64 = independence::DependenceCertificate<f64>;
pub type Povm64 = discrimination::Povm<f64>;
pub type UsdResult64 = discrimination::UsdResult<f64>;
pub type CloningFeasibility64 = cloning::CloningFeasibility<f64>;
pub type ClonerRealization64 = cloning::ClonerRealization<f64>;
pub type ImpossibilityCertificate64 = cloning::ImpossibilityCertificate<f64>;
pub type SharedEntangledState64 = rsp::SharedEntangledState<f64>;
pub type RspTranscript64 = rsp::RspTranscript<f64>;
pub type AuditConfig64 = audit::AuditConfig<f64>;
pub type AuditReport64 = audit::AuditReport<f64>;
