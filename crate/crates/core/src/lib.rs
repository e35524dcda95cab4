//! Classical simulation of quantum phase processing.
//!
//! The crate builds trigonometric quantum signal processing circuits from
//! target Laurent polynomials, lifts them to multi-qubit phase processors,
//! and uses those to run phase search, Hamiltonian simulation and entropy
//! estimation against exact dense linear algebra.

pub mod approx;
pub mod blockenc;
pub mod entropy;
pub mod error;
pub mod hamsim;
pub mod laurent;
pub mod linalg;
pub mod phasesearch;
pub mod qpp;
pub mod qsp;
pub mod random;

pub use error::{Error, Result};
pub use laurent::LaurentPoly;
pub use linalg::{ComplexMatrix, Spectrum, StateVector, C64};

/// Version of the library, reported in every CLI artifact.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
