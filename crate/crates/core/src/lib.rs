//! Pauli twirling approximation (PTA) toolkit.
//!
//! Builds Pauli-twirled error channels from Kraus and unitary error models and
//! compares them with exact density-matrix simulation of a four-qubit
//! Bell-state preservation circuit (two data qubits, a `ZZ` ancilla and an
//! `XX` ancilla).
//!
//! The linear algebra, channel and twirl layers are generic over [`Real`]
//! (`f32` or `f64`); the aliases below fix the double-precision types used by
//! the protocol simulator.

pub mod channels;
pub mod error;
pub mod protocol;
pub mod qlin;
pub mod scalar;
pub mod twirl;

pub use error::{Error, Result};
pub use scalar::Real;

pub type ComplexMatrix64 = qlin::ComplexMatrix<f64>;
pub type DensityMatrix64 = qlin::DensityMatrix<f64>;
pub type KrausChannel64 = channels::KrausChannel<f64>;
pub type PauliChannel64 = twirl::PauliChannel<f64>;
pub type DecoherenceParams64 = channels::DecoherenceParams<f64>;
pub type CzErrorParams64 = channels::CzErrorParams<f64>;
