//! Dense complex linear algebra and Pauli-string machinery for small registers.
//!
//! Qubit 0 is the most significant tensor factor: the basis state
//! `|x0 x1 x2 x3>` has index `8 x0 + 4 x1 + 2 x2 + x3`.

mod density;
mod matrix;
mod pauli;

pub use density::{DensityMatrix, StateVector};
pub use matrix::{kron, ComplexMatrix, LocalLayout};
pub use pauli::{pauli_matrix, Pauli, PauliString};
