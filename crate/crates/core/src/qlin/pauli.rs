use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::{kron, ComplexMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Single-qubit Pauli letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i & 3]
    }

    pub fn matrix<T: Real>(self) -> ComplexMatrix<T> {
        let (o, z) = (Complex::<T>::one(), Complex::<T>::zero());
        let i = Complex::<T>::i();
        let data = match self {
            Pauli::I => vec![o, z, z, o],
            Pauli::X => vec![z, o, o, z],
            Pauli::Y => vec![z, -i, i, z],
            Pauli::Z => vec![o, z, z, -o],
        };
        ComplexMatrix::from_vec(2, data).expect("2x2")
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        self == Pauli::I || other == Pauli::I || self == other
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = Error;
    fn try_from(c: char) -> Result<Self> {
        match c.to_ascii_uppercase() {
            'I' | '1' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(Error::InvalidParameters(format!(
                "not a Pauli letter: {other:?}"
            ))),
        }
    }
}

/// Tensor product of single-qubit Paulis; letter 0 acts on qubit 0, the most
/// significant tensor factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::new(vec![Pauli::I; n_qubits])
    }

    /// Base-4 decoding with qubit 0 as the most significant digit.
    pub fn from_index(n_qubits: usize, index: usize) -> Self {
        let letters = (0..n_qubits)
            .map(|q| Pauli::from_index(index >> (2 * (n_qubits - 1 - q))))
            .collect();
        Self { letters }
    }

    pub fn index(&self) -> usize {
        self.letters.iter().fold(0, |acc, p| (acc << 2) | p.index())
    }

    /// All `4^n` strings in index order.
    pub fn all(n_qubits: usize) -> impl Iterator<Item = PauliString> {
        (0..1usize << (2 * n_qubits)).map(move |i| PauliString::from_index(n_qubits, i))
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        assert_eq!(self.n_qubits(), other.n_qubits());
        self.letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| !a.commutes_with(**b))
            .count()
            % 2
            == 0
    }

    pub fn matrix<T: Real>(&self) -> ComplexMatrix<T> {
        pauli_matrix(self)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(Pauli::try_from)
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}

/// Matrix realization of a Pauli string.
pub fn pauli_matrix<T: Real>(p: &PauliString) -> ComplexMatrix<T> {
    p.letters
        .iter()
        .fold(ComplexMatrix::identity(1), |acc, l| kron(&acc, &l.matrix()))
}
