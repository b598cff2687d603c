use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::{ComplexMatrix, LocalLayout};
use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub type StateVector<T> = Vec<Complex<T>>;

/// Density matrix of an `n`-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    n_qubits: usize,
    matrix: ComplexMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity and unit trace at the structural tolerance.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        let tol = T::structural_tol();
        if !matrix.is_hermitian(tol) {
            return Err(Error::InvalidParameters(
                "density matrix is not Hermitian".into(),
            ));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return Err(Error::InvalidParameters(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        Ok(Self::from_matrix_unchecked(matrix))
    }

    pub fn from_matrix_unchecked(matrix: ComplexMatrix<T>) -> Self {
        Self {
            n_qubits: matrix.n_qubits(),
            matrix,
        }
    }

    pub fn from_pure(psi: &[Complex<T>]) -> Self {
        Self::from_matrix_unchecked(ComplexMatrix::outer(psi, psi))
    }

    /// Computational basis state `|index><index|`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut m = ComplexMatrix::zeros(1 << n_qubits);
        m[(index, index)] = Complex::one();
        Self::from_matrix_unchecked(m)
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let w = T::one() / T::from_usize(dim).unwrap();
        Self::from_matrix_unchecked(ComplexMatrix::identity(dim).scale_real(w))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// `Tr(op rho)` for a full-register operator.
    pub fn expectation(&self, op: &ComplexMatrix<T>) -> Complex<T> {
        op.matmul(&self.matrix).trace()
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.matrix.hermitian_eigenvalues()
    }

    /// Positive semidefinite within `tol`. Costs an eigendecomposition, so
    /// it is meant for tests and debugging.
    pub fn is_psd(&self, tol: T) -> bool {
        self.eigenvalues().into_iter().all(|e| e >= -tol)
    }

    fn check_dim(&self, op: &ComplexMatrix<T>, targets: &[usize]) -> Result<LocalLayout> {
        let layout = LocalLayout::new(self.n_qubits, targets)?;
        if op.dim() != layout.local_dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.local_dim(),
                found: op.dim(),
            });
        }
        Ok(layout)
    }

    /// `U rho U^dagger` with `u` acting on `targets`.
    pub fn apply_unitary(&self, u: &ComplexMatrix<T>, targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_unitary_mut(u, targets)?;
        Ok(out)
    }

    pub fn apply_unitary_mut(&mut self, u: &ComplexMatrix<T>, targets: &[usize]) -> Result<()> {
        let layout = self.check_dim(u, targets)?;
        if cfg!(debug_assertions) {
            let deviation = u.unitarity_deviation();
            if deviation > T::structural_tol() {
                return Err(Error::NonUnitary {
                    deviation: deviation.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        self.matrix.conjugate_local(u, &layout);
        Ok(())
    }

    /// Conjugation by an arbitrary local operator, no unitarity check.
    pub(crate) fn conjugate_with(&mut self, op: &ComplexMatrix<T>, layout: &LocalLayout) {
        self.matrix.conjugate_local(op, layout);
    }

    /// `sum_m E_m rho E_m^dagger` with each Kraus matrix acting on `targets`.
    pub fn apply_kraus(&self, ch: &KrausChannel<T>, targets: &[usize]) -> Result<Self> {
        let mut out = self.clone();
        out.apply_kraus_mut(ch, targets)?;
        Ok(out)
    }

    pub fn apply_kraus_mut(&mut self, ch: &KrausChannel<T>, targets: &[usize]) -> Result<()> {
        let expected = 1usize << ch.n_qubits();
        if targets.len() != ch.n_qubits() {
            return Err(Error::DimensionMismatch {
                expected,
                found: 1usize << targets.len(),
            });
        }
        let layout = LocalLayout::new(self.n_qubits, targets)?;
        self.apply_kraus_layout(ch.kraus(), &layout);
        Ok(())
    }

    pub(crate) fn apply_kraus_layout(&mut self, kraus: &[ComplexMatrix<T>], layout: &LocalLayout) {
        self.matrix.transform_local(kraus, layout);
    }

    fn bit_of(&self, index: usize, q: usize) -> usize {
        (index >> (self.n_qubits - 1 - q)) & 1
    }

    /// `Tr(P_outcome rho)` for a computational-basis measurement of qubit `q`.
    pub fn outcome_probability(&self, q: usize, outcome: u8) -> T {
        let dim = self.matrix.dim();
        (0..dim)
            .filter(|&i| self.bit_of(i, q) == outcome as usize)
            .fold(T::zero(), |acc, i| acc + self.matrix[(i, i)].re)
    }

    /// Replaces `rho` by the unnormalized `P rho P`.
    pub fn project_qubit_mut(&mut self, q: usize, outcome: u8) {
        let dim = self.matrix.dim();
        let keep: Vec<bool> = (0..dim)
            .map(|i| self.bit_of(i, q) == outcome as usize)
            .collect();
        for i in 0..dim {
            for j in 0..dim {
                if !(keep[i] && keep[j]) {
                    self.matrix[(i, j)] = Complex::zero();
                }
            }
        }
    }

    /// Returns the outcome probability and the normalized post-measurement state.
    pub fn measure_qubit(&self, q: usize, outcome: u8) -> Result<(T, Self)> {
        if q >= self.n_qubits {
            return Err(Error::InvalidTargets {
                targets: vec![q],
                n_qubits: self.n_qubits,
            });
        }
        let p = self.outcome_probability(q, outcome);
        if p < T::impossible_prob() {
            return Err(Error::ZeroProbabilityOutcome {
                probability: p.to_f64().unwrap_or(0.0),
            });
        }
        let mut post = self.clone();
        post.project_qubit_mut(q, outcome);
        post.matrix = post.matrix.scale_real(T::one() / p);
        Ok((p, post))
    }

    /// Deterministically resets qubit `q` to `|0>` (trace preserving).
    pub fn reset_qubit_mut(&mut self, q: usize) {
        let bit = 1usize << (self.n_qubits - 1 - q);
        let dim = self.matrix.dim();
        for i in (0..dim).filter(|i| i & bit == 0) {
            for j in (0..dim).filter(|j| j & bit == 0) {
                let moved = self.matrix[(i | bit, j | bit)];
                self.matrix[(i, j)] = self.matrix[(i, j)] + moved;
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                if (i | j) & bit != 0 {
                    self.matrix[(i, j)] = Complex::zero();
                }
            }
        }
    }

    /// `<psi|rho|psi>` clipped to `[0, 1]`.
    pub fn fidelity_with_pure(&self, psi: &[Complex<T>]) -> T {
        assert_eq!(
            psi.len(),
            self.matrix.dim(),
            "state vector dimension mismatch"
        );
        let rho_psi = self.matrix.mul_vec(psi);
        let f = psi
            .iter()
            .zip(&rho_psi)
            .fold(Complex::<T>::zero(), |acc, (a, b)| acc + a.conj() * b);
        f.re.max(T::zero()).min(T::one())
    }

    /// Reduced state on `keep` (in the given order), tracing out the rest.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = self.n_qubits;
        LocalLayout::new(n, keep)?;
        let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        let mut out = ComplexMatrix::zeros(1 << k);
        let compose = |kept: usize, env: usize| -> usize {
            let mut idx = 0usize;
            for (j, &q) in keep.iter().enumerate() {
                idx |= ((kept >> (k - 1 - j)) & 1) << (n - 1 - q);
            }
            for (j, &q) in traced.iter().enumerate() {
                idx |= ((env >> (traced.len() - 1 - j)) & 1) << (n - 1 - q);
            }
            idx
        };
        for a in 0..1usize << k {
            for b in 0..1usize << k {
                let mut s = Complex::zero();
                for e in 0..1usize << traced.len() {
                    s = s + self.matrix[(compose(a, e), compose(b, e))];
                }
                out[(a, b)] = s;
            }
        }
        Ok(Self::from_matrix_unchecked(out))
    }
}
