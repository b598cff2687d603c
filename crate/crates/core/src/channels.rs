//! Error-channel constructors: single-qubit decoherence (amplitude damping plus
//! power-law dephasing) and the nonideal controlled-Z gate.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qlin::{kron, ComplexMatrix};
use crate::scalar::Real;

/// Kraus matrices with Frobenius norm below this are dropped from channels.
pub const KRAUS_PRUNE_NORM: f64 = 1e-15;

/// Completely positive map `rho -> sum_m E_m rho E_m^dagger` on `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel<T> {
    n_qubits: usize,
    kraus: Vec<ComplexMatrix<T>>,
    label: String,
}

impl<T: Real> KrausChannel<T> {
    /// Validates dimensions and `sum E^dagger E <= I`; numerically zero Kraus
    /// matrices are pruned.
    pub fn new(
        n_qubits: usize,
        kraus: Vec<ComplexMatrix<T>>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if let Some(bad) = kraus.iter().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let kraus: Vec<_> = kraus
            .into_iter()
            .filter(|k| k.frobenius_norm() >= T::lit(KRAUS_PRUNE_NORM))
            .collect();
        let ch = Self {
            n_qubits,
            kraus,
            label: label.into(),
        };
        let slack = &ComplexMatrix::identity(dim) - &ch.completeness();
        let min_eig = slack
            .hermitian_eigenvalues()
            .first()
            .copied()
            .unwrap_or_else(T::zero);
        if min_eig < -T::structural_tol() {
            return Err(Error::InvalidParameters(format!(
                "Kraus set for '{}' exceeds the identity (min eigenvalue of I - sum E^dagger E = {min_eig:e})",
                ch.label
            )));
        }
        Ok(ch)
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            kraus: vec![ComplexMatrix::identity(1 << n_qubits)],
            label: "identity".into(),
        }
    }

    /// Single-Kraus channel `rho -> U rho U^dagger`.
    pub fn from_unitary(u: ComplexMatrix<T>, label: impl Into<String>) -> Result<Self> {
        let n = u.n_qubits();
        Self::new(n, vec![u], label)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn kraus(&self) -> &[ComplexMatrix<T>] {
        &self.kraus
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `sum_m E_m^dagger E_m`
    pub fn completeness(&self) -> ComplexMatrix<T> {
        let mut acc = ComplexMatrix::zeros(1 << self.n_qubits);
        for k in &self.kraus {
            acc.add_scaled(&k.adjoint().matmul(k), T::one());
        }
        acc
    }

    pub fn completeness_deviation(&self) -> T {
        self.completeness()
            .max_abs_diff(&ComplexMatrix::identity(1 << self.n_qubits))
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.completeness_deviation() <= T::structural_tol()
    }

    /// Applies the channel to a full-register operator (no embedding).
    pub fn apply_to_operator(&self, op: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        let mut acc = ComplexMatrix::zeros(op.dim());
        for k in &self.kraus {
            acc.add_scaled(&k.matmul(op).matmul(&k.adjoint()), T::one());
        }
        acc
    }
}

/// Physical parameters of the per-step single-qubit decoherence model.
///
/// Times share one unit. `t_phi` may be `+inf` (no pure dephasing), as may
/// `t1` (no relaxation).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoherenceParams<T> {
    pub t1: T,
    pub t_phi: T,
    /// Exponent of the `1/f^alpha` dephasing noise spectrum.
    pub alpha: T,
    pub t_step: T,
}

impl<T: Real> DecoherenceParams<T> {
    pub fn new(t1: T, t_phi: T, alpha: T, t_step: T) -> Result<Self> {
        let p = Self {
            t1,
            t_phi,
            alpha,
            t_step,
        };
        p.validate()?;
        Ok(p)
    }

    /// Markovian parameterization by `T1` and `T2`.
    pub fn from_t1_t2(t1: T, t2: T, t_step: T) -> Result<Self> {
        Self::new(t1, markovian_tphi(t1, t2)?, T::zero(), t_step)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameters(msg.to_string()));
        if !positive(self.t1) {
            return bad("T1 must be positive");
        }
        if !positive(self.t_step) || !self.t_step.is_finite() {
            return bad("t_step must be positive and finite");
        }
        if self.alpha < T::zero() || !self.alpha.is_finite() {
            return bad("alpha must be finite and non-negative");
        }
        if !positive(self.t_phi) {
            return bad("T_phi must be positive or infinite");
        }
        Ok(())
    }

    /// `(t_step / T_phi)^(1 + alpha)`, the exponent of the dephasing envelope.
    pub fn dephasing_exponent(&self) -> T {
        if self.t_phi.is_infinite() {
            return T::zero();
        }
        (self.t_step / self.t_phi).powf(T::one() + self.alpha)
    }

    /// `t_step / T1`, zero for infinite `T1`.
    pub fn relaxation_exponent(&self) -> T {
        if self.t1.is_infinite() {
            T::zero()
        } else {
            self.t_step / self.t1
        }
    }

    /// `1 - gamma - lambda = exp(-t/T1 - 2 (t/T_phi)^(1+alpha))`, evaluated
    /// without cancellation.
    pub fn coherence_sq(&self) -> T {
        (-self.relaxation_exponent() - T::lit(2.0) * self.dephasing_exponent()).exp()
    }
}

/// False for NaN as well as for non-positive values.
fn positive<T: Real>(x: T) -> bool {
    x > T::zero()
}

/// `gamma = 1 - exp(-t/T1)` and `lambda = exp(-t/T1) [1 - exp(-2 (t/T_phi)^(1+alpha))]`.
pub fn gamma_lambda<T: Real>(p: &DecoherenceParams<T>) -> (T, T) {
    let r = p.relaxation_exponent();
    let gamma = -(-r).exp_m1();
    let lambda = (-r).exp() * -(-T::lit(2.0) * p.dephasing_exponent()).exp_m1();
    (gamma, lambda)
}

/// Three-Kraus decoherence channel for one step of duration `t_step`.
pub fn decoherence_channel<T: Real>(p: &DecoherenceParams<T>) -> Result<KrausChannel<T>> {
    p.validate()?;
    let (gamma, lambda) = gamma_lambda(p);
    kraus_from_gamma_lambda(gamma, lambda, p.coherence_sq())
}

/// Decoherence channel from raw damping parameters.
pub fn decoherence_channel_from_rates<T: Real>(gamma: T, lambda: T) -> Result<KrausChannel<T>> {
    kraus_from_gamma_lambda(gamma, lambda, T::one() - gamma - lambda)
}

fn kraus_from_gamma_lambda<T: Real>(
    gamma: T,
    lambda: T,
    coherence_sq: T,
) -> Result<KrausChannel<T>> {
    let tol = T::structural_tol();
    if gamma < -tol || lambda < -tol || gamma + lambda > T::one() + tol {
        return Err(Error::InvalidParameters(format!(
            "decoherence rates out of range: gamma = {gamma:e}, lambda = {lambda:e}"
        )));
    }
    let c = |x: T| Complex::new(x.max(T::zero()).sqrt(), T::zero());
    let (o, z) = (Complex::<T>::one(), Complex::<T>::zero());
    let e1 = ComplexMatrix::from_vec(2, vec![o, z, z, c(coherence_sq)])?;
    let e2 = ComplexMatrix::from_vec(2, vec![z, c(gamma), z, z])?;
    let e3 = ComplexMatrix::from_vec(2, vec![z, z, z, c(lambda)])?;
    KrausChannel::new(1, vec![e1, e2, e3], "decoherence")
}

/// Pure-dephasing time of the Markovian model, `1/T_phi = 1/T2 - 1/(2 T1)`.
/// Returns `+inf` at the `T2 = 2 T1` boundary.
pub fn markovian_tphi<T: Real>(t1: T, t2: T) -> Result<T> {
    if !positive(t1) || !positive(t2) {
        return Err(Error::InvalidParameters(
            "T1 and T2 must be positive".into(),
        ));
    }
    let tol = T::structural_tol();
    let rate = T::one() / t2 - T::one() / (T::lit(2.0) * t1);
    let scale = T::one() / t2;
    if rate < -tol * scale {
        return Err(Error::InvalidParameters(format!(
            "T2 = {t2} exceeds 2 T1 = {}",
            T::lit(2.0) * t1
        )));
    }
    if rate <= tol * scale {
        return Ok(T::infinity());
    }
    Ok(T::one() / rate)
}

/// Parameters of the nonideal CZ: switching probability `e1` between `|01>`
/// and `|10>`, its phase `phi`, and the controlled-phase error `delta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CzErrorParams<T> {
    pub e1: T,
    pub delta: T,
    pub phi: T,
}

impl<T: Real> CzErrorParams<T> {
    pub fn new(e1: T, delta: T, phi: T) -> Result<Self> {
        if !(e1 >= T::zero() && e1 <= T::one()) {
            return Err(Error::InvalidParameters(format!(
                "switching probability E1 = {e1} outside [0, 1]"
            )));
        }
        Ok(Self { e1, delta, phi })
    }

    pub fn ideal() -> Self {
        Self {
            e1: T::zero(),
            delta: T::zero(),
            phi: T::zero(),
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.e1 == T::zero() && self.delta == T::zero()
    }
}

pub fn ideal_cz<T: Real>() -> ComplexMatrix<T> {
    let o = Complex::<T>::one();
    ComplexMatrix::from_diag(&[o, o, o, -o])
}

fn cz_like<T: Real>(p: &CzErrorParams<T>, last: Complex<T>) -> ComplexMatrix<T> {
    let (o, z) = (Complex::<T>::one(), Complex::<T>::zero());
    let keep = Complex::new((T::one() - p.e1).sqrt(), T::zero());
    let swap = p.e1.sqrt();
    let fwd = Complex::from_polar(swap, p.phi);
    let back = -Complex::from_polar(swap, -p.phi);
    ComplexMatrix::from_vec(
        4,
        vec![
            o, z, z, z, //
            z, keep, fwd, z, //
            z, back, keep, z, //
            z, z, z, last,
        ],
    )
    .expect("4x4")
}

/// The realized gate `U`.
pub fn nonideal_cz<T: Real>(p: &CzErrorParams<T>) -> ComplexMatrix<T> {
    cz_like(p, -Complex::from_polar(T::one(), p.delta))
}

/// The error `V` with `U = V CZ`.
pub fn cz_error_unitary<T: Real>(p: &CzErrorParams<T>) -> ComplexMatrix<T> {
    cz_like(p, Complex::from_polar(T::one(), p.delta))
}

/// State-averaged gate fidelity `[Tr(U^dagger U) + |Tr(U_target^dagger U)|^2] / (d (d + 1))`,
/// i.e. the `/20` formula for two qubits.
pub fn avg_gate_fidelity<T: Real>(u: &ComplexMatrix<T>, target: &ComplexMatrix<T>) -> Result<T> {
    if u.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            expected: target.dim(),
            found: u.dim(),
        });
    }
    let d = T::from_usize(u.dim()).unwrap();
    let norm = u.adjoint().matmul(u).trace().re;
    let overlap = target.adjoint().matmul(u).trace().norm_sqr();
    Ok((norm + overlap) / (d * (d + T::one())))
}

/// Leading-order intrinsic error `(2/5) E1 + (3/20) delta^2`.
pub fn leading_order_gate_error<T: Real>(p: &CzErrorParams<T>) -> T {
    T::lit(0.4) * p.e1 + T::lit(0.15) * p.delta * p.delta
}

/// Splits a total gate error equally between switching and phase error:
/// `E1 = 5E/4`, `delta = sqrt(10E/3)`.
pub fn split_gate_error<T: Real>(e: T, phi: T) -> Result<CzErrorParams<T>> {
    if !(e >= T::zero() && e <= T::lit(0.8)) {
        return Err(Error::InvalidParameters(format!(
            "gate error {e} outside [0, 0.8] (E1 = 5E/4 would exceed 1)"
        )));
    }
    CzErrorParams::new(
        T::lit(1.25) * e,
        (T::lit(10.0) * e / T::lit(3.0)).sqrt(),
        phi,
    )
}

/// Tensor product of single-qubit channels; Kraus index runs over all
/// `(m_1, ..., m_n)` tuples, first channel on the most significant qubit.
pub fn tensor_channel<T: Real>(singles: &[KrausChannel<T>]) -> Result<KrausChannel<T>> {
    if let Some(bad) = singles.iter().find(|c| c.n_qubits() != 1) {
        return Err(Error::InvalidParameters(format!(
            "tensor_channel expects single-qubit inputs, got a {}-qubit channel '{}'",
            bad.n_qubits(),
            bad.label()
        )));
    }
    if singles.is_empty() {
        return Err(Error::InvalidParameters("no channels to tensor".into()));
    }
    let mut kraus = vec![ComplexMatrix::identity(1)];
    for ch in singles {
        kraus = kraus
            .iter()
            .flat_map(|acc| ch.kraus().iter().map(move |k| kron(acc, k)))
            .collect();
    }
    let label = singles
        .iter()
        .map(|c| c.label())
        .collect::<Vec<_>>()
        .join(" x ");
    KrausChannel::new(singles.len(), kraus, label)
}
