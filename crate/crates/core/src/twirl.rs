//! Pauli twirling: reduce an arbitrary Kraus channel to a Pauli channel.
//!
//! Two independent routes are provided. [`pta`] sums the squared Pauli-basis
//! coefficients of each Kraus matrix. [`twirl_numeric`] literally averages
//! `A^-1 Lambda(A rho A^-1) A` over the Pauli group and reads the resulting
//! Pauli channel off its action on Pauli operators. They must agree to
//! rounding for every input.

use num_complex::Complex;
use num_traits::Zero;

use crate::channels::{gamma_lambda, CzErrorParams, DecoherenceParams, KrausChannel};
use crate::error::{Error, Result};
use crate::qlin::{pauli_matrix, ComplexMatrix, Pauli, PauliString};
use crate::scalar::Real;

/// Probability distribution over the `4^n` Pauli strings of `n` qubits,
/// stored densely in [`PauliString::index`] order.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliChannel<T> {
    n_qubits: usize,
    probs: Vec<T>,
}

impl<T: Real> PauliChannel<T> {
    /// Clips rounding-level negatives and rejects anything that is not a
    /// sub-normalized distribution.
    pub fn new(n_qubits: usize, mut probs: Vec<T>) -> Result<Self> {
        let len = 1usize << (2 * n_qubits);
        if probs.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                found: probs.len(),
            });
        }
        for (i, p) in probs.iter_mut().enumerate() {
            if *p < T::zero() {
                if *p < -T::clip_tol() || p.is_nan() {
                    return Err(Error::NegativeProbability {
                        pauli: PauliString::from_index(n_qubits, i).to_string(),
                        value: p.to_f64().unwrap_or(f64::NAN),
                    });
                }
                *p = T::zero();
            }
        }
        let total = probs.iter().fold(T::zero(), |a, &b| a + b);
        if total > T::one() + T::structural_tol() {
            return Err(Error::InvalidParameters(format!(
                "Pauli probabilities sum to {total}, above 1"
            )));
        }
        Ok(Self { n_qubits, probs })
    }

    /// Builds a channel from explicit entries; unspecified strings get zero.
    pub fn from_entries<'a, I>(n_qubits: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, T)>,
    {
        let mut probs = vec![T::zero(); 1 << (2 * n_qubits)];
        for (label, p) in entries {
            let s: PauliString = label.parse()?;
            if s.n_qubits() != n_qubits {
                return Err(Error::InvalidParameters(format!(
                    "Pauli label {label} does not have {n_qubits} letters"
                )));
            }
            probs[s.index()] = probs[s.index()] + p;
        }
        Self::new(n_qubits, probs)
    }

    pub fn identity(n_qubits: usize) -> Self {
        let mut probs = vec![T::zero(); 1 << (2 * n_qubits)];
        probs[0] = T::one();
        Self { n_qubits, probs }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, s: &PauliString) -> T {
        assert_eq!(s.n_qubits(), self.n_qubits);
        self.probs[s.index()]
    }

    /// Probability by label, e.g. `"XY"`.
    pub fn get(&self, label: &str) -> T {
        let s: PauliString = label.parse().expect("valid Pauli label");
        self.prob(&s)
    }

    pub fn total(&self) -> T {
        self.probs.iter().fold(T::zero(), |a, &b| a + b)
    }

    /// Total probability of a non-identity Pauli.
    pub fn error_probability(&self) -> T {
        self.probs[1..].iter().fold(T::zero(), |a, &b| a + b)
    }

    pub fn iter(&self) -> impl Iterator<Item = (PauliString, T)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (PauliString::from_index(self.n_qubits, i), p))
    }

    /// Largest entrywise difference to another channel on the same register.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.n_qubits, other.n_qubits);
        self.probs
            .iter()
            .zip(&other.probs)
            .fold(T::zero(), |acc, (a, b)| acc.max((*a - *b).abs()))
    }
}

/// Pauli-basis coefficients `Gamma[m][A]` with `E_m = sum_A Gamma[m][A] A`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliExpansion<T> {
    n_qubits: usize,
    coeffs: Vec<Vec<Complex<T>>>,
}

impl<T: Real> PauliExpansion<T> {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_kraus(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficient(&self, m: usize, a: &PauliString) -> Complex<T> {
        self.coeffs[m][a.index()]
    }

    pub fn coefficients(&self, m: usize) -> &[Complex<T>] {
        &self.coeffs[m]
    }

    /// `sum_A Gamma[m][A] A`
    pub fn reconstruct(&self, m: usize) -> ComplexMatrix<T> {
        let mut acc = ComplexMatrix::zeros(1 << self.n_qubits);
        for (s, c) in PauliString::all(self.n_qubits).zip(&self.coeffs[m]) {
            if !c.is_zero() {
                let term = pauli_matrix::<T>(&s).scale(*c);
                acc = &acc + &term;
            }
        }
        acc
    }
}

/// `Tr(A B) / 2^n`, the Pauli-basis inner product for Hermitian `A`.
fn pauli_overlap<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Complex<T> {
    let n = a.dim();
    let mut s = Complex::zero();
    for i in 0..n {
        for j in 0..n {
            s = s + a[(i, j)] * b[(j, i)];
        }
    }
    s / T::from_usize(n).unwrap()
}

fn pauli_basis<T: Real>(n_qubits: usize) -> Vec<ComplexMatrix<T>> {
    PauliString::all(n_qubits)
        .map(|s| pauli_matrix(&s))
        .collect()
}

/// Expands every Kraus matrix in the Pauli basis, `Gamma = Tr(A E) / 2^n`.
pub fn pauli_expand<T: Real>(ch: &KrausChannel<T>) -> PauliExpansion<T> {
    let basis = pauli_basis::<T>(ch.n_qubits());
    let coeffs = ch
        .kraus()
        .iter()
        .map(|e| basis.iter().map(|a| pauli_overlap(a, e)).collect())
        .collect();
    PauliExpansion {
        n_qubits: ch.n_qubits(),
        coeffs,
    }
}

/// Pauli twirling approximation: `p_A = sum_m |Gamma[m][A]|^2`.
pub fn pta<T: Real>(ch: &KrausChannel<T>) -> PauliChannel<T> {
    let expansion = pauli_expand(ch);
    let mut probs = vec![T::zero(); 1 << (2 * ch.n_qubits())];
    for m in 0..expansion.n_kraus() {
        for (p, c) in probs.iter_mut().zip(expansion.coefficients(m)) {
            *p = *p + c.norm_sqr();
        }
    }
    PauliChannel {
        n_qubits: ch.n_qubits(),
        probs,
    }
}

/// Literal Pauli twirl of `ch`.
///
/// The twirled map is evaluated on every Pauli operator `B`, giving its
/// eigenvalue `f_B = Tr(B twirl(B)) / 2^n`. A Pauli channel has
/// `f_B = sum_A s(A, B) p_A` with `s = +1` for commuting and `-1` for
/// anticommuting pairs, which is inverted by `p_A = 4^-n sum_B s(A, B) f_B`.
pub fn twirl_numeric<T: Real>(ch: &KrausChannel<T>) -> Result<PauliChannel<T>> {
    let n = ch.n_qubits();
    let strings: Vec<PauliString> = PauliString::all(n).collect();
    let basis = pauli_basis::<T>(n);
    let group_size = T::from_usize(basis.len()).unwrap();

    let twirled = |rho: &ComplexMatrix<T>| -> ComplexMatrix<T> {
        let mut acc = ComplexMatrix::zeros(rho.dim());
        for a in &basis {
            let inner = a.matmul(rho).matmul(a);
            let outer = a.matmul(&ch.apply_to_operator(&inner)).matmul(a);
            acc.add_scaled(&outer, T::one());
        }
        acc.scale_real(T::one() / group_size)
    };

    let eigen: Vec<T> = basis
        .iter()
        .map(|b| pauli_overlap(b, &twirled(b)).re)
        .collect();

    let probs = strings
        .iter()
        .map(|a| {
            strings.iter().zip(&eigen).fold(T::zero(), |acc, (b, f)| {
                if a.commutes_with(b) {
                    acc + *f
                } else {
                    acc - *f
                }
            }) / group_size
        })
        .collect();
    PauliChannel::new(n, probs)
}

/// Closed-form PTA of the decoherence channel:
/// `p_X = p_Y = gamma/4`, `p_Z = 1/2 - gamma/4 - sqrt(1 - gamma - lambda)/2`.
pub fn pta_decoherence<T: Real>(p: &DecoherenceParams<T>) -> PauliChannel<T> {
    let (gamma, _) = gamma_lambda(p);
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    let px = gamma * quarter;
    // 1/2 - sqrt(1-gamma-lambda)/2 written via expm1 to keep small rates accurate
    let half_decay = -(-(p.relaxation_exponent() * half + p.dephasing_exponent())).exp_m1() * half;
    let pz = half_decay - px;
    let pi = T::one() - px - px - pz;
    PauliChannel {
        n_qubits: 1,
        probs: vec![pi, px, px, pz],
    }
}

/// `p_step = p_X + p_Y + p_Z` of the decoherence PTA.
pub fn pstep_of<T: Real>(p: &DecoherenceParams<T>) -> T {
    pta_decoherence(p).error_probability()
}

/// Closed-form PTA of the CZ error `V = U CZ`: eight terms on
/// `II, ZI, IZ, ZZ, XX, YY, XY, YX`.
pub fn pta_cz<T: Real>(p: &CzErrorParams<T>) -> PauliChannel<T> {
    let quarter = T::lit(0.25);
    let two = T::lit(2.0);
    let phase = Complex::from_polar(T::one(), p.delta);
    let one = Complex::new(T::one(), T::zero());
    let keep = Complex::new(two * (T::one() - p.e1).sqrt(), T::zero());
    let p_i = ((one + keep + phase) * quarter).norm_sqr();
    let p_z = ((one - phase) * quarter).norm_sqr();
    let p_zz = ((one - keep + phase) * quarter).norm_sqr();
    let (s, c) = p.phi.sin_cos();
    let p_xx = s * s * p.e1 * quarter;
    let p_xy = c * c * p.e1 * quarter;
    let mut probs = vec![T::zero(); 16];
    let idx = |l: &str| l.parse::<PauliString>().unwrap().index();
    probs[idx("II")] = p_i;
    probs[idx("ZI")] = p_z;
    probs[idx("IZ")] = p_z;
    probs[idx("ZZ")] = p_zz;
    probs[idx("XX")] = p_xx;
    probs[idx("YY")] = p_xx;
    probs[idx("XY")] = p_xy;
    probs[idx("YX")] = p_xy;
    PauliChannel { n_qubits: 2, probs }
}

/// Dephasing time at which the twirled decoherence channel is depolarizing,
/// `t_step^(alpha/(1+alpha)) (2 T1)^(1/(1+alpha))`.
pub fn tphi_crit<T: Real>(t1: T, alpha: T, t_step: T) -> T {
    let e = T::one() / (T::one() + alpha);
    t_step.powf(alpha * e) * (T::lit(2.0) * t1).powf(e)
}

/// Independent product of single-qubit Pauli channels, first channel on
/// the most significant qubit.
pub fn product_pauli_channel<T: Real>(singles: &[PauliChannel<T>]) -> Result<PauliChannel<T>> {
    if let Some(bad) = singles.iter().find(|c| c.n_qubits != 1) {
        return Err(Error::InvalidParameters(format!(
            "product_pauli_channel expects single-qubit inputs, got {} qubits",
            bad.n_qubits
        )));
    }
    let n = singles.len();
    let probs = PauliString::all(n)
        .map(|s| {
            s.letters()
                .iter()
                .zip(singles)
                .fold(T::one(), |acc, (l, ch)| acc * ch.probs[l.index()])
        })
        .collect();
    Ok(PauliChannel { n_qubits: n, probs })
}

/// Kraus form `{sqrt(p_A) A : p_A > 0}` of a Pauli channel.
pub fn pauli_channel_to_kraus<T: Real>(pc: &PauliChannel<T>) -> Result<KrausChannel<T>> {
    let kraus = pc
        .iter()
        .filter(|(_, p)| *p > T::zero())
        .map(|(s, p)| pauli_matrix::<T>(&s).scale_real(p.sqrt()))
        .collect();
    KrausChannel::new(pc.n_qubits, kraus, "pauli")
}

/// Pauli channel assigning `p0 = max_{A != I} p_A` to every non-identity
/// string.
pub fn upper_bound_channel<T: Real>(pc: &PauliChannel<T>) -> Result<PauliChannel<T>> {
    let p0 = pc.probs[1..].iter().fold(T::zero(), |a, &b| a.max(b));
    let count = pc.probs.len() - 1;
    let total = p0 * T::from_usize(count).unwrap();
    if total > T::one() + T::structural_tol() {
        return Err(Error::BoundChannelInvalid {
            count,
            total: total.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut probs = vec![p0; pc.probs.len()];
    probs[0] = (T::one() - total).max(T::zero());
    Ok(PauliChannel {
        n_qubits: pc.n_qubits,
        probs,
    })
}

/// Single-qubit Pauli channel from `(p_X, p_Y, p_Z)`.
pub fn single_qubit_pauli<T: Real>(px: T, py: T, pz: T) -> Result<PauliChannel<T>> {
    PauliChannel::new(1, vec![T::one() - px - py - pz, px, py, pz])
}

impl<T: Real> PauliChannel<T> {
    /// Single-qubit marginal `(p_X, p_Y, p_Z)`; only meaningful for one qubit.
    pub fn xyz(&self) -> (T, T, T) {
        assert_eq!(self.n_qubits, 1);
        (
            self.probs[Pauli::X.index()],
            self.probs[Pauli::Y.index()],
            self.probs[Pauli::Z.index()],
        )
    }
}
