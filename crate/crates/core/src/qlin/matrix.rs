use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

type FixedOp<T, const K: usize> = ([[Complex<T>; K]; K], [[bool; K]; K]);

/// Dense square complex matrix stored row-major. The dimension is always a
/// power of two, so a matrix is an operator on `log2(dim)` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(
            dim.is_power_of_two(),
            "matrix dimension {dim} is not a power of two"
        );
        Self {
            dim,
            data: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_diag(diag: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(dim: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if !dim.is_power_of_two() {
            return Err(Error::InvalidParameters(format!(
                "matrix dimension {dim} is not a power of two"
            )));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[&[Complex<T>]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(dim, data)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| Complex::new(T::lit(x), T::zero())));
        }
        Self::from_vec(dim, data)
    }

    /// The outer product `|a><b|`.
    pub fn outer(a: &[Complex<T>], b: &[Complex<T>]) -> Self {
        assert_eq!(a.len(), b.len());
        let mut m = Self::zeros(a.len());
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                m[(i, j)] = ai * bj.conj();
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, other: &Self, s: T) {
        assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + b * s;
        }
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.dim, v.len());
        let n = self.dim;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .fold(Complex::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (a, b)| acc.max((a - b).norm()))
    }

    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let n = self.dim;
        (0..n).all(|i| (i..n).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    /// Max entrywise deviation of `U^dagger U` from the identity.
    pub fn unitarity_deviation(&self) -> T {
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&Self::identity(self.dim))
    }

    pub fn is_unitary(&self, tol: T) -> bool {
        self.unitarity_deviation() <= tol
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Uses cyclic Jacobi rotations on the real symmetric embedding
    /// `[[Re, -Im], [Im, Re]]`, whose spectrum is that of `self` with every
    /// eigenvalue doubled.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        let n = self.dim;
        let m = 2 * n;
        let mut a = vec![T::zero(); m * m];
        for i in 0..n {
            for j in 0..n {
                let z = self[(i, j)];
                a[i * m + j] = z.re;
                a[(i + n) * m + (j + n)] = z.re;
                a[i * m + (j + n)] = -z.im;
                a[(i + n) * m + j] = z.im;
            }
        }
        let two = T::lit(2.0);
        for _sweep in 0..100 {
            let off: T = (0..m)
                .flat_map(|p| (0..m).filter(move |&q| q != p).map(move |q| (p, q)))
                .fold(T::zero(), |acc, (p, q)| acc + a[p * m + q] * a[p * m + q]);
            if off <= T::min_positive_value() {
                break;
            }
            for p in 0..m {
                for q in (p + 1)..m {
                    let apq = a[p * m + q];
                    if apq.abs() <= T::min_positive_value() {
                        continue;
                    }
                    let theta = (a[q * m + q] - a[p * m + p]) / (two * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..m {
                        let akp = a[k * m + p];
                        let akq = a[k * m + q];
                        a[k * m + p] = c * akp - s * akq;
                        a[k * m + q] = s * akp + c * akq;
                    }
                    for k in 0..m {
                        let apk = a[p * m + k];
                        let aqk = a[q * m + k];
                        a[p * m + k] = c * apk - s * aqk;
                        a[q * m + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut eig: Vec<T> = (0..m).map(|i| a[i * m + i]).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        // each eigenvalue appears twice in the real embedding
        eig.into_iter().step_by(2).collect()
    }

    /// Replaces `self` by `sum_m E_m self E_m^dagger`, each `E_m` embedding
    /// `ops[m]` on `layout`'s targets.
    ///
    /// Works block by block: the `k x k` sub-block on rows `bi + off` and
    /// columns `bj + off` maps to `sum_m K_m B K_m^dagger` independently of
    /// every other block.
    pub fn transform_local(&mut self, ops: &[Self], layout: &LocalLayout) {
        match layout.offsets.len() {
            2 => self.transform_fixed::<2>(ops, layout),
            4 => self.transform_fixed::<4>(ops, layout),
            _ => self.transform_dyn(ops, layout),
        }
    }

    fn transform_fixed<const K: usize>(&mut self, ops: &[Self], layout: &LocalLayout) {
        let n = self.dim;
        let zero = Complex::zero();
        let mut off = [0usize; K];
        off.copy_from_slice(&layout.offsets);
        // each operator with its nonzero mask
        let kraus: Vec<FixedOp<T, K>> = ops
            .iter()
            .map(|op| {
                let mut m = [[zero; K]; K];
                let mut nz = [[false; K]; K];
                for r in 0..K {
                    for c in 0..K {
                        m[r][c] = op.data[r * K + c];
                        nz[r][c] = !m[r][c].is_zero();
                    }
                }
                (m, nz)
            })
            .collect();
        for &bi in &layout.bases {
            for &bj in &layout.bases {
                let mut blk = [[zero; K]; K];
                for r in 0..K {
                    let row = (bi + off[r]) * n + bj;
                    for c in 0..K {
                        blk[r][c] = self.data[row + off[c]];
                    }
                }
                let mut acc = [[zero; K]; K];
                for (m, nz) in &kraus {
                    let mut tmp = [[zero; K]; K];
                    for r in 0..K {
                        for t in 0..K {
                            if nz[r][t] {
                                let a = m[r][t];
                                for c in 0..K {
                                    tmp[r][c] = tmp[r][c] + a * blk[t][c];
                                }
                            }
                        }
                    }
                    for c in 0..K {
                        for t in 0..K {
                            if nz[c][t] {
                                let a = m[c][t].conj();
                                for r in 0..K {
                                    acc[r][c] = acc[r][c] + tmp[r][t] * a;
                                }
                            }
                        }
                    }
                }
                for r in 0..K {
                    let row = (bi + off[r]) * n + bj;
                    for c in 0..K {
                        self.data[row + off[c]] = acc[r][c];
                    }
                }
            }
        }
    }

    fn transform_dyn(&mut self, ops: &[Self], layout: &LocalLayout) {
        let n = self.dim;
        let k = layout.offsets.len();
        debug_assert!(ops.iter().all(|o| o.dim == k));
        let zero = Complex::zero();
        let mut blk = vec![zero; k * k];
        let mut tmp = vec![zero; k * k];
        let mut acc = vec![zero; k * k];
        for &bi in &layout.bases {
            for &bj in &layout.bases {
                for (r, ro) in layout.offsets.iter().enumerate() {
                    let row = (bi + ro) * n + bj;
                    for (s, so) in layout.offsets.iter().enumerate() {
                        blk[r * k + s] = self.data[row + so];
                    }
                }
                acc.iter_mut().for_each(|z| *z = zero);
                for op in ops {
                    let kd = &op.data;
                    // tmp = K B
                    tmp.iter_mut().for_each(|z| *z = zero);
                    for r in 0..k {
                        for t in 0..k {
                            let a = kd[r * k + t];
                            if a.is_zero() {
                                continue;
                            }
                            for s in 0..k {
                                tmp[r * k + s] = tmp[r * k + s] + a * blk[t * k + s];
                            }
                        }
                    }
                    // acc += tmp K^dagger
                    for s in 0..k {
                        for t in 0..k {
                            let a = kd[s * k + t];
                            if a.is_zero() {
                                continue;
                            }
                            let ac = a.conj();
                            for r in 0..k {
                                acc[r * k + s] = acc[r * k + s] + tmp[r * k + t] * ac;
                            }
                        }
                    }
                }
                for (r, ro) in layout.offsets.iter().enumerate() {
                    let row = (bi + ro) * n + bj;
                    for (s, so) in layout.offsets.iter().enumerate() {
                        self.data[row + so] = acc[r * k + s];
                    }
                }
            }
        }
    }

    /// `E self E^dagger` in place.
    pub fn conjugate_local(&mut self, op: &Self, layout: &LocalLayout) {
        self.transform_local(std::slice::from_ref(op), layout);
    }

    /// Full `2^n x 2^n` matrix acting as `op` on `targets` and identity elsewhere.
    pub fn embed(&self, targets: &[usize], n_qubits: usize) -> Result<Self> {
        let layout = LocalLayout::new(n_qubits, targets)?;
        if layout.offsets.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: layout.offsets.len(),
                found: self.dim,
            });
        }
        let full = 1usize << n_qubits;
        let mut out = Self::zeros(full);
        let k = self.dim;
        for &base in &layout.bases {
            for r in 0..k {
                for s in 0..k {
                    out[(base + layout.offsets[r], base + layout.offsets[s])] =
                        self.data[r * k + s];
                }
            }
        }
        Ok(out)
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.dim + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.dim + j]
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.matmul(rhs)
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        assert_eq!(self.dim, rhs.dim);
        ComplexMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Kronecker product; `a` is the more significant tensor factor.
pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..na {
        for j in 0..na {
            let aij = a.data[i * na + j];
            if aij.is_zero() {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out.data[(i * nb + k) * n + (j * nb + l)] = aij * b.data[k * nb + l];
                }
            }
        }
    }
    out
}

/// Index bookkeeping for applying a `k`-qubit operator inside an `n`-qubit
/// register. Qubit 0 is the most significant bit of a basis index.
#[derive(Clone, Debug)]
pub struct LocalLayout {
    offsets: Vec<usize>,
    bases: Vec<usize>,
}

impl LocalLayout {
    pub fn new(n_qubits: usize, targets: &[usize]) -> Result<Self> {
        let invalid = || Error::InvalidTargets {
            targets: targets.to_vec(),
            n_qubits,
        };
        if targets.is_empty() || targets.iter().any(|&t| t >= n_qubits) {
            return Err(invalid());
        }
        let mut mask = 0usize;
        for &t in targets {
            let bit = 1usize << (n_qubits - 1 - t);
            if mask & bit != 0 {
                return Err(invalid());
            }
            mask |= bit;
        }
        let k = targets.len();
        let offsets = (0..1usize << k)
            .map(|r| {
                targets.iter().enumerate().fold(0usize, |acc, (j, &t)| {
                    let local_bit = (r >> (k - 1 - j)) & 1;
                    acc | (local_bit << (n_qubits - 1 - t))
                })
            })
            .collect();
        let bases = (0..1usize << n_qubits).filter(|i| i & mask == 0).collect();
        Ok(Self { offsets, bases })
    }

    /// Dimension of the local operator this layout expects.
    pub fn local_dim(&self) -> usize {
        self.offsets.len()
    }
}
