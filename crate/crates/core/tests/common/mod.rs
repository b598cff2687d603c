#![allow(dead_code)]

use num_complex::Complex64;
use pta_core::channels::KrausChannel;
use pta_core::{ComplexMatrix64, DensityMatrix64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Columns of a random matrix orthonormalized by modified Gram-Schmidt.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix64 {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
        for c in &cols {
            let ip: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= ip * y;
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut u = ComplexMatrix64::zeros(dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, x) in col.iter().enumerate() {
            u[(i, j)] = *x;
        }
    }
    u
}

/// Random trace-preserving channel with `n_kraus` operators (a power of
/// two): `K_m = (<m| x I) W (|0> x I)` for a random unitary `W` on system
/// plus environment.
pub fn random_channel(n_qubits: usize, n_kraus: usize, rng: &mut impl Rng) -> KrausChannel<f64> {
    assert!(n_kraus.is_power_of_two());
    let d = 1 << n_qubits;
    let w = random_unitary(d * n_kraus, rng);
    let kraus = (0..n_kraus)
        .map(|m| {
            let mut k = ComplexMatrix64::zeros(d);
            for i in 0..d {
                for j in 0..d {
                    k[(i, j)] = w[(m * d + i, j)];
                }
            }
            k
        })
        .collect();
    KrausChannel::new(n_qubits, kraus, "random").expect("isometry gives a valid channel")
}

/// Random mixed state `A A^dagger / Tr(A A^dagger)`.
pub fn random_density(n_qubits: usize, rng: &mut impl Rng) -> DensityMatrix64 {
    let d = 1 << n_qubits;
    let mut a = ComplexMatrix64::zeros(d);
    for i in 0..d {
        for j in 0..d {
            a[(i, j)] = random_complex(rng);
        }
    }
    let m = a.matmul(&a.adjoint());
    let tr = m.trace().re;
    DensityMatrix64::new(m.scale_real(1.0 / tr)).expect("normalized Gram matrix")
}

pub fn random_pure(n_qubits: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let d = 1 << n_qubits;
    let v: Vec<Complex64> = (0..d).map(|_| random_complex(rng)).collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}
