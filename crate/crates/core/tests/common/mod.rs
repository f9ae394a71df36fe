#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use udcd::linalg::{ComplexMatrix, HermitianOperator};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize, scale: f64) -> HermitianOperator {
    let a = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let h = (&a + a.adjoint()).scale(0.5 * scale);
    HermitianOperator::new(h).unwrap()
}

/// Frobenius norm computed by hand.
pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `exp(-i t g)` by nalgebra's Padé exponential, independent of the
/// crate's eigensolver.
pub fn pade_propagator(g: &HermitianOperator, t: f64) -> ComplexMatrix {
    g.matrix().map(|z| z * Complex64::new(0.0, -t)).exp()
}

/// `e^{iθH} M e^{-iθH}` through Padé exponentials.
pub fn rotate(h: &HermitianOperator, m: &ComplexMatrix, theta: f64) -> ComplexMatrix {
    let u = pade_propagator(h, -theta);
    &u * m * u.adjoint()
}

/// Pauli sum `Σ_i σ_i` on `n` qubits as a dense `2^n` matrix; qubit 0 is the
/// most significant bit and bit value 0 is spin up.
pub fn collective_pauli(n: usize, sigma: [[Complex64; 2]; 2]) -> ComplexMatrix {
    let dim = 1 << n;
    let mut out = DMatrix::zeros(dim, dim);
    for site in 0..n {
        let shift = n - 1 - site;
        for col in 0..dim {
            let b = (col >> shift) & 1;
            for (a, row) in sigma.iter().enumerate() {
                let v = row[b];
                if v != Complex64::new(0.0, 0.0) {
                    let row = (col & !(1 << shift)) | (a << shift);
                    out[(row, col)] += v;
                }
            }
        }
    }
    out
}

pub fn sigma_x() -> [[Complex64; 2]; 2] {
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    [[z, o], [o, z]]
}

pub fn sigma_z() -> [[Complex64; 2]; 2] {
    let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    [[o, z], [z, -o]]
}

/// Columns are the normalized Dicke states `|S, m>`, `m = S, S-1, ..., -S`.
pub fn dicke_isometry(n: usize) -> ComplexMatrix {
    let dim = 1 << n;
    let mut p = DMatrix::zeros(dim, n + 1);
    for col in 0..=n {
        // column `col` has `col` down spins
        let members: Vec<usize> = (0..dim).filter(|s| s.count_ones() as usize == col).collect();
        let amp = 1.0 / (members.len() as f64).sqrt();
        for s in members {
            p[(s, col)] = Complex64::new(amp, 0.0);
        }
    }
    p
}

/// Full-space LMG Hamiltonian `(2J/N) Sz² + 2h Sx` with `S = Σσ/2`.
pub fn lmg_full_space(n: usize, j: f64, h: f64) -> ComplexMatrix {
    let sz = collective_pauli(n, sigma_z()).scale(0.5);
    let sx = collective_pauli(n, sigma_x()).scale(0.5);
    (&sz * &sz).scale(2.0 * j / n as f64) + sx.scale(2.0 * h)
}
