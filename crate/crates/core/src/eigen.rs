//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq`, then applies a
//! real Jacobi rotation. Sweeps stop once the off-diagonal Frobenius norm
//! drops below `1e-14 * ||H||_F`; more than 100 sweeps is an error.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator, StateVector, UnitaryMatrix, ZERO};

const MAX_SWEEPS: usize = 100;
const OFF_TOL: f64 = 1e-14;

/// Ascending eigenvalues and orthonormal eigenvectors (as matrix columns).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    vectors: ComplexMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector matrix; column `n` is `|n>`.
    pub fn vectors(&self) -> &ComplexMatrix {
        &self.vectors
    }

    pub fn eigenvector(&self, n: usize) -> StateVector {
        StateVector::from_normalized_unchecked(self.vectors.column(n).into_owned())
    }

    pub fn eigenvectors(&self) -> Vec<StateVector> {
        (0..self.dim()).map(|n| self.eigenvector(n)).collect()
    }

    /// `sum_n E_n |n><n|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.eigenbasis_function(|e| Complex64::new(e, 0.0))
    }

    /// `Q^dag M Q`: matrix elements `<m|M|n>`.
    pub fn to_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.vectors.adjoint() * m * &self.vectors
    }

    /// `Q M Q^dag`: inverse of [`to_eigenbasis`](Self::to_eigenbasis).
    pub fn from_eigenbasis(&self, m: &ComplexMatrix) -> ComplexMatrix {
        &self.vectors * m * self.vectors.adjoint()
    }

    fn eigenbasis_function(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let d = self.dim();
        let mut scaled = self.vectors.clone();
        for (n, &e) in self.eigenvalues.iter().enumerate() {
            let fe = f(e);
            for r in 0..d {
                scaled[(r, n)] *= fe;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(-i t H) = sum_n exp(-i t E_n) |n><n|`.
    pub fn propagator(&self, t: f64) -> UnitaryMatrix {
        let m = self.eigenbasis_function(|e| Complex64::from_polar(1.0, -t * e));
        UnitaryMatrix::from_unitary_unchecked(m)
    }

    /// Smallest distance from level `n` to any other level.
    pub fn level_gap(&self, n: usize) -> f64 {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|&(m, _)| m != n)
            .map(|(_, &e)| (e - self.eigenvalues[n]).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Eigendecomposition with ascending eigenvalues.
///
/// Eigenvector phases are fixed so the largest-modulus component of each
/// vector is real and non-negative (first such index on ties).
pub fn eigendecompose(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = DMatrix::<Complex64>::identity(n, n);
    let scale = frobenius(&a);
    let target = OFF_TOL * scale;

    let mut converged = n <= 1 || scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off_diagonal_norm(&a),
            });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                rotated |= rotate(&mut a, &mut v, p, q, sweeps);
            }
        }
        converged = !rotated || off_diagonal_norm(&a) <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = DMatrix::<Complex64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let col = fix_phase(v.column(src).into_owned());
        vectors.set_column(dst, &col);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        vectors,
    })
}

fn frobenius(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p][q]`. Returns false when the pivot was already negligible.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, sweep: usize) -> bool {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return false;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Pivot below the rounding level of both diagonal entries.
    if sweep > 4 && app.abs() + 100.0 * g == app.abs() && aqq.abs() + 100.0 * g == aqq.abs() {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return false;
    }

    let theta = (aqq - app) / (2.0 * g);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e = apq / g;
    let ec = e.conj();

    let n = a.nrows();
    // A <- A J, columns p and q.
    for r in 0..n {
        let arp = a[(r, p)];
        let arq = a[(r, q)];
        a[(r, p)] = arp * c - arq * ec * s;
        a[(r, q)] = arp * s + arq * ec * c;
    }
    // A <- J^dag A, rows p and q.
    for col in 0..n {
        let apc = a[(p, col)];
        let aqc = a[(q, col)];
        a[(p, col)] = apc * c - aqc * e * s;
        a[(q, col)] = apc * s + aqc * e * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(app - t * g, 0.0);
    a[(q, q)] = Complex64::new(aqq + t * g, 0.0);

    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp * c - vrq * ec * s;
        v[(r, q)] = vrp * s + vrq * ec * c;
    }
    true
}

fn fix_phase(mut col: DVector<Complex64>) -> DVector<Complex64> {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in col.iter().enumerate() {
        let m = z.norm();
        if m > best_abs * (1.0 + 1e-12) {
            best = i;
            best_abs = m;
        }
    }
    let pivot = col[best];
    if best_abs > 0.0 {
        let phase = pivot.conj() / best_abs;
        col.iter_mut().for_each(|z| *z *= phase);
        col[best] = Complex64::new(col[best].norm(), 0.0);
    }
    col.unscale_mut(col.norm());
    col
}
