//! Dense complex operators: Hermitian and unitary wrappers, commutators,
//! Hilbert-Schmidt norms, and state fidelities.
//!
//! Everything here works on small dense matrices (dimension up to a few
//! dozen). Matrices are `nalgebra::DMatrix<Complex64>`; the wrappers only add
//! the invariant checks.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::eigen::eigendecompose;
use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

const HERMITIAN_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-12;

/// Largest entrywise modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

fn check_same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// A dense Hermitian matrix.
///
/// Construction accepts matrices that are Hermitian up to
/// `1e-12 * (1 + max|M|)` and stores the exact Hermitian part.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let adjoint = matrix.adjoint();
        let deviation = max_abs_diff(&matrix, &adjoint);
        if deviation > HERMITIAN_TOL * (1.0 + max_abs(&matrix)) {
            return Err(Error::NotHermitian { deviation });
        }
        let matrix = (matrix + adjoint).scale(0.5);
        Ok(Self { matrix })
    }

    /// Build from a real symmetric matrix given row by row.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_fn(dim, dim, |i, j| {
            Complex64::new(entries[i * dim + j], 0.0)
        }))
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.map(|z| z * s),
        }
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, other: &HermitianOperator, s: f64) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self {
            matrix: &self.matrix + other.matrix.map(|z| z * s),
        })
    }

    /// Largest absolute eigenvalue.
    pub fn operator_norm(&self) -> Result<f64> {
        let spec = eigendecompose(self)?;
        Ok(spec
            .eigenvalues()
            .iter()
            .fold(0.0_f64, |acc, e| acc.max(e.abs())))
    }

    /// Internal constructor for matrices Hermitian by construction.
    pub(crate) fn from_hermitian_unchecked(matrix: ComplexMatrix) -> Self {
        let adjoint = matrix.adjoint();
        Self {
            matrix: (matrix + adjoint).scale(0.5),
        }
    }
}

/// A dense unitary matrix, checked against `max|U^dag U - I| <= 1e-10`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: ComplexMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_square(&matrix)?;
        let deviation = unitarity_defect(&matrix);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self * other`, i.e. `other` acts first.
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<Self> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        check_same_dim(self.dim(), state.dim())?;
        Ok(StateVector {
            amplitudes: &self.matrix * &state.amplitudes,
        })
    }

    /// Products of exactly unitary factors; the caller guarantees unitarity.
    pub(crate) fn from_unitary_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }
}

/// `max |U^dag U - I|` entrywise.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let gram = u.adjoint() * u;
    let id = DMatrix::<Complex64>::identity(u.nrows(), u.ncols());
    max_abs_diff(&gram, &id)
}

/// A normalized complex state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Normalizes the amplitudes; fails on zero or non-finite input.
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::ZeroNorm);
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
        })
    }

    pub fn from_slice(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amplitudes))
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::TargetOutOfRange { index, dim });
        }
        let mut v = DVector::zeros(dim);
        v[index] = ONE;
        Ok(Self { amplitudes: v })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub(crate) fn from_normalized_unchecked(amplitudes: DVector<Complex64>) -> Self {
        debug_assert!((amplitudes.norm() - 1.0).abs() < 1e-8);
        Self { amplitudes }
    }

    pub(crate) fn is_normalized(&self) -> bool {
        (self.amplitudes.norm() - 1.0).abs() <= NORM_TOL
    }
}

/// `a b - b a` on raw matrices.
pub fn commutator_raw(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_same_dim(a.nrows(), b.nrows())?;
    Ok(a * b - b * a)
}

pub fn commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<ComplexMatrix> {
    commutator_raw(a.matrix(), b.matrix())
}

/// `[h, [h, ... [h, b]]]` with `order` commutators; order 0 returns `b`.
pub fn nested_commutator(
    h: &HermitianOperator,
    b: &HermitianOperator,
    order: usize,
) -> Result<ComplexMatrix> {
    check_same_dim(h.dim(), b.dim())?;
    let mut acc = b.matrix().clone();
    for _ in 0..order {
        acc = commutator_raw(h.matrix(), &acc)?;
    }
    Ok(acc)
}

/// `exp(-i t h)` through the spectral decomposition of `h`.
pub fn expm_hermitian(h: &HermitianOperator, t: f64) -> Result<UnitaryMatrix> {
    Ok(eigendecompose(h)?.propagator(t))
}

/// `sqrt(sum |a_ij|^2)`.
pub fn hs_norm(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `1 - |<target|actual>|^2`, clamped to `[0, 1]`.
pub fn infidelity(target: &StateVector, actual: &StateVector) -> Result<f64> {
    check_same_dim(target.dim(), actual.dim())?;
    if !target.is_normalized() || !actual.is_normalized() {
        return Err(Error::invalid("infidelity requires normalized states"));
    }
    // ||a - <t|a> t||² equals 1 - |<t|a>|² for unit vectors and keeps full
    // relative precision when the infidelity is tiny.
    let c = target.inner(actual)?;
    let residual: f64 = target
        .amplitudes()
        .iter()
        .zip(actual.amplitudes().iter())
        .map(|(t, a)| (a - c * t).norm_sqr())
        .sum();
    Ok(residual.clamp(0.0, 1.0))
}

/// Pauli matrices.
pub mod pauli {
    use super::*;

    pub fn x() -> HermitianOperator {
        HermitianOperator::from_hermitian_unchecked(DMatrix::from_row_slice(
            2,
            2,
            &[ZERO, ONE, ONE, ZERO],
        ))
    }

    pub fn y() -> HermitianOperator {
        HermitianOperator::from_hermitian_unchecked(DMatrix::from_row_slice(
            2,
            2,
            &[ZERO, -I, I, ZERO],
        ))
    }

    pub fn z() -> HermitianOperator {
        HermitianOperator::from_hermitian_unchecked(DMatrix::from_row_slice(
            2,
            2,
            &[ONE, ZERO, ZERO, -ONE],
        ))
    }
}
