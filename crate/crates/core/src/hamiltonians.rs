//! Parametrized model Hamiltonians.
//!
//! Two models are provided: a single qubit in a `hX(λ) X + hZ(λ) Z` field and
//! the fully connected transverse-field Ising model restricted to its
//! maximum-spin sector, `H = (2J/N) Sz^2 + 2 hX(λ) Sx` with `S = N/2`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{pauli, HermitianOperator};

/// A Hamiltonian family `H(λ)` with its parameter derivative.
pub trait ParametrizedHamiltonian {
    fn dimension(&self) -> usize;
    fn hamiltonian(&self, lambda: f64) -> HermitianOperator;
    fn derivative(&self, lambda: f64) -> HermitianOperator;
}

/// `offset + slope * λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub offset: f64,
    pub slope: f64,
}

impl Affine {
    pub const fn new(offset: f64, slope: f64) -> Self {
        Self { offset, slope }
    }

    pub const fn constant(value: f64) -> Self {
        Self::new(value, 0.0)
    }

    pub fn at(&self, lambda: f64) -> f64 {
        self.offset + self.slope * lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelModel {
    pub hx: Affine,
    pub hz: Affine,
}

impl TwoLevelModel {
    pub fn new(hx: Affine, hz: Affine) -> Self {
        Self { hx, hz }
    }

    fn fields(&self, lambda: f64) -> Result<(f64, f64)> {
        let (hx, hz) = (self.hx.at(lambda), self.hz.at(lambda));
        if hx == 0.0 && hz == 0.0 {
            return Err(Error::DegeneratePoint { lambda });
        }
        Ok((hx, hz))
    }

    /// `Δ = 2 sqrt(hX^2 + hZ^2)`.
    pub fn gap(&self, lambda: f64) -> Result<f64> {
        let (hx, hz) = self.fields(lambda)?;
        Ok(2.0 * hx.hypot(hz))
    }

    /// Closed-form gauge potential, a real multiple of Pauli Y.
    pub fn exact_agp(&self, lambda: f64) -> Result<HermitianOperator> {
        let (hx, hz) = self.fields(lambda)?;
        let coeff =
            (hz * self.hx.slope - hx * self.hz.slope) / (2.0 * (hx * hx + hz * hz));
        Ok(pauli::y().scale(coeff))
    }
}

impl ParametrizedHamiltonian for TwoLevelModel {
    fn dimension(&self) -> usize {
        2
    }

    fn hamiltonian(&self, lambda: f64) -> HermitianOperator {
        pauli::x()
            .scale(self.hx.at(lambda))
            .add_scaled(&pauli::z(), self.hz.at(lambda))
            .expect("2x2 operands")
    }

    fn derivative(&self, _lambda: f64) -> HermitianOperator {
        pauli::x()
            .scale(self.hx.slope)
            .add_scaled(&pauli::z(), self.hz.slope)
            .expect("2x2 operands")
    }
}

/// Fully connected Ising model with `J(λ) = j0` and `hX(λ) = hx0 λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmgModel {
    n_spins: usize,
    pub j0: f64,
    pub hx0: f64,
}

impl LmgModel {
    pub fn new(n_spins: usize, j0: f64, hx0: f64) -> Result<Self> {
        if n_spins == 0 {
            return Err(Error::invalid("LMG model needs at least one spin"));
        }
        Ok(Self { n_spins, j0, hx0 })
    }

    pub fn n_spins(&self) -> usize {
        self.n_spins
    }
}

impl ParametrizedHamiltonian for LmgModel {
    fn dimension(&self) -> usize {
        self.n_spins + 1
    }

    fn hamiltonian(&self, lambda: f64) -> HermitianOperator {
        let n = self.n_spins as f64;
        let sz = collective_sz(self.n_spins);
        let sx = collective_sx(self.n_spins);
        let zz = &sz * &sz;
        let m = zz.scale(2.0 * self.j0 / n) + sx.scale(2.0 * self.hx0 * lambda);
        real_operator(m)
    }

    fn derivative(&self, _lambda: f64) -> HermitianOperator {
        real_operator(collective_sx(self.n_spins).scale(2.0 * self.hx0))
    }
}

fn real_operator(m: DMatrix<f64>) -> HermitianOperator {
    HermitianOperator::new(m.map(|x| Complex64::new(x, 0.0))).expect("real symmetric")
}

/// `Sz` for spin `N/2`, basis ordered `m = S, S-1, ..., -S`.
pub fn collective_sz(n_spins: usize) -> DMatrix<f64> {
    let s = n_spins as f64 / 2.0;
    DMatrix::from_fn(n_spins + 1, n_spins + 1, |i, j| {
        if i == j {
            s - i as f64
        } else {
            0.0
        }
    })
}

/// `Sx = (S+ + S-)/2` in the same basis.
pub fn collective_sx(n_spins: usize) -> DMatrix<f64> {
    let s = n_spins as f64 / 2.0;
    let mut sx = DMatrix::zeros(n_spins + 1, n_spins + 1);
    // <m+1| S+ |m> with row i-1 holding m+1 when row i holds m.
    for i in 1..=n_spins {
        let m = s - i as f64;
        let amp = 0.5 * (s * (s + 1.0) - m * (m + 1.0)).sqrt();
        sx[(i - 1, i)] = amp;
        sx[(i, i - 1)] = amp;
    }
    sx
}

/// A concrete model usable behind a single type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    TwoLevel(TwoLevelModel),
    Lmg(LmgModel),
}

impl ParametrizedHamiltonian for Model {
    fn dimension(&self) -> usize {
        match self {
            Model::TwoLevel(m) => m.dimension(),
            Model::Lmg(m) => m.dimension(),
        }
    }

    fn hamiltonian(&self, lambda: f64) -> HermitianOperator {
        match self {
            Model::TwoLevel(m) => m.hamiltonian(lambda),
            Model::Lmg(m) => m.hamiltonian(lambda),
        }
    }

    fn derivative(&self, lambda: f64) -> HermitianOperator {
        match self {
            Model::TwoLevel(m) => m.derivative(lambda),
            Model::Lmg(m) => m.derivative(lambda),
        }
    }
}
