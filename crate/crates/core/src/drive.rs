//! The composite drive `Π_k e^{iθ_k H} e^{-iφ_k/2 ∂H} e^{-iθ_k H}` and the
//! infidelity experiments built on it.

use rayon::prelude::*;

use crate::eigen::{eigendecompose, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::gates::ProductOrder;
use crate::hamiltonians::ParametrizedHamiltonian;
use crate::linalg::{expm_hermitian, hs_norm, infidelity, HermitianOperator, UnitaryMatrix};
use crate::schedule::{
    complexity_estimate, period_prediction, regularized_angles, standard_angles, AngleSchedule,
    ComplexityReport,
};
use crate::spectral::{effective_generator, spectral_function};

const DEGENERACY_TOL: f64 = 1e-10;

pub fn composite_unitary(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    sched: &AngleSchedule,
) -> Result<UnitaryMatrix> {
    composite_unitary_ordered(h, dh, sched, ProductOrder::Ascending)
}

/// Factor-by-factor product; each factor is the conjugated derivative
/// rotation `e^{iθH} e^{-iφ/2 ∂H} e^{-iθH}`.
pub fn composite_unitary_ordered(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    sched: &AngleSchedule,
    order: ProductOrder,
) -> Result<UnitaryMatrix> {
    if h.dim() != dh.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: dh.dim(),
        });
    }
    let hs = eigendecompose(h)?;
    let ds = eigendecompose(dh)?;
    Ok(composite_from_spectra(&hs, &ds, sched, order))
}

fn composite_from_spectra(
    hs: &SpectralDecomposition,
    ds: &SpectralDecomposition,
    sched: &AngleSchedule,
    order: ProductOrder,
) -> UnitaryMatrix {
    let mut u = UnitaryMatrix::identity(hs.dim()).into_matrix();
    for k in order.indices(sched.k()) {
        let p = sched.pair(k).expect("index within schedule");
        // e^{iθH} = exp(-i(-θ)H)
        let conj = hs.propagator(-p.theta);
        let kick = ds.propagator(0.5 * p.phi);
        let factor = conj.matrix() * kick.matrix() * conj.matrix().adjoint();
        u = factor * u;
    }
    UnitaryMatrix::from_unitary_unchecked(u)
}

/// `exp(-i δλ A)`.
pub fn adiabatic_unitary(agp: &HermitianOperator, delta_lambda: f64) -> Result<UnitaryMatrix> {
    expm_hermitian(agp, delta_lambda)
}

/// `hs_norm(U - exp(-i δλ V))`.
pub fn generator_gap(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    sched: &AngleSchedule,
) -> Result<f64> {
    let u = composite_unitary(h, dh, sched)?;
    let v = effective_generator(h, dh, sched)?;
    let approx = expm_hermitian(&v, sched.delta_lambda())?;
    Ok(hs_norm(&(u.matrix() - approx.matrix())))
}

fn check_target(spec: &SpectralDecomposition, index: usize, lambda: f64) -> Result<()> {
    if index >= spec.dim() {
        return Err(Error::TargetOutOfRange {
            index,
            dim: spec.dim(),
        });
    }
    if spec.dim() > 1 {
        let scale = spec
            .eigenvalues()
            .iter()
            .fold(1.0_f64, |a, e| a.max(e.abs()));
        let gap = spec.level_gap(index);
        if gap <= DEGENERACY_TOL * scale {
            return Err(Error::DegenerateTarget { index, lambda, gap });
        }
    }
    Ok(())
}

struct Endpoints {
    start: SpectralDecomposition,
    end: SpectralDecomposition,
}

fn endpoints<M: ParametrizedHamiltonian + ?Sized>(
    model: &M,
    lambda: f64,
    delta_lambda: f64,
    target: usize,
) -> Result<Endpoints> {
    let start = eigendecompose(&model.hamiltonian(lambda))?;
    let end = eigendecompose(&model.hamiltonian(lambda + delta_lambda))?;
    check_target(&start, target, lambda)?;
    check_target(&end, target, lambda + delta_lambda)?;
    Ok(Endpoints { start, end })
}

pub fn drive_infidelity<M: ParametrizedHamiltonian + ?Sized>(
    model: &M,
    lambda: f64,
    sched: &AngleSchedule,
    target: usize,
) -> Result<f64> {
    drive_infidelity_ordered(model, lambda, sched, target, ProductOrder::Ascending)
}

/// `1 - |<n(λ+δλ)| U(λ) |n(λ)>|²`.
pub fn drive_infidelity_ordered<M: ParametrizedHamiltonian + ?Sized>(
    model: &M,
    lambda: f64,
    sched: &AngleSchedule,
    target: usize,
    order: ProductOrder,
) -> Result<f64> {
    let ep = endpoints(model, lambda, sched.delta_lambda(), target)?;
    let u = composite_unitary_ordered(
        &model.hamiltonian(lambda),
        &model.derivative(lambda),
        sched,
        order,
    )?;
    infidelity_after(&ep, &u, target)
}

fn infidelity_after(ep: &Endpoints, u: &UnitaryMatrix, target: usize) -> Result<f64> {
    let evolved = u.apply(&ep.start.eigenvector(target))?;
    infidelity(&ep.end.eigenvector(target), &evolved)
}

/// Infidelity under a bare parameter step, `1 - |<n(λ+δλ)|n(λ)>|²`.
pub fn quench_infidelity<M: ParametrizedHamiltonian + ?Sized>(
    model: &M,
    lambda: f64,
    delta_lambda: f64,
    target: usize,
) -> Result<f64> {
    let ep = endpoints(model, lambda, delta_lambda, target)?;
    infidelity(&ep.end.eigenvector(target), &ep.start.eigenvector(target))
}

/// Infidelity of an arbitrary unitary applied to `|n(λ)>`.
pub fn unitary_infidelity<M: ParametrizedHamiltonian + ?Sized>(
    model: &M,
    lambda: f64,
    delta_lambda: f64,
    u: &UnitaryMatrix,
    target: usize,
) -> Result<f64> {
    let ep = endpoints(model, lambda, delta_lambda, target)?;
    infidelity_after(&ep, u, target)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveResult {
    pub k: usize,
    pub infidelity: f64,
    pub quench_infidelity: f64,
    pub complexity: ComplexityReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<DriveResult>,
    pub predicted_period: f64,
    pub omega: f64,
    pub eta: Option<f64>,
    pub delta_min: f64,
    pub delta_max: f64,
    pub order: ProductOrder,
}

/// Cutoff choice for a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    /// `Ω = Δmax` of the target's spectral function.
    DeltaMax,
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub lambda: f64,
    pub delta_lambda: f64,
    pub cutoff: Cutoff,
    pub k_max: usize,
    pub eta: Option<f64>,
    pub order: ProductOrder,
}

/// Ground-state spectral data of a model at `λ`.
pub fn ground_spectrum<M: ParametrizedHamiltonian + ?Sized>(
    model: &M,
    lambda: f64,
) -> Result<crate::spectral::SpectralFunction> {
    spectral_function(&model.hamiltonian(lambda), &model.derivative(lambda), true)
}

/// Infidelity of the ground state for `K = 1..=k_max`.
///
/// Rows are computed in parallel; each row is a pure function of `K`, so the
/// result does not depend on scheduling.
pub fn sweep_k<M: ParametrizedHamiltonian + Sync + ?Sized>(
    model: &M,
    spec: &SweepSpec,
) -> Result<SweepResult> {
    if spec.k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let h = model.hamiltonian(spec.lambda);
    let dh = model.derivative(spec.lambda);
    let ground = spectral_function(&h, &dh, true)?;
    let omega = match spec.cutoff {
        Cutoff::DeltaMax => ground.delta_max(),
        Cutoff::Explicit(w) => w,
    };
    let predicted_period = period_prediction(omega, ground.delta_min())?;

    let ep = endpoints(model, spec.lambda, spec.delta_lambda, 0)?;
    let quench = infidelity(&ep.end.eigenvector(0), &ep.start.eigenvector(0))?;
    let hs = eigendecompose(&h)?;
    let ds = eigendecompose(&dh)?;
    let h_norm = max_abs_eigenvalue(&hs);
    let dh_norm = max_abs_eigenvalue(&ds);

    let rows = (1..=spec.k_max)
        .into_par_iter()
        .map(|k| {
            let sched = match spec.eta {
                Some(eta) => regularized_angles(k, omega, spec.delta_lambda, eta)?,
                None => standard_angles(k, omega, spec.delta_lambda)?,
            };
            let u = composite_from_spectra(&hs, &ds, &sched, spec.order);
            Ok(DriveResult {
                k,
                infidelity: infidelity_after(&ep, &u, 0)?,
                quench_infidelity: quench,
                complexity: complexity_estimate(&sched, h_norm, dh_norm)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepResult {
        rows,
        predicted_period,
        omega,
        eta: spec.eta,
        delta_min: ground.delta_min(),
        delta_max: ground.delta_max(),
        order: spec.order,
    })
}

pub(crate) fn max_abs_eigenvalue(spec: &SpectralDecomposition) -> f64 {
    spec.eigenvalues()
        .iter()
        .fold(0.0_f64, |a, e| a.max(e.abs()))
}

impl SweepResult {
    /// `K` values that are strict local minima of the infidelity.
    pub fn local_minima(&self) -> Vec<usize> {
        local_extrema(&self.rows, |a, b| a < b)
    }

    /// `K` values that are strict local maxima of the infidelity.
    pub fn local_maxima(&self) -> Vec<usize> {
        local_extrema(&self.rows, |a, b| a > b)
    }

    pub fn min_infidelity(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.infidelity)
            .fold(f64::INFINITY, f64::min)
    }
}

fn local_extrema(rows: &[DriveResult], better: impl Fn(f64, f64) -> bool) -> Vec<usize> {
    let n = rows.len();
    (0..n)
        .filter(|&i| {
            let v = rows[i].infidelity;
            let left = i == 0 || better(v, rows[i - 1].infidelity);
            let right = i + 1 == n || better(v, rows[i + 1].infidelity);
            // Interior points only: endpoints are not resolved extrema.
            i > 0 && i + 1 < n && left && right
        })
        .map(|i| rows[i].k)
        .collect()
}
