//! Exact gauge potential, spectral functions, the effective generator of the
//! composite drive, and distance functionals.
//!
//! All constructions work in the eigenbasis of `H(λ)`. With
//! `D_mn = <m|∂λH|n>` and `ω_mn = E_m - E_n`:
//!
//! * exact gauge potential: `A_mn = -i D_mn / ω_mn` for `m != n`
//! * effective generator: `V_mn = i D_mn Σ_k (φ_k/δλ) sin(θ_k ω_mn)`
//! * truncated expansion: `A^(d)_mn = i D_mn Σ_l α_l ω_mn^(2l-1)`
//!
//! so that every Hilbert-Schmidt distance reduces to a weighted sum over
//! spectral lines `(ω_mn, |D_mn|²)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::eigen::{eigendecompose, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{hs_norm, nested_commutator, ComplexMatrix, HermitianOperator, I, ZERO};
use crate::schedule::AngleSchedule;

/// Relative weight below which a line is not part of the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;
const DEGENERACY_TOL: f64 = 1e-10;
const COUPLING_TOL: f64 = 1e-12;
const RANK_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub omega: f64,
    pub weight: f64,
}

/// A finite comb of lines `Φ(ω) = Σ w δ(ω - ω_line)`.
///
/// `delta_min` is the smallest `|ω|` among lines whose weight exceeds
/// [`SUPPORT_THRESHOLD`] times the largest weight. `delta_max` is the largest
/// `|ω|` among all lines, i.e. the width of the spectrum seen by the lines'
/// reference states, independent of how weakly the extreme line couples.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    lines: Vec<SpectralLine>,
    delta_min: f64,
    delta_max: f64,
    support_max: f64,
    ground_only: bool,
}

impl SpectralFunction {
    /// Builds a spectral function from explicit lines.
    pub fn from_lines(lines: Vec<SpectralLine>, ground_only: bool) -> Result<Self> {
        if lines
            .iter()
            .any(|l| !l.omega.is_finite() || !l.weight.is_finite() || l.weight < 0.0)
        {
            return Err(Error::invalid("spectral lines need finite omega and weight >= 0"));
        }
        let max_weight = lines.iter().fold(0.0_f64, |a, l| a.max(l.weight));
        if max_weight == 0.0 {
            return Err(Error::EmptySupport);
        }
        let cut = SUPPORT_THRESHOLD * max_weight;
        let support = lines
            .iter()
            .filter(|l| l.weight > cut && l.omega != 0.0)
            .map(|l| l.omega.abs());
        let (delta_min, support_max) = support.fold((f64::INFINITY, 0.0_f64), |(lo, hi), w| {
            (lo.min(w), hi.max(w))
        });
        if !delta_min.is_finite() {
            return Err(Error::EmptySupport);
        }
        let delta_max = lines.iter().fold(0.0_f64, |a, l| a.max(l.omega.abs()));
        Ok(Self {
            lines,
            delta_min,
            delta_max,
            support_max,
            ground_only,
        })
    }

    pub fn lines(&self) -> &[SpectralLine] {
        &self.lines
    }

    pub fn delta_min(&self) -> f64 {
        self.delta_min
    }

    pub fn delta_max(&self) -> f64 {
        self.delta_max
    }

    /// Largest `|ω|` among supported (non-negligible) lines.
    pub fn support_max(&self) -> f64 {
        self.support_max
    }

    pub fn ground_only(&self) -> bool {
        self.ground_only
    }

    /// Lines whose weight exceeds the support threshold.
    pub fn support(&self) -> impl Iterator<Item = &SpectralLine> {
        let max_weight = self.lines.iter().fold(0.0_f64, |a, l| a.max(l.weight));
        let cut = SUPPORT_THRESHOLD * max_weight;
        self.lines.iter().filter(move |l| l.weight > cut)
    }
}

/// Eigenbasis data shared by the constructions below.
struct Eigenframe {
    spec: SpectralDecomposition,
    coupling: ComplexMatrix,
    h_scale: f64,
    dh_scale: f64,
}

impl Eigenframe {
    fn new(h: &HermitianOperator, dh: &HermitianOperator) -> Result<Self> {
        if h.dim() != dh.dim() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                found: dh.dim(),
            });
        }
        let spec = eigendecompose(h)?;
        let coupling = spec.to_eigenbasis(dh.matrix());
        let h_scale = spec
            .eigenvalues()
            .iter()
            .fold(0.0_f64, |a, e| a.max(e.abs()));
        let dh_scale = hs_norm(dh.matrix());
        Ok(Self {
            spec,
            coupling,
            h_scale,
            dh_scale,
        })
    }

    fn omega(&self, m: usize, n: usize) -> f64 {
        let e = self.spec.eigenvalues();
        e[m] - e[n]
    }

    /// `Some(ω_mn)` for a usable pair, `None` for an uncoupled degenerate pair.
    fn pair(&self, m: usize, n: usize) -> Result<Option<f64>> {
        let omega = self.omega(m, n);
        if omega.abs() <= DEGENERACY_TOL * self.h_scale {
            if self.coupling[(m, n)].norm() > COUPLING_TOL * self.dh_scale {
                return Err(Error::GaugeUndefined { m, n, omega });
            }
            return Ok(None);
        }
        Ok(Some(omega))
    }

    /// `Q M Q^dag` where `M_mn = f(m, n, ω_mn) D_mn` off the diagonal.
    fn build(&self, f: impl Fn(f64) -> Complex64, skip_degenerate: bool) -> Result<ComplexMatrix> {
        let d = self.spec.dim();
        let mut m = DMatrix::from_element(d, d, ZERO);
        for r in 0..d {
            for c in 0..d {
                if r == c {
                    continue;
                }
                let omega = if skip_degenerate {
                    match self.pair(r, c)? {
                        Some(w) => w,
                        None => continue,
                    }
                } else {
                    self.omega(r, c)
                };
                m[(r, c)] = f(omega) * self.coupling[(r, c)];
            }
        }
        Ok(self.spec.from_eigenbasis(&m))
    }
}

/// Exact gauge potential `i Σ_{m≠n} |m><m|∂λ n><n|`.
pub fn exact_agp(h: &HermitianOperator, dh: &HermitianOperator) -> Result<HermitianOperator> {
    let frame = Eigenframe::new(h, dh)?;
    let m = frame.build(|omega| -I / omega, true)?;
    Ok(HermitianOperator::from_hermitian_unchecked(m))
}

/// Spectral function of `∂λH` in the eigenbasis of `H`.
///
/// With `ground_only`, only transitions out of level 0 enter, each as the
/// pair of lines at `±ω_m0`.
pub fn spectral_function(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    ground_only: bool,
) -> Result<SpectralFunction> {
    let frame = Eigenframe::new(h, dh)?;
    let d = frame.spec.dim();
    let mut lines = Vec::new();
    if ground_only {
        for m in 1..d {
            if let Some(omega) = frame.pair(m, 0)? {
                let weight = frame.coupling[(m, 0)].norm_sqr();
                lines.push(SpectralLine { omega, weight });
                lines.push(SpectralLine {
                    omega: -omega,
                    weight,
                });
            }
        }
    } else {
        for m in 0..d {
            for n in 0..d {
                if m == n {
                    continue;
                }
                if let Some(omega) = frame.pair(m, n)? {
                    lines.push(SpectralLine {
                        omega,
                        weight: frame.coupling[(m, n)].norm_sqr(),
                    });
                }
            }
        }
    }
    SpectralFunction::from_lines(lines, ground_only)
}

/// Single generator `V` with `U ≈ exp(-i δλ V)`, in closed spectral form.
pub fn effective_generator(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    sched: &AngleSchedule,
) -> Result<HermitianOperator> {
    let frame = Eigenframe::new(h, dh)?;
    let m = frame.build(|omega| I * sched.drive_sum(omega), false)?;
    Ok(HermitianOperator::from_hermitian_unchecked(m))
}

/// `∫ dω [1/ω + Σ_k (φ_k/δλ) sin(θ_k ω)]² Φ(ω)`.
pub fn agp_distance(spec: &SpectralFunction, sched: &AngleSchedule) -> Result<f64> {
    if spec.lines().iter().any(|l| l.omega == 0.0) {
        return Err(Error::ZeroFrequency);
    }
    Ok(spec
        .lines()
        .iter()
        .map(|l| {
            let r = 1.0 / l.omega + sched.drive_sum(l.omega);
            l.weight * r * r
        })
        .sum())
}

/// Pointwise kernel `[g(ω) + Σ_k (φ_k/δλ) sin(θ_k ω)]²`.
///
/// `g(ω) = 1/ω`, or `ω/(ω² + η²)` with the schedule's `η` when `regularized`.
pub fn kernel_curve(sched: &AngleSchedule, omegas: &[f64], regularized: bool) -> Result<Vec<f64>> {
    let eta = if regularized {
        Some(sched.eta().ok_or_else(|| {
            Error::invalid("regularized kernel needs a schedule with eta")
        })?)
    } else {
        None
    };
    omegas
        .iter()
        .map(|&w| {
            let g = match eta {
                Some(eta) => {
                    let den = w * w + eta * eta;
                    if den == 0.0 {
                        0.0
                    } else {
                        w / den
                    }
                }
                None if w == 0.0 => return Err(Error::SingularKernel),
                None => 1.0 / w,
            };
            let r = g + sched.drive_sum(w);
            Ok(r * r)
        })
        .collect()
}

/// Coefficients of the truncated odd-commutator expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedAgpFit {
    pub d: usize,
    pub alphas: Vec<f64>,
    pub residual: f64,
}

/// `Σ_lines w [1/ω + Σ_l α_l ω^(2l-1)]²`.
pub fn truncated_distance(spec: &SpectralFunction, alphas: &[f64]) -> f64 {
    spec.lines()
        .iter()
        .map(|l| {
            let r = 1.0 / l.omega + odd_poly(alphas, l.omega);
            l.weight * r * r
        })
        .sum()
}

fn odd_poly(alphas: &[f64], omega: f64) -> f64 {
    let w2 = omega * omega;
    let mut power = omega;
    let mut sum = 0.0;
    for a in alphas {
        sum += a * power;
        power *= w2;
    }
    sum
}

/// Weighted least-squares fit of `-1/ω` by odd monomials `ω^(2l-1)`.
///
/// Frequencies are rescaled by the largest `|ω|` before the solve, which is
/// done by SVD with relative rank cutoff `1e-12`; rank-deficient systems get
/// the minimum-norm solution in the rescaled coefficients.
pub fn fit_truncated_agp(spec: &SpectralFunction, d: usize) -> Result<TruncatedAgpFit> {
    if d == 0 {
        return Err(Error::invalid("truncation order d must be at least 1"));
    }
    if spec.lines().iter().any(|l| l.omega == 0.0) {
        return Err(Error::ZeroFrequency);
    }
    let rows: Vec<&SpectralLine> = spec.lines().iter().filter(|l| l.weight > 0.0).collect();
    if rows.is_empty() {
        return Err(Error::EmptySupport);
    }
    let scale = rows.iter().fold(0.0_f64, |a, l| a.max(l.omega.abs()));

    let design = DMatrix::from_fn(rows.len(), d, |r, c| {
        let x = rows[r].omega / scale;
        rows[r].weight.sqrt() * x.powi(2 * c as i32 + 1)
    });
    let rhs = DVector::from_iterator(
        rows.len(),
        rows.iter().map(|l| -l.weight.sqrt() * scale / l.omega),
    );
    let svd = design.svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0_f64, |a, &s| a.max(s));
    let beta = svd
        .solve(&rhs, RANK_CUTOFF * smax)
        .map_err(|e| Error::invalid(format!("least-squares solve failed: {e}")))?;

    // ω^(2l-1) α_l = x^(2l-1) β_l / scale with x = ω/scale.
    let alphas: Vec<f64> = beta
        .iter()
        .enumerate()
        .map(|(c, b)| b / scale.powi(2 * c as i32 + 2))
        .collect();
    let residual = truncated_distance(spec, &alphas);
    Ok(TruncatedAgpFit { d, alphas, residual })
}

/// `i Σ_l α_l L^(2l-1) ∂λH` with `L = [H, ·]`, built from explicit commutators.
pub fn truncated_agp_operator(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    fit: &TruncatedAgpFit,
) -> Result<HermitianOperator> {
    let dim = h.dim();
    let mut acc = DMatrix::from_element(dim, dim, ZERO);
    let mut term = nested_commutator(h, dh, 1)?;
    for (l, alpha) in fit.alphas.iter().enumerate() {
        if l > 0 {
            term = nested_commutator_raw_twice(h, &term);
        }
        acc += term.map(|z| z * I * *alpha);
    }
    Ok(HermitianOperator::from_hermitian_unchecked(acc))
}

fn nested_commutator_raw_twice(h: &HermitianOperator, m: &ComplexMatrix) -> ComplexMatrix {
    let hm = h.matrix();
    let once = hm * m - m * hm;
    hm * &once - &once * hm
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{Affine, ParametrizedHamiltonian, TwoLevelModel};
    use crate::linalg::{max_abs, max_abs_diff, pauli};
    use crate::schedule::standard_angles;

    fn ramp() -> TwoLevelModel {
        TwoLevelModel::new(Affine::new(0.0, 1.0), Affine::constant(1.0))
    }

    #[test]
    fn two_level_exact_agp_matches_closed_form() {
        let m = ramp();
        let a = exact_agp(&m.hamiltonian(0.0), &m.derivative(0.0)).unwrap();
        assert!(max_abs_diff(a.matrix(), pauli::y().scale(0.5).matrix()) < 1e-15);
    }

    #[test]
    fn exact_agp_trivial_cases() {
        let m = ramp();
        let h = m.hamiltonian(0.4);
        let zero = exact_agp(&h, &HermitianOperator::zeros(2)).unwrap();
        assert_eq!(max_abs(zero.matrix()), 0.0);
        let same = exact_agp(&h, &h).unwrap();
        assert!(max_abs(same.matrix()) < 1e-15);
    }

    #[test]
    fn exact_agp_rejects_coupled_degeneracy() {
        let h = HermitianOperator::identity(2);
        let err = exact_agp(&h, &pauli::x()).unwrap_err();
        assert!(matches!(err, Error::GaugeUndefined { m: 0, n: 1, .. }));
        // Uncoupled degenerate pairs are skipped.
        let ok = exact_agp(&h, &pauli::z()).unwrap();
        assert_eq!(max_abs(ok.matrix()), 0.0);
    }

    #[test]
    fn exact_agp_is_off_diagonal_in_eigenbasis() {
        let m = crate::hamiltonians::LmgModel::new(5, -1.0, 1.0).unwrap();
        let (h, dh) = (m.hamiltonian(0.7), m.derivative(0.7));
        let a = exact_agp(&h, &dh).unwrap();
        let spec = eigendecompose(&h).unwrap();
        let inbasis = spec.to_eigenbasis(a.matrix());
        for n in 0..6 {
            assert!(inbasis[(n, n)].norm() < 1e-14);
        }
    }

    #[test]
    fn two_level_spectrum_has_two_lines() {
        let m = TwoLevelModel::new(Affine::constant(1.0), Affine::constant(0.0));
        let dh = pauli::x().add_scaled(&pauli::z(), 0.3).unwrap();
        for ground_only in [true, false] {
            let s = spectral_function(&m.hamiltonian(0.0), &dh, ground_only).unwrap();
            assert_eq!(s.lines().len(), 2);
            let mut omegas: Vec<f64> = s.lines().iter().map(|l| l.omega).collect();
            omegas.sort_by(f64::total_cmp);
            assert!((omegas[0] + 2.0).abs() < 1e-14 && (omegas[1] - 2.0).abs() < 1e-14);
            assert!((s.delta_min() - 2.0).abs() < 1e-14);
            assert!((s.delta_max() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_derivative_has_empty_support() {
        let m = ramp();
        let err = spectral_function(&m.hamiltonian(0.2), &HermitianOperator::identity(2), false)
            .unwrap_err();
        assert!(matches!(err, Error::EmptySupport));
    }

    #[test]
    fn spectral_function_is_symmetric() {
        let m = crate::hamiltonians::LmgModel::new(4, -1.0, 1.0).unwrap();
        let s = spectral_function(&m.hamiltonian(1.0), &m.derivative(1.0), false).unwrap();
        for l in s.support() {
            assert!(s
                .lines()
                .iter()
                .any(|o| (o.omega + l.omega).abs() < 1e-9 && (o.weight - l.weight).abs() < 1e-9));
        }
        assert!(s.delta_min() <= s.delta_max());
    }

    #[test]
    fn effective_generator_exact_two_level() {
        let m = ramp();
        let lambda = 0.0;
        let gap = m.gap(lambda).unwrap();
        let sched = AngleSchedule::two_level_exact(gap, 1e-3).unwrap();
        let v = effective_generator(&m.hamiltonian(lambda), &m.derivative(lambda), &sched).unwrap();
        let a = m.exact_agp(lambda).unwrap();
        assert!(max_abs_diff(v.matrix(), a.matrix()) < 1e-12);
    }

    #[test]
    fn effective_generator_vanishes_without_drive() {
        let m = ramp();
        let sched = standard_angles(4, 3.0, 1e-3).unwrap().without_drive();
        let v = effective_generator(&m.hamiltonian(0.5), &m.derivative(0.5), &sched).unwrap();
        assert_eq!(max_abs(v.matrix()), 0.0);
    }

    #[test]
    fn distance_examples() {
        let m = ramp();
        let (h, dh) = (m.hamiltonian(0.0), m.derivative(0.0));
        let gap = m.gap(0.0).unwrap();
        let spec = spectral_function(&h, &dh, false).unwrap();
        let exact = AngleSchedule::two_level_exact(gap, 1e-3).unwrap();
        assert!(agp_distance(&spec, &exact).unwrap() < 1e-12);

        let empty = AngleSchedule::custom(1.0, 1e-3, vec![]).unwrap();
        let bare: f64 = spec.lines().iter().map(|l| l.weight / (l.omega * l.omega)).sum();
        assert_eq!(agp_distance(&spec, &empty).unwrap(), bare);

        let bad = SpectralFunction::from_lines(
            vec![
                SpectralLine { omega: 0.0, weight: 0.0 },
                SpectralLine { omega: 1.0, weight: 1.0 },
            ],
            false,
        )
        .unwrap();
        assert!(matches!(agp_distance(&bad, &empty), Err(Error::ZeroFrequency)));
    }

    #[test]
    fn kernel_examples() {
        let k0 = AngleSchedule::custom(1.0, 1e-3, vec![]).unwrap();
        let v = kernel_curve(&k0, &[1e-8], false).unwrap();
        assert!(v[0] > 1e15);
        assert!(matches!(kernel_curve(&k0, &[0.0], false), Err(Error::SingularKernel)));

        let exact = AngleSchedule::two_level_exact(2.5, 1e-3).unwrap();
        let v = kernel_curve(&exact, &[2.5, -2.5], false).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-12));

        let reg = crate::schedule::regularized_angles(6, 10.0, 1e-3, 0.5).unwrap();
        assert_eq!(kernel_curve(&reg, &[0.0], true).unwrap(), vec![0.0]);
        assert!(kernel_curve(&k0, &[1.0], true).is_err());
    }

    #[test]
    fn fit_single_line() {
        let delta = 1.7;
        let spec = SpectralFunction::from_lines(
            vec![
                SpectralLine { omega: delta, weight: 0.4 },
                SpectralLine { omega: -delta, weight: 0.4 },
            ],
            true,
        )
        .unwrap();
        let fit = fit_truncated_agp(&spec, 1).unwrap();
        assert!((fit.alphas[0] + 1.0 / (delta * delta)).abs() < 1e-14);
        assert!(fit.residual < 1e-28);
        assert!(fit_truncated_agp(&spec, 0).is_err());
    }

    #[test]
    fn fit_interpolates_distinct_lines() {
        let mut lines = Vec::new();
        for (w, wt) in [(1.0, 1.0), (2.0, 0.5), (3.0, 0.2)] {
            lines.push(SpectralLine { omega: w, weight: wt });
            lines.push(SpectralLine { omega: -w, weight: wt });
        }
        let spec = SpectralFunction::from_lines(lines, false).unwrap();
        let fit = fit_truncated_agp(&spec, 3).unwrap();
        assert!(fit.residual <= 1e-18, "{}", fit.residual);
        let under = fit_truncated_agp(&spec, 2).unwrap();
        assert!(under.residual > 1e-6);
        assert!((under.residual - truncated_distance(&spec, &under.alphas)).abs() <= 1e-9);
    }

    #[test]
    fn truncated_operator_two_level() {
        let m = ramp();
        let (h, dh) = (m.hamiltonian(0.3), m.derivative(0.3));
        let gap = m.gap(0.3).unwrap();
        let fit = TruncatedAgpFit {
            d: 1,
            alphas: vec![-1.0 / (gap * gap)],
            residual: 0.0,
        };
        let a = truncated_agp_operator(&h, &dh, &fit).unwrap();
        assert!(max_abs_diff(a.matrix(), m.exact_agp(0.3).unwrap().matrix()) < 1e-12);

        let zero = TruncatedAgpFit { d: 2, alphas: vec![0.0, 0.0], residual: 0.0 };
        assert_eq!(max_abs(truncated_agp_operator(&h, &dh, &zero).unwrap().matrix()), 0.0);
    }
}
