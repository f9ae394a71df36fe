mod common;

use common::{frobenius, pade_propagator, random_hermitian, rng, rotate};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use udcd::drive::{composite_unitary, generator_gap, ground_spectrum};
use udcd::linalg::{hs_norm, max_abs_diff};
use udcd::schedule::AnglePair;
use udcd::spectral::{
    agp_distance, effective_generator, exact_agp, fit_truncated_agp, truncated_agp_operator,
    truncated_distance,
};
use udcd::{spectral_function, standard_angles, AngleSchedule, LmgModel, ParametrizedHamiltonian};

/// Linear part of the composite product: `δλ V = Σ_{k≠0} (φ_k/2) e^{iθ_k H} ∂H e^{-iθ_k H}`.
fn linear_oracle(
    h: &udcd::HermitianOperator,
    dh: &udcd::HermitianOperator,
    sched: &AngleSchedule,
) -> DMatrix<Complex64> {
    let dim = h.dim();
    let mut acc = DMatrix::zeros(dim, dim);
    let k = sched.k() as i64;
    for i in (-k..=k).filter(|&i| i != 0) {
        let p = sched.pair(i).unwrap();
        acc += rotate(h, dh.matrix(), p.theta).scale(0.5 * p.phi);
    }
    acc.unscale(sched.delta_lambda())
}

#[test]
fn effective_generator_matches_first_order_series() {
    let mut r = rng(11);
    for trial in 0..20 {
        let dim = r.gen_range(2..=6);
        let h = random_hermitian(&mut r, dim, 2.0);
        let dh = random_hermitian(&mut r, dim, 1.0);
        let k = r.gen_range(1..=5);
        let omega = r.gen_range(2.0..12.0);
        let sched = standard_angles(k, omega, 1e-3).unwrap();
        let v = effective_generator(&h, &dh, &sched).unwrap();
        let oracle = linear_oracle(&h, &dh, &sched);
        let dev = max_abs_diff(v.matrix(), &oracle);
        assert!(dev < 1e-10, "trial {trial}: {dev:e}");
    }
}

#[test]
fn composite_unitary_matches_pade_product() {
    let mut r = rng(5);
    for _ in 0..10 {
        let dim = r.gen_range(2..=6);
        let h = random_hermitian(&mut r, dim, 2.0);
        let dh = random_hermitian(&mut r, dim, 1.0);
        let sched = standard_angles(r.gen_range(1..=4), 6.0, 0.05).unwrap();
        let mut oracle = DMatrix::<Complex64>::identity(dim, dim);
        let k = sched.k() as i64;
        for i in (-k..=k).filter(|&i| i != 0) {
            let p = sched.pair(i).unwrap();
            let factor = pade_propagator(&h, -p.theta)
                * pade_propagator(&dh, 0.5 * p.phi)
                * pade_propagator(&h, p.theta);
            oracle = factor * oracle;
        }
        let u = composite_unitary(&h, &dh, &sched).unwrap();
        assert!(max_abs_diff(u.matrix(), &oracle) < 1e-10);
    }
}

#[test]
fn lmg_series_with_small_kicks() {
    // Σ|φ| < 0.1: the composite unitary is exp(-iδλV) up to second order.
    let model = LmgModel::new(4, -1.0, 1.0).unwrap();
    let (h, dh) = (model.hamiltonian(1.0), model.derivative(1.0));
    let sched = standard_angles(3, 8.0, 1e-3).unwrap();
    let total: f64 = sched.pairs().iter().map(|p| 2.0 * p.phi.abs()).sum();
    assert!(total < 0.1);
    let v = effective_generator(&h, &dh, &sched).unwrap();
    assert!(max_abs_diff(v.matrix(), &linear_oracle(&h, &dh, &sched)) < 1e-10);
    let gap = generator_gap(&h, &dh, &sched).unwrap();
    let dh_norm = dh.operator_norm().unwrap();
    assert!(gap < (total * dh_norm).powi(2), "{gap:e}");
}

#[test]
fn distance_is_squared_generator_error() {
    let mut r = rng(23);
    for trial in 0..25 {
        let dim = r.gen_range(2..=6);
        let h = random_hermitian(&mut r, dim, 2.0);
        let dh = random_hermitian(&mut r, dim, 1.0);
        let spec = spectral_function(&h, &dh, false).unwrap();
        let sched = standard_angles(r.gen_range(1..=8), spec.delta_max() * r.gen_range(1.0..2.0), 1e-3)
            .unwrap();
        let d = agp_distance(&spec, &sched).unwrap();
        let a = exact_agp(&h, &dh).unwrap();
        let v = effective_generator(&h, &dh, &sched).unwrap();
        let oracle = frobenius(&(a.matrix() - v.matrix())).powi(2);
        assert!((d - oracle).abs() <= 1e-8 * oracle, "trial {trial}: {d} vs {oracle}");
    }
}

#[test]
fn truncated_fit_residual_is_operator_distance() {
    let model = LmgModel::new(4, -1.0, 1.0).unwrap();
    let (h, dh) = (model.hamiltonian(0.8), model.derivative(0.8));
    let spec = spectral_function(&h, &dh, false).unwrap();
    let a = exact_agp(&h, &dh).unwrap();
    for d in 1..=3 {
        let fit = fit_truncated_agp(&spec, d).unwrap();
        let op = truncated_agp_operator(&h, &dh, &fit).unwrap();
        let direct = hs_norm(&(a.matrix() - op.matrix())).powi(2);
        assert!((fit.residual - direct).abs() <= 1e-8 * (1.0 + direct), "d = {d}: {} vs {direct}", fit.residual);
        assert!((truncated_distance(&spec, &fit.alphas) - fit.residual).abs() <= 1e-10 * (1.0 + direct));
    }
    // More terms never fit worse.
    let r1 = fit_truncated_agp(&spec, 1).unwrap().residual;
    let r2 = fit_truncated_agp(&spec, 2).unwrap().residual;
    assert!(r2 <= r1);
}

#[test]
fn fit_is_least_squares_optimal() {
    let model = LmgModel::new(6, -1.0, 1.3).unwrap();
    let spec = ground_spectrum(&model, 1.3).unwrap();
    let fit = fit_truncated_agp(&spec, 2).unwrap();
    let mut r = rng(3);
    for _ in 0..50 {
        let perturbed: Vec<f64> = fit
            .alphas
            .iter()
            .map(|a| a * (1.0 + 1e-3 * r.gen_range(-1.0..1.0)))
            .collect();
        assert!(truncated_distance(&spec, &perturbed) >= fit.residual * (1.0 - 1e-12));
    }
}

#[test]
fn lmg_k4_beats_k8_in_distance() {
    let model = LmgModel::new(10, -1.0, 1.0).unwrap();
    let spec = ground_spectrum(&model, 1.0).unwrap();
    let omega = spec.delta_max();
    let d4 = agp_distance(&spec, &standard_angles(4, omega, 1e-3).unwrap()).unwrap();
    let d8 = agp_distance(&spec, &standard_angles(8, omega, 1e-3).unwrap()).unwrap();
    assert!(d4 < d8, "{d4} vs {d8}");
}

#[test]
fn custom_schedule_agp_distance_zero_only_when_exact() {
    let h = udcd::HermitianOperator::from_real(2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
    let dh = udcd::HermitianOperator::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
    let spec = spectral_function(&h, &dh, false).unwrap();
    let exact = AngleSchedule::two_level_exact(2.0, 1e-2).unwrap();
    assert!(agp_distance(&spec, &exact).unwrap() < 1e-24);
    let off = AngleSchedule::custom(
        4.0,
        1e-2,
        vec![AnglePair { theta: exact.pairs()[0].theta, phi: 0.9 * exact.pairs()[0].phi }],
    )
    .unwrap();
    assert!(agp_distance(&spec, &off).unwrap() > 1e-4);
}
