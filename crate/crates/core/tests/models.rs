mod common;

use common::{dicke_isometry, lmg_full_space};
use udcd::drive::ground_spectrum;
use udcd::linalg::max_abs_diff;
use udcd::{eigendecompose, LmgModel, ParametrizedHamiltonian};

#[test]
fn lmg_matches_projected_qubit_hamiltonian() {
    for n in [1, 2, 3, 4, 5] {
        for (j, h) in [(-1.0, 1.0), (0.7, -0.3), (2.0, 0.0)] {
            let model = LmgModel::new(n, j, h).unwrap();
            let p = dicke_isometry(n);
            let projected = p.adjoint() * lmg_full_space(n, j, h) * &p;
            let dev = max_abs_diff(&projected, model.hamiltonian(1.0).matrix());
            assert!(dev < 1e-12, "N = {n}, J = {j}, h = {h}: {dev:e}");

            // ∂λH is the field term at unit slope.
            let field = lmg_full_space(n, 0.0, h);
            let dev = max_abs_diff(&(p.adjoint() * field * &p), model.derivative(0.4).matrix());
            assert!(dev < 1e-12, "derivative N = {n}: {dev:e}");
        }
    }
}

#[test]
fn symmetric_sector_is_invariant() {
    // The full-space Hamiltonian maps the Dicke span into itself.
    let n = 4;
    let p = dicke_isometry(n);
    let h = lmg_full_space(n, -1.0, 0.8);
    let hp = &h * &p;
    let back = &p * (p.adjoint() * &hp);
    assert!(max_abs_diff(&hp, &back) < 1e-12);
}

#[test]
fn lmg_ground_energy_matches_full_space() {
    // Ferromagnetic coupling puts the ground state in the maximal-spin sector.
    let n = 6;
    let full = lmg_full_space(n, -1.0, 1.0);
    let re = full.map(|z| z.re);
    let e_full = re.symmetric_eigen().eigenvalues.min();
    let model = LmgModel::new(n, -1.0, 1.0).unwrap();
    let e = eigendecompose(&model.hamiltonian(1.0)).unwrap().eigenvalues()[0];
    assert!((e - e_full).abs() < 1e-9, "{e} vs {e_full}");
}

#[test]
fn n10_ground_energy_against_nalgebra() {
    let model = LmgModel::new(10, -1.0, 1.0).unwrap();
    let h = model.hamiltonian(1.0);
    let ours = eigendecompose(&h).unwrap();
    let mut theirs: Vec<f64> = h.matrix().map(|z| z.re).symmetric_eigen().eigenvalues.iter().copied().collect();
    theirs.sort_by(f64::total_cmp);
    for (a, b) in ours.eigenvalues().iter().zip(&theirs) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn parity_removes_half_of_the_ground_lines() {
    // Sz² and Sx both commute with the spin flip, so only same-parity levels
    // couple to the ground state through ∂λH.
    for n in [4, 6, 10] {
        let model = LmgModel::new(n, -1.0, 1.0).unwrap();
        let spec = ground_spectrum(&model, 1.0).unwrap();
        let positive = spec.support().filter(|l| l.omega > 0.0).count();
        assert!(positive < n, "N = {n}: {positive} supported lines");
    }
}

#[test]
fn n10_spectral_width() {
    let model = LmgModel::new(10, -1.0, 1.0).unwrap();
    let spec = ground_spectrum(&model, 1.0).unwrap();
    let e = eigendecompose(&model.hamiltonian(1.0)).unwrap();
    let width = e.eigenvalues()[10] - e.eigenvalues()[0];
    assert!((spec.delta_max() - width).abs() < 1e-12);
    assert!(spec.support_max() < spec.delta_max());
    let gap2 = e.eigenvalues()[2] - e.eigenvalues()[0];
    assert!((spec.delta_min() - gap2).abs() < 1e-12);
}
