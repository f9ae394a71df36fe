mod common;

use common::{random_hermitian, rng};
use proptest::prelude::*;

use udcd::linalg::{commutator, expm_hermitian, hs_norm, max_abs_diff, unitarity_defect};
use udcd::spectral::{agp_distance, effective_generator, exact_agp};
use udcd::{spectral_function, standard_angles};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagator_inverse(seed in any::<u64>(), dim in 1usize..8, t in -5.0..5.0f64) {
        let h = random_hermitian(&mut rng(seed), dim, 2.0);
        let u = expm_hermitian(&h, t).unwrap();
        let v = expm_hermitian(&h, -t).unwrap();
        prop_assert!(unitarity_defect(u.matrix()) < 1e-12);
        let id = nalgebra::DMatrix::identity(dim, dim);
        prop_assert!(max_abs_diff(&(u.matrix() * v.matrix()), &id) < 1e-12);
    }

    #[test]
    fn commutator_is_antisymmetric(seed in any::<u64>(), dim in 1usize..8) {
        let mut r = rng(seed);
        let a = random_hermitian(&mut r, dim, 1.0);
        let b = random_hermitian(&mut r, dim, 1.0);
        let ab = commutator(&a, &b).unwrap();
        let ba = commutator(&b, &a).unwrap();
        prop_assert!(max_abs_diff(&ab, &(-ba)) < 1e-14);
    }

    #[test]
    fn hs_norm_is_unitarily_invariant(seed in any::<u64>(), dim in 1usize..8, t in -3.0..3.0f64) {
        let mut r = rng(seed);
        let m = random_hermitian(&mut r, dim, 1.0);
        let g = random_hermitian(&mut r, dim, 1.0);
        let u = expm_hermitian(&g, t).unwrap();
        let rotated = u.matrix() * m.matrix() * u.matrix().adjoint();
        let (a, b) = (hs_norm(m.matrix()), hs_norm(&rotated));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }

    #[test]
    fn distance_vanishes_only_at_the_exact_generator(seed in any::<u64>(), dim in 2usize..6, k in 1usize..12) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, dim, 2.0);
        let dh = random_hermitian(&mut r, dim, 1.0);
        let spec = spectral_function(&h, &dh, false).unwrap();
        let sched = standard_angles(k, 1.5 * spec.delta_max(), 1e-3).unwrap();
        let d = agp_distance(&spec, &sched).unwrap();
        let a = exact_agp(&h, &dh).unwrap();
        let v = effective_generator(&h, &dh, &sched).unwrap();
        prop_assert!(d >= 0.0);
        let direct = hs_norm(&(a.matrix() - v.matrix())).powi(2);
        prop_assert!((d - direct).abs() <= 1e-8 * direct.max(1e-300));
    }
}
