use gbc_core::double_forms::{
    f_h, fiber_identity_suite, first_bianchi_residual, primitive_decompose,
};
use gbc_core::invariants::{einstein_deviation, gauss_bonnet_routes, lovelock_routes, trace};
use gbc_core::sampling::{random_bianchi, random_form, random_symmetric, Seeds};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fiber_identities_hold(n in 2usize..=5, seed in any::<u64>()) {
        for check in fiber_identity_suite(n, 1, seed).unwrap() {
            prop_assert!(check.pass, "{:?}", check);
        }
    }

    #[test]
    fn double_star_and_inner_product(n in 1usize..=6, p in 0usize..=6, q in 0usize..=6, seed in any::<u64>()) {
        prop_assume!(p <= n && q <= n);
        let mut rng = Seeds::new(seed).rng();
        let w = random_form(&mut rng, n, p, q);
        let exponent = ((p + q) as i64) * (n as i64 - p as i64 - q as i64);
        let sign = if exponent.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        prop_assert!((w.hodge_star().hodge_star() - w.scaled(sign)).max_abs() < 1e-12);
        // The star is an isometry.
        prop_assert!((w.hodge_star().norm() - w.norm()).abs() < 1e-12 * w.norm().max(1.0));
    }

    #[test]
    fn dual_routes_and_trace(n in 2usize..=6, seed in any::<u64>()) {
        let r = random_bianchi(&mut Seeds::new(seed).rng(), n, 2);
        for k in 1..=n / 2 {
            let scale = r.form().norm().powi(k as i32).max(1.0);
            let (a, b) = gauss_bonnet_routes(&r, k).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * scale);
            let (star, contraction) = lovelock_routes(&r, k).unwrap();
            prop_assert!((&star - &contraction).max_abs() <= 1e-10 * scale);
            prop_assert!((trace(&contraction) - (n - 2 * k) as f64 * a).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn f_h_preserves_bianchi_and_symmetry(n in 3usize..=6, p in 2usize..=3, seed in any::<u64>()) {
        prop_assume!(p <= n);
        let mut rng = Seeds::new(seed).rng();
        let h = random_symmetric(&mut rng, n, 1);
        let w = random_bianchi(&mut rng, n, p);
        let fw = f_h(&h, w.form()).unwrap();
        prop_assert!(first_bianchi_residual(&fw) <= 1e-10 * fw.max_abs().max(1.0));
        prop_assert!(fw.asymmetry() <= 1e-12 * fw.max_abs().max(1.0));
    }

    #[test]
    fn primitive_components_are_traceless(n in 4usize..=6, seed in any::<u64>()) {
        let w = random_bianchi(&mut Seeds::new(seed).rng(), n, 2);
        let d = primitive_decompose(&w).unwrap();
        prop_assert!((d.reassemble().unwrap() - w.form().clone()).max_abs() <= 1e-10 * w.form().max_abs().max(1.0));
        prop_assert!(d.component(0).contract().unwrap().max_abs() <= 1e-10 * w.form().max_abs().max(1.0));
        prop_assert!(d.component(1).contract().unwrap().max_abs() <= 1e-10 * w.form().max_abs().max(1.0));
    }

    #[test]
    fn einstein_tests_agree(n in 4usize..=6, seed in any::<u64>(), remove in any::<bool>()) {
        let r = random_bianchi(&mut Seeds::new(seed).rng(), n, 2);
        let r = if remove {
            let d = primitive_decompose(&r).unwrap();
            gbc_core::CurvatureStructure::checked(&d.summand(0).unwrap() + &d.summand(2).unwrap()).unwrap()
        } else {
            r
        };
        let dev = einstein_deviation(&r, 1).unwrap();
        prop_assert_eq!(Some(dev.is_einstein()), dev.omega1_vanishes());
        prop_assert_eq!(dev.is_einstein(), remove);
    }
}
