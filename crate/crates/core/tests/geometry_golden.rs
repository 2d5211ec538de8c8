use gbc_core::double_forms::sectional_value;
use gbc_core::geometry::{FormField, Manifold};
use gbc_core::invariants::{gauss_bonnet_curvature, pq_curvature_tensor};
use gbc_core::sampling::Seeds;
use rand::Rng;

fn random_plane(rng: &mut impl Rng, n: usize) -> Vec<Vec<f64>> {
    (0..2)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

#[test]
fn two_sphere_curvature_sign_and_scale() {
    for r in [1.0, 0.5, 2.0] {
        let chart = Manifold::sphere(2, r).chart();
        for x in [[0.4, 1.0], [1.3, 4.0], [2.6, 0.2]] {
            let riem = chart.point(&x).unwrap().riemann().unwrap();
            let k = riem.form().eval_tuples(&[0, 1], &[0, 1]);
            assert!((k - 1.0 / (r * r)).abs() < 1e-10, "r={r}: {k}");
            assert!((gauss_bonnet_curvature(&riem, 1).unwrap() - 1.0 / (r * r)).abs() < 1e-10);
        }
    }
}

#[test]
fn schur_consistency_on_round_four_sphere() {
    let m = Manifold::sphere(4, 1.0);
    let chart = m.chart();
    let mut rng = Seeds::new(12).rng();
    let mut values = Vec::new();
    for x in [
        [0.7, 1.1, 2.0, 0.3],
        [1.5, 0.4, 1.9, 5.0],
        [2.2, 2.5, 0.9, 3.1],
    ] {
        let r = chart.point(&x).unwrap().riemann().unwrap();
        let s21 = pq_curvature_tensor(&r, 2, 1).unwrap();
        let here: Vec<f64> = (0..20)
            .map(|_| sectional_value(&s21, &random_plane(&mut rng, 4)).unwrap())
            .collect();
        let spread = here.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - here.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread <= 1e-10, "spread {spread}");
        values.push(here[0]);
    }
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread <= 1e-8, "{values:?}");
    // *(R)/0! on a unit 4-sphere: the (2,1)-curvature equals the sectional curvature 1.
    assert!((values[0] - 1.0).abs() < 1e-10);
}

#[test]
fn perturbed_sphere_is_not_schur_constant() {
    let m = Manifold::perturbed_sphere(4, 1.0, 0.3, 2);
    let r = m
        .chart()
        .point(&[0.7, 1.1, 2.0, 0.3])
        .unwrap()
        .riemann()
        .unwrap();
    let s21 = pq_curvature_tensor(&r, 2, 1).unwrap();
    let mut rng = Seeds::new(13).rng();
    let values: Vec<f64> = (0..20)
        .map(|_| sectional_value(&s21, &random_plane(&mut rng, 4)).unwrap())
        .collect();
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread > 1e-3);
}

#[test]
fn lovelock_field_matches_pointwise_tensor() {
    let m = Manifold::conformal_flat(4, 0.3, 1);
    let chart = m.chart();
    let geom = chart.point(&[0.5, 1.5, 2.5, 3.5]).unwrap();
    let from_field = FormField::lovelock(4, 1).eval(&geom).unwrap();
    let direct = gbc_core::invariants::lovelock_tensor(&geom.riemann().unwrap(), 1).unwrap();
    assert!((from_field - direct.into_form()).max_abs() < 1e-12);
}
