use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::*;
use crate::double_forms::{
    first_bianchi_residual, sectional_value, CurvatureStructure, DoubleForm,
};
use crate::invariants::gauss_bonnet_curvature;
use crate::jet::Jet;

/// `e^{2u} δ` with `u = a·x` on a box.
#[derive(Debug)]
struct LinearConformal {
    a: Vec<f64>,
}

impl SymmetricField for LinearConformal {
    fn dim(&self) -> usize {
        self.a.len()
    }
    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        let n = self.a.len();
        let mut u = Jet::constant(x[0].dim(), 0.0);
        for (ai, xi) in self.a.iter().zip(x) {
            u.add_scaled(xi, *ai);
        }
        let e = u.scale(2.0).exp();
        (0..n * n)
            .map(|k| {
                if k / n == k % n {
                    e
                } else {
                    Jet::constant(x[0].dim(), 0.0)
                }
            })
            .collect()
    }
}

fn box_chart(field: Arc<dyn SymmetricField>) -> MetricChart {
    let n = field.dim();
    MetricChart::new(
        "box",
        ParamBox {
            axes: vec![Axis::interval(-1.0, 1.0); n],
        },
        field,
    )
    .unwrap()
}

/// Random trigonometric `(p,q)` field on a `2π`-periodic flat torus, given
/// in coordinates (which coincide with the frame there).
pub(crate) fn trig_form_field(n: usize, p: usize, q: usize, seed: u64) -> FormField {
    FormField::random_trig(n, p, q, seed)
}

fn sphere_point(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                0.9
            } else {
                0.8 + 0.37 * i as f64
            }
        })
        .collect()
}

#[test]
fn christoffel_of_flat_torus_vanishes() {
    let chart = Manifold::flat_torus(&[1.0, 2.0, 3.0]).chart();
    let gamma = christoffel(&chart, &[0.1, 0.5, 2.0]).unwrap();
    assert!(gamma.iter().flatten().flatten().all(|v| v.abs() < 1e-13));
}

#[test]
fn christoffel_of_round_two_sphere() {
    let chart = Manifold::sphere(2, 1.0).chart();
    let theta = PI / 3.0;
    let gamma = christoffel(&chart, &[theta, 1.0]).unwrap();
    assert!((gamma[0][1][1] + theta.sin() * theta.cos()).abs() < 1e-13);
    assert!((gamma[1][0][1] - theta.cos() / theta.sin()).abs() < 1e-13);
    assert!((gamma[0][1][1] + 0.4330127018922193).abs() < 1e-12);
    // Central-difference derivative scheme agrees.
    let fd = chart.with_scheme(DerivativeScheme::CentralDifference(
        StepRule::second_order_default(),
    ));
    let gamma_fd = christoffel(&fd, &[theta, 1.0]).unwrap();
    assert!((gamma_fd[0][1][1] - gamma[0][1][1]).abs() < 1e-9);
}

#[test]
fn christoffel_of_conformal_metric() {
    let a = vec![0.3, -0.2, 0.5];
    let chart = box_chart(Arc::new(LinearConformal { a: a.clone() }));
    let gamma = christoffel(&chart, &[0.1, 0.2, -0.3]).unwrap();
    let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let expected = d(k, i) * a[j] + d(k, j) * a[i] - d(i, j) * a[k];
                assert!((gamma[k][i][j] - expected).abs() < 1e-13);
            }
        }
    }
}

#[test]
fn round_sphere_curvature_is_constant() {
    for (n, r) in [(2, 1.0), (3, 1.0), (3, 2.0), (5, 1.3)] {
        let chart = Manifold::sphere(n, r).chart();
        let rm = riemann(&chart, &sphere_point(n)).unwrap();
        let expected = CurvatureStructure::constant_curvature(n, 1.0 / (r * r));
        assert!(
            (rm.form() - expected.form()).max_abs() < 1e-8,
            "n={n} r={r}"
        );
    }
}

#[test]
fn flat_and_product_curvatures() {
    let torus = Manifold::flat_torus(&[1.0, 1.5, 2.0]).chart();
    assert!(riemann(&torus, &[0.1, 0.2, 0.3]).unwrap().form().max_abs() < 1e-12);

    let s2 = Manifold::sphere(2, 1.0);
    let chart = Manifold::product(&s2, &s2).chart();
    let rm = riemann(&chart, &[0.9, 1.0, 1.3, 4.0]).unwrap();
    let e = |i: usize| {
        (0..4)
            .map(|k| if k == i { 1.0 } else { 0.0 })
            .collect::<Vec<f64>>()
    };
    for (a, b) in [(0, 2), (0, 3), (1, 2), (1, 3)] {
        assert!(sectional_value(&rm, &[e(a), e(b)]).unwrap().abs() < 1e-12);
    }
    assert!((sectional_value(&rm, &[e(0), e(1)]).unwrap() - 1.0).abs() < 1e-10);
}

#[test]
fn curvature_satisfies_first_bianchi_identity() {
    for m in [
        Manifold::perturbed_sphere(4, 1.0, 0.2, 3),
        Manifold::conformal_flat(3, 0.3, 1),
    ] {
        let chart = m.chart();
        let rm = riemann(&chart, &sphere_point(m.dim())).unwrap();
        assert!(first_bianchi_residual(rm.form()) < 1e-10);
        assert!(rm.form().max_abs() > 1e-3);
    }
}

#[test]
fn scalar_invariants_do_not_depend_on_frame_order() {
    let m = Manifold::perturbed_sphere(4, 1.0, 0.3, 9);
    let x = sphere_point(4);
    let reference = riemann(&m.chart(), &x).unwrap();
    let (h2, h4, norm) = (
        gauss_bonnet_curvature(&reference, 1).unwrap(),
        gauss_bonnet_curvature(&reference, 2).unwrap(),
        reference.form().norm(),
    );
    for order in [vec![3, 2, 1, 0], vec![1, 3, 0, 2], vec![2, 0, 3, 1]] {
        let chart = m.chart().with_frame_order(order).unwrap();
        let rm = riemann(&chart, &x).unwrap();
        assert!((gauss_bonnet_curvature(&rm, 1).unwrap() - h2).abs() < 1e-9);
        assert!((gauss_bonnet_curvature(&rm, 2).unwrap() - h4).abs() < 1e-9);
        assert!((rm.form().norm() - norm).abs() < 1e-9);
    }
}

#[test]
fn metric_is_parallel() {
    let chart = Manifold::perturbed_sphere(3, 1.0, 0.3, 2).chart();
    let nabla = covariant_derivative(&chart, &FormField::metric(3), &sphere_point(3)).unwrap();
    assert!(nabla.max_abs() < 1e-8);
    let d = bianchi_d(&chart, &FormField::metric(3), &sphere_point(3)).unwrap();
    assert!(d.max_abs() < 1e-8);
}

#[test]
fn sphere_curvature_is_parallel() {
    let chart = Manifold::sphere(4, 1.0).chart();
    let nabla = covariant_derivative(&chart, &FormField::riemann(4), &sphere_point(4)).unwrap();
    assert!(nabla.max_abs() < 1e-6, "{}", nabla.max_abs());
}

#[test]
fn second_bianchi_identity() {
    let cases = [
        Manifold::product(
            &Manifold::sphere(2, 1.0),
            &Manifold::flat_torus(&[1.0, 1.0]),
        ),
        Manifold::perturbed_sphere(3, 1.0, 0.3, 5),
        Manifold::conformal_flat(4, 0.3, 2),
    ];
    for (i, m) in cases.iter().enumerate() {
        let chart = m.chart();
        let x = sphere_point(m.dim());
        let field = FormField::riemann(m.dim());
        let d = bianchi_d(&chart, &field, &x).unwrap();
        let dt = bianchi_d_tilde(&chart, &field, &x).unwrap();
        assert!(d.max_abs() < 1e-6, "{}: {}", m.name(), d.max_abs());
        assert!(dt.max_abs() < 1e-6);
        // The product is locally symmetric; the others have ∇R ≠ 0.
        let nabla = covariant_derivative(&chart, &field, &x).unwrap().max_abs();
        if i == 0 {
            assert!(nabla < 1e-6);
        } else {
            assert!(nabla > 1e-3);
        }
    }
}

#[test]
fn d_on_one_forms_is_minus_exterior_derivative() {
    let n = 3;
    let chart = Manifold::flat_torus(&[2.0 * PI; 3]).chart();
    let f = |x: &[f64]| (x[1]).sin() * (2.0 * x[2]).cos() + x[0].cos();
    let field = FormField::from_coordinates(n, 1, 0, move |x| {
        DoubleForm::from_coeffs(n, 1, 0, vec![f(x), 0.0, 0.0]).unwrap()
    });
    let x = [0.4, 1.1, 2.3];
    let d = bianchi_d(&chart, &field, &x).unwrap();
    // d(f dx¹) = ∂₂f dx²∧dx¹ + ∂₃f dx³∧dx¹
    let d2f = x[1].cos() * (2.0 * x[2]).cos();
    let d3f = -2.0 * x[1].sin() * (2.0 * x[2]).sin();
    let expected = DoubleForm::from_coeffs(n, 2, 0, vec![d2f, d3f, 0.0]).unwrap();
    assert!((&d - &expected).max_abs() < 1e-9, "{}", d.dump());
}

#[test]
fn hessian_of_a_function_on_the_flat_torus() {
    let n = 2;
    let chart = Manifold::flat_torus(&[2.0 * PI; 2]).chart();
    let field = FormField::from_coordinates(n, 0, 0, |x| DoubleForm::scalar(2, x[0].cos()));
    let x = [0.7, 0.2];
    let h = d_d_tilde(&chart, &field, &x).unwrap();
    assert!((h.coeffs()[0] + x[0].cos()).abs() < 1e-8);
    assert!(h.coeffs()[1].abs() < 1e-8 && h.coeffs()[3].abs() < 1e-8);
    let constant = FormField::constant(DoubleForm::metric(2).scaled(3.0));
    assert!(hessian_operator(&chart, &constant, &x).unwrap().max_abs() < 1e-9);
}

#[test]
fn hessian_operator_matches_second_derivative_expansion() {
    let n = 3;
    let chart = Manifold::flat_torus(&[2.0 * PI; 3]).chart();
    let field = trig_form_field(n, 1, 1, 4).map(1, 1, |w| Ok(w.symmetrized()));
    let x = [0.3, 2.0, 5.1];
    let second = second_covariant_derivative(&chart, &field, &x).unwrap();
    let ddt = d_d_tilde_from_second(&second);
    let h = |a: usize, b: usize, c: usize, d: usize| second.get(a, b).eval_tuples(&[c], &[d]);
    for (x1, y1) in [(0, 1), (0, 2), (1, 2)] {
        for (z, u) in [(0, 1), (0, 2), (1, 2)] {
            let expected = h(x1, z, y1, u) - h(x1, u, y1, z) - h(y1, z, x1, u) + h(y1, u, x1, z);
            assert!((ddt.eval_tuples(&[x1, y1], &[z, u]) - expected).abs() < 1e-12);
        }
    }
    let total = hessian_operator(&chart, &field, &x).unwrap();
    assert!(total.asymmetry() < 1e-6);
    // D̃D is the transpose of DD̃ on symmetric fields.
    let dtd = d_tilde_d_from_second(&second);
    assert!((&dtd - &ddt.transpose()).max_abs() < 1e-6);
}

#[test]
fn delta_routes_agree() {
    let chart = Manifold::flat_torus(&[2.0 * PI; 3]).chart();
    let x = [0.3, 2.0, 5.1];
    for (p, q) in [(1, 1), (1, 0), (2, 1), (1, 2), (2, 2), (3, 1)] {
        let field = trig_form_field(3, p, q, 11 + p as u64);
        let ops = delta_ops(&chart, &field, &x).unwrap();
        assert!(
            ops.route_gap() < 1e-6,
            "(p,q)=({p},{q}) gap {}",
            ops.route_gap()
        );
        assert!(ops.delta.as_ref().unwrap().max_abs() > 1e-2);
    }
    // A curved chart, where the frame rotates from point to point.
    let chart = Manifold::perturbed_sphere(3, 1.0, 0.3, 1).chart();
    let field = FormField::riemann(3)
        .wedge(&FormField::metric(3))
        .unwrap()
        .map(2, 2, |w| Ok(w.contract()?.scaled(0.5)))
        .add(
            &FormField::symmetric(Manifold::sphere(3, 1.0).random_symmetric_field(1.0, 3))
                .wedge(&FormField::metric(3))
                .unwrap(),
        )
        .unwrap();
    let ops = delta_ops(&chart, &field, &sphere_point(3)).unwrap();
    assert!(ops.route_gap() < 1e-6, "curved gap {}", ops.route_gap());
    let constant = FormField::constant(DoubleForm::metric(3));
    let flat = Manifold::flat_torus(&[1.0; 3]).chart();
    assert!(
        delta_ops(&flat, &constant, &[0.1, 0.2, 0.3])
            .unwrap()
            .delta
            .unwrap()
            .max_abs()
            < 1e-10
    );
}

#[test]
fn lovelock_tensor_is_divergence_free() {
    let s2 = Manifold::sphere(2, 1.0);
    let cases = [
        (Manifold::product(&s2, &Manifold::sphere(2, 1.5)), 1),
        (Manifold::perturbed_sphere(4, 1.0, 0.3, 4), 1),
        (Manifold::perturbed_sphere(5, 1.0, 0.3, 4), 2),
    ];
    for (m, k) in cases {
        let chart = m.chart();
        let ops = delta_ops(
            &chart,
            &FormField::lovelock(m.dim(), k),
            &sphere_point(m.dim()),
        )
        .unwrap();
        let delta = ops.delta.unwrap();
        assert!(
            delta.max_abs() < 1e-6,
            "{} k={k}: {}",
            m.name(),
            delta.max_abs()
        );
    }
}

#[test]
fn star_of_metric_power_times_curvature_is_divergence_free() {
    let m = Manifold::perturbed_sphere(4, 1.0, 0.3, 8);
    let chart = m.chart();
    let field = FormField::metric_power(4, 1)
        .wedge(&FormField::riemann(4))
        .unwrap()
        .hodge_star();
    let delta = delta_ops(&chart, &field, &sphere_point(4))
        .unwrap()
        .delta
        .unwrap();
    assert!(delta.max_abs() < 1e-6, "{}", delta.max_abs());
}

#[test]
fn symmetric_field_frame_conversion() {
    let m = Manifold::perturbed_sphere(3, 1.0, 0.2, 1);
    let chart = m.chart();
    let x = sphere_point(3);
    let geom = chart.point(&x).unwrap();
    let g = FormField::symmetric(m.metric_field()).eval(&geom).unwrap();
    assert!((g - DoubleForm::metric(3)).max_abs() < 1e-12);
    let e = geom.frame();
    assert!((e.transpose() * geom.metric() * e - DMatrix::identity(3, 3)).amax() < 1e-12);
}

#[test]
fn delta_routes_agree_for_every_bidegree() {
    for n in 2..=4usize {
        let chart = Manifold::flat_torus(&vec![2.0 * PI; n]).chart();
        let x: Vec<f64> = (0..n).map(|i| 0.3 + i as f64).collect();
        for p in 0..=n {
            for q in 0..=n {
                let ops = delta_ops(&chart, &trig_form_field(n, p, q, 3), &x).unwrap();
                assert_eq!(ops.delta.is_some(), p >= 1);
                assert_eq!(ops.delta_tilde.is_some(), q >= 1);
                assert!(
                    ops.route_gap() < 1e-9,
                    "n={n} p={p} q={q}: {}",
                    ops.route_gap()
                );
            }
        }
    }
}
