//! Batch checks of the second Bianchi operators and their divergences.

use std::f64::consts::PI;

use serde::Serialize;

use super::adjoint::{verify_first_order_adjoint, verify_hessian_adjoint};
use super::quadrature::QuadratureAtlas;
use crate::error::Result;
use crate::geometry::{bianchi_d, bianchi_d_tilde, delta_ops, FirstOrder, FormField, Manifold};

/// Pointwise residual bound for operators applied to parallel or
/// divergence-free fields.
pub const OPERATOR_TOL: f64 = 1e-6;
/// Relative bound for the `L²` adjointness pairings.
pub const ADJOINT_TOL: f64 = 1e-5;

/// Worst residual of one operator identity over a set of manifolds and points.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorCheck {
    pub name: &'static str,
    pub anchor: &'static str,
    /// Manifolds (and orders) the identity was evaluated on.
    pub settings: Vec<String>,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OperatorCheck {
    fn new(name: &'static str, anchor: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            anchor,
            settings: Vec::new(),
            cases: 0,
            max_residual: 0.0,
            tolerance,
            pass: false,
        }
    }

    fn record(&mut self, residual: f64) {
        self.cases += 1;
        if residual.is_nan() || residual > self.max_residual {
            self.max_residual = residual;
        }
    }

    fn finish(mut self) -> Self {
        self.pass = self.cases > 0 && self.max_residual <= self.tolerance;
        self
    }
}

/// Interior sample points of a manifold chart.
fn sample_points(m: &Manifold) -> Vec<Vec<f64>> {
    [0.0, 0.41, 0.77]
        .iter()
        .map(|&shift| {
            m.domain()
                .axes
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    a.lo + (0.23 + 0.11 * i as f64 + shift).fract().clamp(0.1, 0.9) * (a.hi - a.lo)
                })
                .collect()
        })
        .collect()
}

fn curved_cases() -> Vec<Manifold> {
    vec![
        Manifold::product(
            &Manifold::sphere(2, 1.0),
            &Manifold::flat_torus(&[6.0, 7.0]),
        ),
        Manifold::perturbed_sphere(3, 1.0, 0.3, 5),
        Manifold::conformal_flat(4, 0.3, 2),
        Manifold::perturbed_sphere(4, 1.0, 0.3, 4),
    ]
}

fn metric_is_closed() -> Result<OperatorCheck> {
    let mut check = OperatorCheck::new(
        "D and D̃ annihilate the metric",
        "D g = D̃ g = 0",
        OPERATOR_TOL,
    );
    for m in curved_cases() {
        let chart = m.chart();
        let g = FormField::metric(m.dim());
        for x in sample_points(&m) {
            check.record(
                bianchi_d(&chart, &g, &x)?
                    .max_abs()
                    .max(bianchi_d_tilde(&chart, &g, &x)?.max_abs()),
            );
        }
        check.settings.push(m.name().to_string());
    }
    Ok(check.finish())
}

fn second_bianchi() -> Result<OperatorCheck> {
    let mut check = OperatorCheck::new("second Bianchi identity", "D R = D̃ R = 0", OPERATOR_TOL);
    for m in curved_cases() {
        let chart = m.chart();
        let r = FormField::riemann(m.dim());
        for x in sample_points(&m) {
            check.record(
                bianchi_d(&chart, &r, &x)?
                    .max_abs()
                    .max(bianchi_d_tilde(&chart, &r, &x)?.max_abs()),
            );
        }
        check.settings.push(m.name().to_string());
    }
    Ok(check.finish())
}

fn lovelock_divergence() -> Result<OperatorCheck> {
    let mut check = OperatorCheck::new(
        "Einstein–Lovelock tensor is divergence free",
        "δ T_2k = 0",
        OPERATOR_TOL,
    );
    let cases = [
        (
            Manifold::product(&Manifold::sphere(2, 1.0), &Manifold::sphere(2, 1.5)),
            1,
        ),
        (Manifold::perturbed_sphere(4, 1.0, 0.3, 4), 1),
        (Manifold::conformal_flat(5, 0.3, 3), 1),
        (Manifold::conformal_flat(5, 0.3, 3), 2),
        (Manifold::perturbed_sphere(5, 1.0, 0.3, 4), 2),
    ];
    for (m, k) in cases {
        let chart = m.chart();
        let field = FormField::lovelock(m.dim(), k);
        for x in sample_points(&m) {
            let ops = delta_ops(&chart, &field, &x)?;
            check.record(ops.delta.map_or(f64::NAN, |d| d.max_abs()));
        }
        check.settings.push(format!("{} k={k}", m.name()));
    }
    Ok(check.finish())
}

fn delta_routes() -> Result<OperatorCheck> {
    let mut check = OperatorCheck::new(
        "divergence by definition and by star conjugation",
        "cD̃ω + D̃cω = ±*D*ω",
        OPERATOR_TOL,
    );
    for n in 2..=4usize {
        let m = Manifold::flat_torus(&vec![2.0 * PI; n]);
        let chart = m.chart();
        let x: Vec<f64> = (0..n).map(|i| 0.3 + i as f64).collect();
        for p in 0..=n {
            for q in 0..=n {
                check.record(
                    delta_ops(&chart, &FormField::random_trig(n, p, q, 3), &x)?.route_gap(),
                );
            }
        }
        check.settings.push(format!("{} all bidegrees", m.name()));
    }
    let m = Manifold::perturbed_sphere(3, 1.0, 0.3, 1);
    let chart = m.chart();
    let field = FormField::riemann(3).add(
        &FormField::symmetric(m.random_symmetric_field(1.0, 3)).wedge(&FormField::metric(3))?,
    )?;
    for x in sample_points(&m) {
        check.record(delta_ops(&chart, &field, &x)?.route_gap());
    }
    check.settings.push(m.name().to_string());
    Ok(check.finish())
}

fn adjointness() -> Result<(OperatorCheck, OperatorCheck)> {
    let mut first = OperatorCheck::new(
        "L² adjointness of D and δ",
        "⟨Dω₁, ω₂⟩ = −⟨ω₁, δω₂⟩, ⟨D̃ω₁, ω₂⟩ = −⟨ω₁, δ̃ω₂⟩",
        ADJOINT_TOL,
    );
    let mut second = OperatorCheck::new(
        "L² adjointness of the second-order operators",
        "⟨(DD̃ + D̃D)ω₁, ω₂⟩ = ⟨ω₁, (δ̃δ + δδ̃)ω₂⟩",
        ADJOINT_TOL,
    );
    for n in 2..=3usize {
        let m = Manifold::flat_torus(&vec![2.0 * PI; n]);
        let atlas = QuadratureAtlas::new(m.chart(), 4)?;
        let mut seed = 10 * n as u64;
        for p in 0..=n {
            for q in 0..=n {
                seed += 1;
                let w1 = FormField::random_trig(n, p, q, seed);
                for (tilde, op) in [(false, FirstOrder::D), (true, FirstOrder::DTilde)] {
                    let Some((pp, qq)) = op.image(n, p, q) else {
                        continue;
                    };
                    let noise = FormField::random_trig(n, pp, qq, seed + 1000);
                    let w2 = op.field(atlas.chart(), &w1)?.add(&noise)?;
                    first.record(
                        verify_first_order_adjoint(&atlas, tilde, &w1, &w2, ADJOINT_TOL)?.rel_err,
                    );
                }
                if p < n && q < n {
                    let w2 = FormField::random_trig(n, p + 1, q + 1, seed + 2000);
                    second.record(verify_hessian_adjoint(&atlas, &w1, &w2, ADJOINT_TOL)?.rel_err);
                }
            }
        }
        first.settings.push(format!("{} order 4", m.name()));
        second.settings.push(format!("{} order 4", m.name()));
    }
    Ok((first.finish(), second.finish()))
}

/// Every operator identity, in a fixed order.
pub fn operator_suite() -> Result<Vec<OperatorCheck>> {
    let (first, second) = adjointness()?;
    Ok(vec![
        metric_is_closed()?,
        second_bianchi()?,
        lovelock_divergence()?,
        delta_routes()?,
        first,
        second,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes() {
        for check in operator_suite().unwrap() {
            assert!(check.pass, "{check:?}");
        }
    }
}
