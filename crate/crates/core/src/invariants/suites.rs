//! Seeded batch checks over random Bianchi structures and catalog curvatures.

use serde::Serialize;

use super::{einstein_deviation, gauss_bonnet_routes, lovelock_routes, trace};
use crate::double_forms::{
    primitive_decompose, CurvatureStructure, DoubleForm, IdentityCheck, Tally,
};
use crate::error::Result;
use crate::geometry::{AxisKind, CatalogSpec};
use crate::sampling::{random_bianchi, Seeds};

/// Catalog manifolds whose pointwise curvatures feed the identity suite.
pub fn catalog_samples(n: usize) -> Vec<CatalogSpec> {
    let sphere = |n, r| CatalogSpec::Sphere { n, r };
    let torus = |n: usize| CatalogSpec::FlatTorus {
        periods: (0..n).map(|i| 5.0 + i as f64).collect(),
    };
    let product = |a, b| CatalogSpec::Product {
        first: Box::new(a),
        second: Box::new(b),
    };
    let mut specs = vec![
        torus(n),
        sphere(n, 1.0),
        sphere(n, 0.7),
        CatalogSpec::PerturbedSphere {
            n,
            r: 1.0,
            amplitude: 0.3,
            seed: 4,
        },
        CatalogSpec::ConformalFlat {
            n,
            amplitude: 0.3,
            seed: 5,
        },
    ];
    if n >= 4 {
        specs.push(product(sphere(2, 1.0), sphere(n - 2, 1.3)));
    }
    if n >= 5 {
        specs.push(product(sphere(3, 1.0), torus(n - 3)));
    }
    specs
}

/// Curvature tensors of `spec` at a few fixed interior points.
pub fn catalog_curvatures(spec: &CatalogSpec) -> Result<Vec<CurvatureStructure>> {
    let manifold = spec.build()?;
    let chart = manifold.chart();
    [0.31, 0.57, 0.83]
        .iter()
        .map(|&frac| {
            let x: Vec<f64> = manifold
                .domain()
                .axes
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let s = match a.kind {
                        AxisKind::Interval => (frac + 0.07 * i as f64).fract().clamp(0.1, 0.9),
                        AxisKind::Periodic => (frac + 0.13 * i as f64).fract(),
                    };
                    a.lo + s * (a.hi - a.lo)
                })
                .collect();
            chart.point(&x)?.riemann()
        })
        .collect()
}

/// Dual-route agreement for `h_2k` and `T_2k`, the trace identity and the
/// vanishing of `T_n`, over `samples` random Bianchi structures and all
/// catalog curvatures in dimension `n`.
pub fn curvature_identity_suite(n: usize, samples: usize, seed: u64) -> Result<Vec<IdentityCheck>> {
    let mut h_routes = Tally::new(
        "h_2k dual routes",
        "*(g^{n−2k}R^k)/(n−2k)! = c^{2k}R^k/(2k)!",
    );
    let mut t_routes = Tally::new(
        "T_2k dual routes",
        "*(g^{n−2k−1}R^k)/(n−2k−1)! = h_2k g − c^{2k−1}R^k/(2k−1)!",
    );
    let mut trace_identity = Tally::new("trace of T_2k", "tr T_2k = (n−2k) h_2k");
    let mut top_order = Tally::new(
        "top-order Lovelock tensor",
        "h_n g − c^{n−1}R^{n/2}/(n−1)! = 0",
    );
    let seeds = Seeds::new(seed)
        .child("curvature_identities")
        .index(n as u64);
    let mut structures: Vec<CurvatureStructure> = (0..samples)
        .map(|i| random_bianchi(&mut seeds.index(i as u64).rng(), n, 2))
        .collect();
    for spec in catalog_samples(n) {
        structures.extend(catalog_curvatures(&spec)?);
    }
    for r in &structures {
        for k in 1..=n / 2 {
            let scale = r.form().norm().powi(k as i32);
            let (a, b) = gauss_bonnet_routes(r, k)?;
            h_routes.scalars_against(a, b, scale);
            let (star, contraction) = lovelock_routes(r, k)?;
            if 2 * k == n {
                top_order.forms_against(&contraction, &DoubleForm::zero(n, 1, 1), scale);
            } else {
                t_routes.forms_against(&star, &contraction, scale);
            }
            trace_identity.scalars_against(trace(&contraction), (n - 2 * k) as f64 * b, scale);
        }
    }
    Ok([h_routes, t_routes, trace_identity, top_order]
        .into_iter()
        .map(|t| t.finish(n))
        .filter(|c| c.cases > 0)
        .collect())
}

/// Outcome of the two-sided test that `T_2k ∝ g` exactly when the traceless
/// `(1,1)` part of `R^k` vanishes.
#[derive(Debug, Clone, Serialize)]
pub struct EinsteinEquivalenceReport {
    pub n: usize,
    pub k: usize,
    /// Structures built with the `(1,1)` traceless part of `R` removed.
    pub einstein_samples: usize,
    /// Unmodified random Bianchi structures.
    pub generic_samples: usize,
    /// Samples where both tests agreed.
    pub agreements: usize,
    /// Einstein-built samples recognized as Einstein by both tests.
    pub einstein_detected: usize,
    /// Generic samples rejected by both tests.
    pub generic_rejected: usize,
    /// Smallest ratio of residual to threshold over generic samples, for both tests.
    pub generic_margin: f64,
    /// Largest ratio of residual to threshold over Einstein-built samples.
    pub einstein_margin: f64,
    pub pass: bool,
}

/// Runs the equivalence on `samples` Einstein-built and `samples` generic
/// structures. Einstein samples keep only the scalar and fully traceless
/// parts of a random Bianchi structure, so `k = 1` is the only order for
/// which they are Einstein by construction.
pub fn einstein_equivalence_suite(
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<EinsteinEquivalenceReport> {
    let k = 1;
    let seeds = Seeds::new(seed)
        .child("einstein_equivalence")
        .index(n as u64);
    let mut report = EinsteinEquivalenceReport {
        n,
        k,
        einstein_samples: samples,
        generic_samples: samples,
        agreements: 0,
        einstein_detected: 0,
        generic_rejected: 0,
        generic_margin: f64::INFINITY,
        einstein_margin: 0.0,
        pass: false,
    };
    for i in 0..samples {
        let mut rng = seeds.index(i as u64).rng();
        let generic = random_bianchi(&mut rng, n, 2);
        let parts = primitive_decompose(&generic)?;
        let einstein = CurvatureStructure::checked(&parts.summand(0)? + &parts.summand(2)?)?;
        for (r, einstein_built) in [(einstein, true), (generic, false)] {
            let d = einstein_deviation(&r, k)?;
            let omega1 = d.omega1.expect("n >= 4k for k = 1 and n >= 4");
            let by_tensor = d.is_einstein();
            let by_component = omega1 <= d.threshold;
            if by_tensor == by_component {
                report.agreements += 1;
            }
            let worst = (d.residual / d.threshold).max(omega1 / d.threshold);
            let best = (d.residual / d.threshold).min(omega1 / d.threshold);
            if einstein_built {
                report.einstein_margin = report.einstein_margin.max(worst);
                report.einstein_detected += usize::from(by_tensor && by_component);
            } else {
                report.generic_margin = report.generic_margin.min(best);
                report.generic_rejected += usize::from(!by_tensor && !by_component);
            }
        }
    }
    report.pass = samples > 0
        && report.agreements == 2 * samples
        && report.einstein_detected == samples
        && report.generic_rejected == samples;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_suite_small_dimensions() {
        for n in 2..=5 {
            let checks = curvature_identity_suite(n, 4, 2).unwrap();
            let expected = if n % 2 == 1 || n == 2 { 3 } else { 4 };
            assert_eq!(checks.len(), expected);
            for c in checks {
                assert!(c.pass, "{c:?}");
            }
        }
    }

    #[test]
    fn equivalence_in_dimension_five() {
        let r = einstein_equivalence_suite(5, 6, 3).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.generic_margin > 1e3 && r.einstein_margin < 1.0);
    }
}
