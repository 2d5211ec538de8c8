//! Dispatch from a validated manifest to the library.

use std::f64::consts::PI;
use std::time::Instant;

use gbc_core::double_forms::{fiber_identity_suite, FIBER_TOL};
use gbc_core::geometry::{CatalogSpec, Manifold};
use gbc_core::invariants::{
    catalog_curvatures, curvature_identity_suite, einstein_equivalence_suite,
    gauss_bonnet_curvature, gauss_bonnet_routes, lovelock_routes, trace, DUAL_ROUTE_TOL,
};
use gbc_core::variation::{
    default_order, divergence_check, einstein_case, einstein_examples_suite,
    first_variation_report, gauss_bonnet_order, integrate_invariant, variation_integrals,
    verify_gb_invariance, volume_derivative_check, DirectionSpec, Expectation, FdSteps,
    MetricDeformation, QuadratureAtlas, FIRST_VARIATION_TOL,
};
use gbc_core::{CurvatureStructure, Result};

use crate::manifest::{Manifest, Operation};
use crate::report::{Record, RunReport};

/// Relative tolerance for integrals with a closed form.
const CLOSED_FORM_TOL: f64 = 1e-6;
/// Relative tolerance for the volume-derivative bookkeeping.
const VOLUME_TOL: f64 = 1e-6;
const EINSTEIN_TOL: f64 = 1e-8;
const EINSTEIN_GRID: usize = 3;
const DEFAULT_TRIALS: usize = 100;
const DEFAULT_EQUIVALENCE_SAMPLES: usize = 50;
const DEFAULT_GB_AMPLITUDE: f64 = 0.1;
const DEFAULT_PERTURBATIONS: usize = 2;

/// Turns a library error into a failed record instead of aborting the run.
fn guarded(name: &str, anchor: &str, f: impl FnOnce() -> Result<Vec<Record>>) -> Vec<Record> {
    f().unwrap_or_else(|e| vec![Record::failed(name, anchor, e)])
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// `vol(Sⁿ(r))` by the recursion `vol(Sⁿ) = 2π/(n−1) vol(Sⁿ⁻²)`.
fn sphere_volume(n: usize, r: f64) -> f64 {
    let unit = if n.is_multiple_of(2) {
        (1..=n / 2).fold(2.0, |v, m| v * 2.0 * PI / (2 * m - 1) as f64)
    } else {
        (1..=n / 2).fold(2.0 * PI, |v, m| v * 2.0 * PI / (2 * m) as f64)
    };
    unit * r.powi(n as i32)
}

pub fn run(manifest: Manifest) -> RunReport {
    let start = Instant::now();
    let records = match manifest.operation {
        Operation::Invariants => invariants(&manifest),
        Operation::VerifyIdentities => verify_identities(&manifest),
        Operation::Variation => variation(&manifest),
        Operation::GaussBonnet => gauss_bonnet(&manifest),
        Operation::Einstein => einstein(&manifest),
    };
    RunReport::new(manifest, records, start.elapsed().as_secs_f64())
}

fn manifold(manifest: &Manifest) -> Result<(CatalogSpec, Manifold)> {
    let spec = manifest
        .manifold
        .clone()
        .expect("validated manifest has a manifold");
    let m = spec.build()?;
    Ok((spec, m))
}

fn invariants(manifest: &Manifest) -> Vec<Record> {
    let tol = manifest
        .numeric
        .tolerances
        .identity
        .unwrap_or(DUAL_ROUTE_TOL);
    let mut records = Vec::new();
    for &k in &manifest.k {
        let name = format!("H_{} integral", 2 * k);
        records.extend(guarded(&name, "H_2k(g) = ∫ h_2k μ_g", || {
            let (spec, m) = manifold(manifest)?;
            let order = manifest
                .numeric
                .quad_order
                .unwrap_or_else(|| default_order(m.dim()));
            let atlas = QuadratureAtlas::new(m.chart(), order)?;
            let value = integrate_invariant(&atlas, k)?;
            let mut rec = Record::new(&name, "H_2k(g) = ∫ h_2k μ_g")
                .value("k", k)
                .value("value", value)
                .value("volume", atlas.volume()?)
                .value("quadrature_order", order)
                .value("nodes", atlas.len());
            rec.pass = value.is_finite();
            if let CatalogSpec::Sphere { n, r } = spec {
                let h = gauss_bonnet_curvature(
                    &CurvatureStructure::constant_curvature(n, 1.0 / (r * r)),
                    k,
                )?;
                let expected = h * sphere_volume(n, r);
                let err = relative(value, expected);
                rec = rec
                    .value("closed_form", expected)
                    .value("rel_err", err)
                    .check(CLOSED_FORM_TOL, err <= CLOSED_FORM_TOL);
            }
            Ok(vec![rec])
        }));
        let name = format!("pointwise invariants k={k}");
        let anchor = "*(g^{n−2k}R^k)/(n−2k)! = c^{2k}R^k/(2k)!, tr T_2k = (n−2k) h_2k";
        records.extend(guarded(&name, anchor, || {
            let (spec, _) = manifold(manifest)?;
            let n = spec.dim();
            let mut h_values = Vec::new();
            let mut worst = 0.0f64;
            for r in catalog_curvatures(&spec)? {
                let scale = r.form().norm().powi(k as i32).max(1.0);
                let (a, b) = gauss_bonnet_routes(&r, k)?;
                let (star, contraction) = lovelock_routes(&r, k)?;
                worst = worst
                    .max((a - b).abs() / scale)
                    .max((&star - &contraction).max_abs() / scale)
                    .max((trace(&contraction) - (n - 2 * k) as f64 * b).abs() / scale);
                h_values.push(a);
            }
            Ok(vec![Record::new(&name, anchor)
                .value("k", k)
                .value("h_2k_at_sample_points", h_values)
                .value("max_relative_gap", worst)
                .check(tol, worst <= tol)])
        }));
    }
    records
}

fn verify_identities(manifest: &Manifest) -> Vec<Record> {
    let n = manifest.dim().expect("validated manifest has a manifold");
    let trials = manifest.numeric.trials.unwrap_or(DEFAULT_TRIALS);
    let seed = manifest.seed();
    let tol = manifest.numeric.tolerances.identity.unwrap_or(FIBER_TOL);
    let mut records = guarded("fiber identities", "double-form algebra", || {
        Ok(fiber_identity_suite(n, trials, seed)?
            .into_iter()
            .map(|c| {
                Record::new(c.name, c.anchor)
                    .values_from(&c)
                    .check(tol, c.cases > 0 && c.max_residual <= tol)
            })
            .collect())
    });
    records.extend(guarded(
        "curvature identities",
        "dual routes for h_2k and T_2k",
        || {
            Ok(curvature_identity_suite(n, trials, seed)?
                .into_iter()
                .map(|c| {
                    Record::new(c.name, c.anchor)
                        .values_from(&c)
                        .check(tol, c.cases > 0 && c.max_residual <= tol)
                })
                .collect())
        },
    ));
    records
}

fn variation(manifest: &Manifest) -> Vec<Record> {
    let tol = manifest
        .numeric
        .tolerances
        .variation
        .unwrap_or(FIRST_VARIATION_TOL);
    let direction = manifest
        .direction
        .unwrap_or(DirectionSpec::RandomSymmetric {
            seed: manifest.seed(),
        });
    let mut records = Vec::new();
    for &k in &manifest.k {
        let name = format!("first variation k={k}");
        let anchor = "H'_2k·h = ½ ∫ ⟨T_2k, h⟩ μ_g";
        records.extend(guarded(&name, anchor, || {
            let (_, m) = manifold(manifest)?;
            let order = manifest
                .numeric
                .quad_order
                .unwrap_or_else(|| default_order(m.dim()));
            let steps = manifest
                .numeric
                .fd_step
                .map(FdSteps::new)
                .transpose()?
                .unwrap_or_default();
            let atlas = QuadratureAtlas::new(m.chart(), order)?;
            let h = direction.build(&m);
            let def = MetricDeformation::general(m.chart(), h.clone(), direction.label())?;
            let integrals = variation_integrals(&def, &atlas, k, steps)?;
            let main = first_variation_report(&def, &integrals, tol);
            let volume = volume_derivative_check(&integrals, VOLUME_TOL);
            let divergence = divergence_check(&integrals, tol);
            let projected = MetricDeformation::volume_normalized(
                &atlas,
                h,
                format!("{} (volume-normalized)", direction.label()),
            )?;
            let projected_integrals = variation_integrals(&projected, &atlas, k, steps)?;
            let projected_report = first_variation_report(&projected, &projected_integrals, tol);
            Ok(vec![
                Record::new(&name, anchor)
                    .values_from(&main)
                    .check(tol, main.pass),
                Record::new(
                    format!("volume derivative k={k}"),
                    "d/dt vol(g + t h) = ½ ∫ tr_g h μ_g",
                )
                .values_from(&volume)
                .check(VOLUME_TOL, volume.pass),
                Record::new(
                    format!("divergence terms k={k}"),
                    divergence.divergence_integral.name.clone(),
                )
                .values_from(&divergence.divergence_integral)
                .value("divergence_mass", divergence.divergence_mass)
                .check(tol, divergence.divergence_integral.pass),
                Record::new(
                    format!("volume bookkeeping k={k}"),
                    divergence.volume_bookkeeping.name.clone(),
                )
                .values_from(&divergence.volume_bookkeeping)
                .check(tol, divergence.volume_bookkeeping.pass),
                Record::new(format!("volume-normalized first variation k={k}"), anchor)
                    .values_from(&projected_report)
                    .value("raw_fd_value", main.fd_value)
                    .check(tol, projected_report.pass),
            ])
        }));
    }
    records
}

fn gauss_bonnet(manifest: &Manifest) -> Vec<Record> {
    let n = manifest.dim().expect("validated manifest has a manifold");
    let tol = manifest
        .numeric
        .tolerances
        .gauss_bonnet
        .unwrap_or(if n == 2 { 1e-4 } else { 1e-3 });
    let amplitude = manifest.numeric.amplitude.unwrap_or(DEFAULT_GB_AMPLITUDE);
    let perturbations = manifest
        .numeric
        .perturbations
        .unwrap_or(DEFAULT_PERTURBATIONS);
    let order = manifest
        .numeric
        .quad_order
        .unwrap_or_else(|| gauss_bonnet_order(n));
    guarded(
        "Gauss-Bonnet invariance",
        "H_n does not depend on the metric",
        || {
            let r = verify_gb_invariance(n, amplitude, manifest.seed(), perturbations, order, tol)?;
            let err = relative(r.round, r.round_closed_form);
            Ok(vec![
                Record::new(
                    format!("H_{n} of the round sphere"),
                    "H_n(Sⁿ) = h_n(κ = 1) vol(Sⁿ)",
                )
                .value("value", r.round)
                .value("closed_form", r.round_closed_form)
                .value("rel_err", err)
                .check(CLOSED_FORM_TOL, err <= CLOSED_FORM_TOL),
                Record::new(
                    "Gauss-Bonnet invariance",
                    "H_n does not depend on the metric",
                )
                .values_from(&r)
                .check(tol, r.pass),
            ])
        },
    )
}

fn einstein(manifest: &Manifest) -> Vec<Record> {
    let tol = manifest.numeric.tolerances.einstein.unwrap_or(EINSTEIN_TOL);
    let anchor = "T_2k = λ g ⇔ ω₁(R^k) = 0";
    if manifest.manifold.is_none() {
        let mut records = guarded("Einstein examples", anchor, || {
            Ok(einstein_examples_suite()?
                .cases
                .into_iter()
                .map(|c| {
                    Record::new(
                        format!("{} k={}", c.manifold, c.k),
                        "(2k)-Einstein examples",
                    )
                    .values_from(&c)
                    .check(tol, c.pass)
                })
                .collect())
        });
        let samples = manifest
            .numeric
            .trials
            .unwrap_or(DEFAULT_EQUIVALENCE_SAMPLES);
        for n in [5, 6] {
            records.extend(guarded("Einstein equivalence", anchor, || {
                let r = einstein_equivalence_suite(n, samples, manifest.seed())?;
                Ok(vec![Record::new(
                    format!("Einstein equivalence n={n}"),
                    anchor,
                )
                .values_from(&r)
                .check(tol, r.pass)])
            }));
        }
        return records;
    }
    let grid = manifest.numeric.quad_order.unwrap_or(EINSTEIN_GRID);
    manifest
        .k
        .iter()
        .flat_map(|&k| {
            let name = format!("(2k)-Einstein measurement k={k}");
            guarded(&name, anchor, || {
                let (_, m) = manifold(manifest)?;
                let c = einstein_case(&m, k, Expectation::Einstein { tolerance: tol }, grid)?;
                // A measurement: the manifold need not be Einstein, but the two tests must agree.
                Ok(vec![Record::new(&name, anchor)
                    .values_from(&c)
                    .value("einstein", c.pass)
                    .check(tol, c.omega1_agrees != Some(false))])
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_volumes() {
        assert!((sphere_volume(2, 1.0) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_volume(3, 1.0) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((sphere_volume(4, 2.0) - 16.0 * 8.0 * PI * PI / 3.0).abs() < 1e-10);
    }
}
