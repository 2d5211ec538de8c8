use serde::Serialize;

use super::functional::integrate_invariant;
use super::quadrature::QuadratureAtlas;
use crate::basis::factorial;
use crate::error::{Error, Result};
use crate::geometry::Manifold;

/// Largest perturbation amplitude accepted by the perturbed-sphere catalog.
const MAX_AMPLITUDE: f64 = 0.5;

#[derive(Debug, Clone, Serialize)]
pub struct GaussBonnetReport {
    pub n: usize,
    pub amplitude: f64,
    pub quadrature_order: usize,
    /// `H_n` of the round unit sphere.
    pub round: f64,
    /// `h_n(κ = 1) · vol(Sⁿ)`.
    pub round_closed_form: f64,
    pub seeds: Vec<u64>,
    /// `H_n` of the perturbed metrics, in seed order.
    pub perturbed: Vec<f64>,
    /// Largest pairwise relative deviation among all computed values.
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `vol(S^{2m}) = 2^{2m+1} π^m m! / (2m)!`.
fn even_sphere_volume(n: usize) -> f64 {
    let m = n / 2;
    2f64.powi(n as i32 + 1) * std::f64::consts::PI.powi(m as i32) * factorial(m) / factorial(n)
}

/// Default per-axis quadrature order for `verify_gb_invariance`.
pub fn gauss_bonnet_order(n: usize) -> usize {
    if n <= 2 {
        32
    } else {
        12
    }
}

/// `H_n` on the round sphere and on perturbed spheres from consecutive
/// seeds; the total must not depend on the metric.
pub fn verify_gb_invariance(
    n: usize,
    amplitude: f64,
    seed: u64,
    perturbations: usize,
    order: usize,
    tolerance: f64,
) -> Result<GaussBonnetReport> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "Gauss–Bonnet invariance needs an even dimension, got {n}"
        )));
    }
    if !(0.0..=MAX_AMPLITUDE).contains(&amplitude) {
        return Err(Error::InvalidParameter(format!(
            "amplitude {amplitude} outside [0, {MAX_AMPLITUDE}]"
        )));
    }
    let k = n / 2;
    let total = |m: Manifold| -> Result<f64> {
        integrate_invariant(&QuadratureAtlas::new(m.chart(), order)?, k)
    };
    let round = total(Manifold::sphere(n, 1.0))?;
    let seeds: Vec<u64> = (0..perturbations as u64)
        .map(|i| seed.wrapping_add(i))
        .collect();
    let perturbed = seeds
        .iter()
        .map(|&s| total(Manifold::perturbed_sphere(n, 1.0, amplitude, s)))
        .collect::<Result<Vec<f64>>>()?;
    let all: Vec<f64> = std::iter::once(round)
        .chain(perturbed.iter().copied())
        .collect();
    let mut max_deviation: f64 = 0.0;
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            max_deviation = max_deviation.max((a - b).abs() / a.abs().max(b.abs()));
        }
    }
    Ok(GaussBonnetReport {
        n,
        amplitude,
        quadrature_order: order,
        round,
        round_closed_form: factorial(n) / 2f64.powi(k as i32) * even_sphere_volume(n),
        seeds,
        perturbed,
        max_deviation,
        tolerance,
        pass: max_deviation <= tolerance,
    })
}
