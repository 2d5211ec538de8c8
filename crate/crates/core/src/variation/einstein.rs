use serde::Serialize;

use super::quadrature::QuadratureAtlas;
use crate::error::Result;
use crate::geometry::Manifold;
use crate::invariants::{einstein_deviation, lovelock_tensor};

/// What an example is expected to show.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Expectation {
    /// `T_2k = λ g` with the same `λ` at every sample point.
    Einstein { tolerance: f64 },
    /// `T_2k = 0`.
    Vanishing { tolerance: f64 },
    /// `T_2k − λ g` exceeds `margin` somewhere.
    NotEinstein { margin: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct EinsteinCase {
    pub manifold: String,
    pub n: usize,
    pub k: usize,
    pub expectation: Expectation,
    pub points: usize,
    /// Largest `|T_2k − λ g|` over the points.
    pub max_residual: f64,
    /// Largest `|T_2k|`.
    pub max_lovelock: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Largest `|ω₁(R^k)|`, when defined.
    pub omega1_max: Option<f64>,
    /// At every point, `T_2k ∝ g` and `ω₁(R^k) = 0` hold or fail together.
    pub omega1_agrees: Option<bool>,
    pub pass: bool,
}

/// Evaluates the generalized Einstein condition of order `k` on the
/// tensor-product grid of order `grid` over the chart.
pub fn einstein_case(
    m: &Manifold,
    k: usize,
    expectation: Expectation,
    grid: usize,
) -> Result<EinsteinCase> {
    let chart = m.chart();
    let atlas = QuadratureAtlas::new(chart.clone(), grid)?;
    let samples = atlas.map_nodes(|x| {
        let r = chart.point(x)?.riemann()?;
        let dev = einstein_deviation(&r, k)?;
        let t = lovelock_tensor(&r, k)?.form().max_abs();
        Ok((dev, t))
    })?;
    let max_residual = samples.iter().map(|(d, _)| d.residual).fold(0.0, f64::max);
    let max_lovelock = samples.iter().map(|(_, t)| *t).fold(0.0, f64::max);
    let lambda_min = samples
        .iter()
        .map(|(d, _)| d.lambda)
        .fold(f64::INFINITY, f64::min);
    let lambda_max = samples
        .iter()
        .map(|(d, _)| d.lambda)
        .fold(f64::NEG_INFINITY, f64::max);
    let omega1_max = samples
        .iter()
        .map(|(d, _)| d.omega1)
        .try_fold(0.0, |acc: f64, w| w.map(|w| acc.max(w)));
    let omega1_agrees = samples
        .iter()
        .map(|(d, _)| d.omega1_vanishes().map(|w| w == d.is_einstein()))
        .try_fold(true, |acc, v| v.map(|v| acc && v));
    let meets = match expectation {
        Expectation::Einstein { tolerance } => {
            max_residual <= tolerance
                && lambda_max - lambda_min <= tolerance * (1.0 + lambda_max.abs())
        }
        Expectation::Vanishing { tolerance } => max_lovelock <= tolerance,
        Expectation::NotEinstein { margin } => max_residual > margin,
    };
    Ok(EinsteinCase {
        manifold: m.name().to_string(),
        n: m.dim(),
        k,
        expectation,
        points: atlas.len(),
        max_residual,
        max_lovelock,
        lambda_min,
        lambda_max,
        omega1_max,
        omega1_agrees,
        pass: meets && omega1_agrees != Some(false),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EinsteinSuite {
    pub cases: Vec<EinsteinCase>,
    pub pass: bool,
}

/// Round spheres, flat tori and products with flat or spherical factors.
pub fn einstein_examples_suite() -> Result<EinsteinSuite> {
    let s5 = Manifold::sphere(5, 1.0);
    let t4 = Manifold::flat_torus(&[5.0, 6.0, 7.0, 8.0]);
    let s3t3 = Manifold::product(
        &Manifold::sphere(3, 1.0),
        &Manifold::flat_torus(&[5.0, 6.0, 7.0]),
    );
    let s2s2 = Manifold::product(&Manifold::sphere(2, 1.0), &Manifold::sphere(2, 1.0));
    let einstein = Expectation::Einstein { tolerance: 1e-8 };
    let cases = vec![
        einstein_case(&s5, 1, einstein, 2)?,
        einstein_case(&s5, 2, einstein, 2)?,
        einstein_case(&t4, 1, Expectation::Vanishing { tolerance: 0.0 }, 2)?,
        einstein_case(&t4, 2, Expectation::Vanishing { tolerance: 0.0 }, 2)?,
        einstein_case(&s3t3, 1, Expectation::NotEinstein { margin: 1e-3 }, 2)?,
        einstein_case(&s3t3, 2, Expectation::Vanishing { tolerance: 1e-6 }, 2)?,
        einstein_case(&s2s2, 1, einstein, 2)?,
        einstein_case(&s2s2, 2, Expectation::Vanishing { tolerance: 1e-8 }, 2)?,
    ];
    let pass = cases.iter().all(|c| c.pass);
    Ok(EinsteinSuite { cases, pass })
}
