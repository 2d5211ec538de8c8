use std::sync::Arc;

use serde::Serialize;

use super::functional::{
    first_variation_report, relative_error, variation_integrals, Comparison, FdSteps,
    MetricDeformation, VariationReport,
};
use super::quadrature::QuadratureAtlas;
use crate::error::{Error, Result};
use crate::geometry::{sample_scalar, ScalarField, ShiftedScalar};
use crate::invariants::gauss_bonnet_curvature;

#[derive(Debug, Clone, Serialize)]
pub struct ConformalReport {
    /// Finite-difference derivative along `f g` against `½(n − 2k) ∫ f h_2k μ`.
    pub formula: VariationReport,
    /// `½ ∫ ⟨T_2k, f g⟩ μ` against the same prediction, which rests on the
    /// trace identity of `T_2k`.
    pub pairing: Comparison,
}

/// Derivative along `f g` for `f` shifted to zero mean.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroMeanReport {
    pub k: usize,
    pub derivative: f64,
    /// `½(n − 2k) ∫ |f₀ h_2k| μ`.
    pub scale: f64,
    /// `max h_2k − min h_2k` over the nodes.
    pub h2k_spread: f64,
    pub mean_removed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn check_order(n: usize, k: usize) -> Result<()> {
    if k == 0 || 2 * k >= n {
        return Err(Error::DegreeOutOfRange(format!(
            "conformal variation needs 2 <= 2k < n (k = {k}, n = {n})"
        )));
    }
    Ok(())
}

/// `½(n − 2k) ∫ f h_2k μ`, the derivative of `H_2k` along `f g`.
pub fn conformal_prediction(atlas: &QuadratureAtlas, f: &dyn ScalarField, k: usize) -> Result<f64> {
    let n = atlas.chart().dim();
    let integral = atlas.integrate(|geom| {
        Ok(sample_scalar(f, geom.point()) * gauss_bonnet_curvature(&geom.riemann()?, k)?)
    })?;
    Ok(0.5 * (n - 2 * k) as f64 * integral)
}

pub fn verify_conformal_variation(
    atlas: &QuadratureAtlas,
    f: Arc<dyn ScalarField>,
    k: usize,
    steps: FdSteps,
    tolerance: f64,
) -> Result<ConformalReport> {
    let n = atlas.chart().dim();
    check_order(n, k)?;
    let prediction = conformal_prediction(atlas, f.as_ref(), k)?;
    let def = MetricDeformation::conformal(atlas.chart().clone(), f, "conformal")?;
    let integrals = variation_integrals(&def, atlas, k, steps)?;
    let mut formula = first_variation_report(&def, &integrals, tolerance);
    formula.pairing_value = prediction;
    formula.abs_err = (formula.fd_value - prediction).abs();
    formula.rel_err = relative_error(formula.fd_value, prediction, integrals.floor);
    formula.pass = formula.rel_err <= tolerance;
    let pairing = Comparison::new(
        "½∫⟨T_2k, f g⟩ μ = ½(n−2k)∫f h_2k μ",
        integrals.pairing,
        prediction,
        integrals.floor,
        tolerance,
    );
    Ok(ConformalReport { formula, pairing })
}

/// Removes the mean of `f` and checks that the conformal derivative
/// vanishes, as it must when `h_2k` is constant.
pub fn verify_zero_mean_conformal(
    atlas: &QuadratureAtlas,
    f: Arc<dyn ScalarField>,
    k: usize,
    steps: FdSteps,
    relative_tolerance: f64,
) -> Result<ZeroMeanReport> {
    let n = atlas.chart().dim();
    check_order(n, k)?;
    let mean =
        atlas.integrate(|geom| Ok(sample_scalar(f.as_ref(), geom.point())))? / atlas.volume()?;
    let f0: Arc<dyn ScalarField> = Arc::new(ShiftedScalar {
        field: f,
        shift: -mean,
    });
    let h_values =
        atlas.map_nodes(|x| gauss_bonnet_curvature(&atlas.chart().point(x)?.riemann()?, k))?;
    let spread = h_values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - h_values.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = 0.5
        * (n - 2 * k) as f64
        * atlas.integrate(|geom| {
            Ok((sample_scalar(f0.as_ref(), geom.point())
                * gauss_bonnet_curvature(&geom.riemann()?, k)?)
            .abs())
        })?;
    let def = MetricDeformation::conformal(atlas.chart().clone(), f0, "zero-mean conformal")?;
    let derivative = variation_integrals(&def, atlas, k, steps)?.fd_derivative;
    Ok(ZeroMeanReport {
        k,
        derivative,
        scale,
        h2k_spread: spread,
        mean_removed: mean,
        tolerance: relative_tolerance,
        pass: derivative.abs() <= relative_tolerance * scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConstantScalar, Manifold};

    #[test]
    fn unit_factor_on_three_sphere() {
        // H_2(g) on S³ scales as vol^{1/3}, so the derivative along g is H_2 / 2 = 3π².
        let m = Manifold::sphere(3, 1.0);
        let atlas = QuadratureAtlas::new(m.chart(), 12).unwrap();
        let one = Arc::new(ConstantScalar { n: 3, value: 1.0 });
        let report = verify_conformal_variation(&atlas, one, 1, FdSteps::default(), 1e-3).unwrap();
        let expected = 3.0 * std::f64::consts::PI.powi(2);
        assert!((report.formula.pairing_value - expected).abs() < 1e-9 * expected);
        assert!(report.formula.rel_err < 1e-8, "{report:?}");
        assert!(report.pairing.pass);
    }

    #[test]
    fn zero_mean_on_round_spheres() {
        for (n, order, seed) in [(3, 12, 1), (4, 8, 2)] {
            let m = Manifold::sphere(n, 1.0);
            let atlas = QuadratureAtlas::new(m.chart(), order).unwrap();
            let f = m.random_scalar_field(0.7, 0.5, seed);
            let report =
                verify_zero_mean_conformal(&atlas, f, 1, FdSteps::default(), 1e-4).unwrap();
            assert!(report.pass, "{report:?}");
            assert!(report.h2k_spread < 1e-7, "{report:?}");
            assert!(report.scale > 1e-2);
        }
    }

    #[test]
    fn curved_non_constant_metrics() {
        let m = Manifold::perturbed_sphere(3, 1.0, 0.2, 3);
        let atlas = QuadratureAtlas::new(m.chart(), 12).unwrap();
        let report = verify_conformal_variation(
            &atlas,
            m.random_scalar_field(0.5, 0.5, 4),
            1,
            FdSteps::default(),
            1e-3,
        )
        .unwrap();
        assert!(report.formula.pass && report.pairing.pass, "{report:?}");
        let m = Manifold::perturbed_sphere(4, 1.0, 0.1, 5);
        let atlas = QuadratureAtlas::new(m.chart(), 10).unwrap();
        let report = verify_conformal_variation(
            &atlas,
            m.random_scalar_field(0.5, 0.5, 5),
            1,
            FdSteps::default(),
            1e-3,
        )
        .unwrap();
        assert!(report.formula.pass && report.pairing.pass, "{report:?}");
    }

    #[test]
    fn flat_torus_derivative_vanishes() {
        let m = Manifold::flat_torus(&[5.0, 6.0, 7.0]);
        let atlas = QuadratureAtlas::new(m.chart(), 6).unwrap();
        let report = verify_conformal_variation(
            &atlas,
            m.random_scalar_field(1.0, 0.5, 9),
            1,
            FdSteps::default(),
            1e-3,
        )
        .unwrap();
        assert_eq!(report.formula.pairing_value, 0.0);
        assert!(report.formula.fd_value.abs() < 1e-6);
    }

    #[test]
    fn order_range_is_checked() {
        let m = Manifold::sphere(4, 1.0);
        let atlas = QuadratureAtlas::new(m.chart(), 4).unwrap();
        let f = m.random_scalar_field(1.0, 0.5, 9);
        assert!(verify_conformal_variation(&atlas, f, 2, FdSteps::default(), 1e-3).is_err());
    }
}
