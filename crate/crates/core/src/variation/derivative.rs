use std::sync::Arc;

use serde::Serialize;

use super::functional::FdSteps;
use crate::double_forms::{f_h, CurvatureStructure, DoubleForm};
use crate::error::Result;
use crate::geometry::{hessian_operator, FormField, MetricChart, SumField, SymmetricField};

/// Pointwise comparison of the derivative of the curvature structure with
/// the prediction `−¼(DD̃ + D̃D)h + ¼F_h(R)`.
#[derive(Debug, Clone, Serialize)]
pub struct CurvatureDerivativeReport {
    pub point: Vec<f64>,
    /// Max-norm of the difference.
    pub residual: f64,
    /// Max-norm of the finite-difference side.
    pub fd_norm: f64,
    pub predicted_norm: f64,
    /// Max-norm of `−¼(DD̃ + D̃D)h`.
    pub hessian_norm: f64,
    /// Max-norm of `¼F_h(R)`.
    pub algebraic_norm: f64,
    pub fd_step: [f64; 2],
    pub tolerance: f64,
    pub pass: bool,
}

/// Derivative at `t = 0` of the `(0,4)` curvature tensor of `g + t h`,
/// expressed in the fixed orthonormal frame of `g`.
pub fn curvature_derivative(
    chart: &MetricChart,
    h: &Arc<dyn SymmetricField>,
    x: &[f64],
    steps: FdSteps,
) -> Result<DoubleForm> {
    let base = chart.point(x)?;
    let [t1, t2] = steps.steps();
    let sample = |t: f64| -> Result<DoubleForm> {
        let metric = Arc::new(SumField {
            first: chart.metric_field().clone(),
            second: h.clone(),
            t,
        });
        let moved = chart.with_metric(chart.name(), metric);
        base.to_frame(&moved.point(x)?.riemann_coordinates())
    };
    let d1 = (&sample(t1)? - &sample(-t1)?).scaled(0.5 / t1);
    let d2 = (&sample(t2)? - &sample(-t2)?).scaled(0.5 / t2);
    let extrapolated = &d2.scaled(4.0 / 3.0) - &d1.scaled(1.0 / 3.0);
    Ok(CurvatureStructure::symmetrize(&extrapolated)?.into_form())
}

pub fn verify_curvature_derivative(
    chart: &MetricChart,
    h: Arc<dyn SymmetricField>,
    x: &[f64],
    steps: FdSteps,
    tolerance: f64,
) -> Result<CurvatureDerivativeReport> {
    let fd = curvature_derivative(chart, &h, x, steps)?;
    let geom = chart.point(x)?;
    let r = geom.riemann()?;
    let h_frame = geom.symmetric_to_frame(&crate::geometry::sample_symmetric(h.as_ref(), x));
    let hessian = hessian_operator(chart, &FormField::symmetric(h.clone()), x)?.scaled(-0.25);
    let algebraic = f_h(&CurvatureStructure::symmetrize(&h_frame)?, r.form())?.scaled(0.25);
    let predicted = &hessian + &algebraic;
    let residual = (&fd - &predicted).max_abs();
    Ok(CurvatureDerivativeReport {
        point: x.to_vec(),
        residual,
        fd_norm: fd.max_abs(),
        predicted_norm: predicted.max_abs(),
        hessian_norm: hessian.max_abs(),
        algebraic_norm: algebraic.max_abs(),
        fd_step: steps.steps(),
        tolerance,
        pass: residual <= tolerance,
    })
}
