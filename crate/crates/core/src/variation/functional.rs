use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::quadrature::QuadratureAtlas;
use crate::double_forms::DoubleForm;
use crate::error::{Error, Result};
use crate::geometry::{
    sample_symmetric, MetricChart, PointGeometry, ScalarField, ScaledField, SumField,
    SymmetricField,
};
use crate::invariants::{gauss_bonnet_curvature, invariant_bundle, trace};

/// Central-difference steps `t` and `t/2`, combined by Richardson
/// extrapolation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdSteps {
    pub t: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        Self { t: 1e-3 }
    }
}

impl FdSteps {
    pub fn new(t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0 && t < 0.1) {
            return Err(Error::InvalidParameter(format!(
                "fd step {t} outside (0, 0.1)"
            )));
        }
        Ok(Self { t })
    }

    pub fn steps(&self) -> [f64; 2] {
        [self.t, 0.5 * self.t]
    }

    /// Extrapolates central differences at `t` and `t/2`, cancelling the
    /// `O(t²)` term.
    pub fn richardson(d_t: f64, d_half: f64) -> f64 {
        (4.0 * d_half - d_t) / 3.0
    }

    /// Derivative at 0 from samples at `[t, −t, t/2, −t/2]`.
    pub fn derivative(&self, samples: [f64; 4]) -> f64 {
        let [t1, t2] = self.steps();
        let d1 = (samples[0] - samples[1]) / (2.0 * t1);
        let d2 = (samples[2] - samples[3]) / (2.0 * t2);
        Self::richardson(d1, d2)
    }

    fn offsets(&self) -> [f64; 4] {
        let [t1, t2] = self.steps();
        [t1, -t1, t2, -t2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeformationKind {
    General,
    /// `h = f·g`.
    Conformal,
    /// `h − c·g` with `c` chosen so that the volume is stationary.
    VolumeNormalized,
}

/// Direction `h` of a metric variation `g + t h`.
#[derive(Clone)]
pub struct MetricDeformation {
    base: MetricChart,
    direction: Arc<dyn SymmetricField>,
    kind: DeformationKind,
    label: String,
}

impl fmt::Debug for MetricDeformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricDeformation")
            .field("base", &self.base.name())
            .field("kind", &self.kind)
            .field("label", &self.label)
            .finish()
    }
}

impl MetricDeformation {
    pub fn general(
        base: MetricChart,
        direction: Arc<dyn SymmetricField>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if direction.dim() != base.dim() {
            return Err(Error::DimensionMismatch(direction.dim(), base.dim()));
        }
        Ok(Self {
            base,
            direction,
            kind: DeformationKind::General,
            label: label.into(),
        })
    }

    pub fn conformal(
        base: MetricChart,
        f: Arc<dyn ScalarField>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if f.dim() != base.dim() {
            return Err(Error::DimensionMismatch(f.dim(), base.dim()));
        }
        let direction = Arc::new(ScaledField {
            factor: f,
            field: base.metric_field().clone(),
        });
        Ok(Self {
            base,
            direction,
            kind: DeformationKind::Conformal,
            label: label.into(),
        })
    }

    /// `h − c g` with `c = ∫ tr_g h μ / (n · vol)`.
    pub fn volume_normalized(
        atlas: &QuadratureAtlas,
        direction: Arc<dyn SymmetricField>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let raw = Self::general(atlas.chart().clone(), direction.clone(), "raw")?;
        let n = atlas.chart().dim() as f64;
        let trace_integral = atlas.integrate(|geom| Ok(trace(&raw.direction_at(geom))))?;
        let c = trace_integral / (n * atlas.volume()?);
        let projected = Arc::new(SumField {
            first: direction,
            second: atlas.chart().metric_field().clone(),
            t: -c,
        });
        Ok(Self {
            base: atlas.chart().clone(),
            direction: projected,
            kind: DeformationKind::VolumeNormalized,
            label: label.into(),
        })
    }

    pub fn base(&self) -> &MetricChart {
        &self.base
    }

    pub fn direction(&self) -> &Arc<dyn SymmetricField> {
        &self.direction
    }

    pub fn kind(&self) -> DeformationKind {
        self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Chart carrying `g + t h`.
    pub fn chart_at(&self, t: f64) -> MetricChart {
        let metric = Arc::new(SumField {
            first: self.base.metric_field().clone(),
            second: self.direction.clone(),
            t,
        });
        self.base
            .with_metric(format!("{}+{t}h", self.base.name()), metric)
    }

    /// `h` at the point, in the orthonormal frame of `g`.
    pub fn direction_at(&self, geom: &PointGeometry) -> DoubleForm {
        geom.symmetric_to_frame(&sample_symmetric(self.direction.as_ref(), geom.point()))
    }
}

/// Integrated quantities from one pass over the quadrature nodes.
#[derive(Debug, Clone, Serialize)]
pub struct VariationIntegrals {
    pub k: usize,
    /// `H_2k(g)`.
    pub functional: f64,
    pub volume: f64,
    /// Richardson-extrapolated `d/dt H_2k(g + t h)`.
    pub fd_derivative: f64,
    /// `½ ∫ ⟨T_2k, h⟩ μ`.
    pub pairing: f64,
    /// `∫ ⟨−c^{2k−1}R^k / (2(2k−1)!), h⟩ μ`.
    pub curvature_term: f64,
    /// `∫ (d/dt h_2k) μ`, pointwise derivative at fixed coordinates.
    pub pointwise_derivative: f64,
    /// `∫ |d/dt h_2k − ⟨−c^{2k−1}R^k/(2(2k−1)!), h⟩| μ`.
    pub divergence_mass: f64,
    /// `d/dt vol(g + t h)`.
    pub volume_derivative: f64,
    /// `½ ∫ tr_g h μ`.
    pub half_trace: f64,
    /// `½ ∫ h_2k tr_g h μ`.
    pub volume_term: f64,
    /// `∫ |∂_t (h_2k √det g)| dx`.
    pub integrand_mass: f64,
    /// `max(½ ∫ |h_2k| |h| μ, integrand_mass)`: the scale for relative errors
    /// when the derivative itself is small.
    pub floor: f64,
    pub fd_steps: [f64; 2],
    pub nodes: usize,
    pub quadrature_order: usize,
}

struct NodeSample {
    h2k: f64,
    pairing: f64,
    curvature_term: f64,
    trace_h: f64,
    h_norm: f64,
    d_h2k: f64,
    d_density: f64,
    d_integrand: f64,
    density: f64,
}

/// One pass over the nodes collecting everything the variation checks use.
pub fn variation_integrals(
    def: &MetricDeformation,
    atlas: &QuadratureAtlas,
    k: usize,
    steps: FdSteps,
) -> Result<VariationIntegrals> {
    let n = def.base.dim();
    if k == 0 || 2 * k > n {
        return Err(Error::DegreeOutOfRange(format!(
            "2k exceeds n (k = {k}, n = {n})"
        )));
    }
    let offsets = steps.offsets();
    let charts: Vec<MetricChart> = offsets.iter().map(|&t| def.chart_at(t)).collect();
    let samples = atlas.map_nodes(|x| {
        let geom = def.base.point(x)?;
        let bundle = invariant_bundle(&geom.riemann()?, k)?;
        let h = def.direction_at(&geom);
        let mut h_t = [0.0; 4];
        let mut dens_t = [0.0; 4];
        for (i, chart) in charts.iter().enumerate() {
            let g = chart.point(x)?;
            h_t[i] = gauss_bonnet_curvature(&g.riemann()?, k)?;
            dens_t[i] = g.volume_density();
        }
        let integrand: [f64; 4] = std::array::from_fn(|i| h_t[i] * dens_t[i]);
        Ok(NodeSample {
            h2k: bundle.h2k,
            pairing: 0.5 * bundle.t2k.form().inner(&h)?,
            curvature_term: -0.5 * bundle.generalized_ricci.form().inner(&h)?,
            trace_h: trace(&h),
            h_norm: h.norm(),
            d_h2k: steps.derivative(h_t),
            d_density: steps.derivative(dens_t),
            d_integrand: steps.derivative(integrand),
            density: geom.volume_density(),
        })
    })?;
    let sum = |f: &dyn Fn(&NodeSample) -> f64| {
        let values: Vec<f64> = samples.iter().map(f).collect();
        atlas.weighted_sum(&values)
    };
    let integrand_mass = sum(&|s| s.d_integrand.abs());
    Ok(VariationIntegrals {
        k,
        functional: sum(&|s| s.h2k * s.density),
        volume: sum(&|s| s.density),
        fd_derivative: sum(&|s| s.d_integrand),
        pairing: sum(&|s| s.pairing * s.density),
        curvature_term: sum(&|s| s.curvature_term * s.density),
        pointwise_derivative: sum(&|s| s.d_h2k * s.density),
        divergence_mass: sum(&|s| (s.d_h2k - s.curvature_term).abs() * s.density),
        volume_derivative: sum(&|s| s.d_density),
        half_trace: sum(&|s| 0.5 * s.trace_h * s.density),
        volume_term: sum(&|s| 0.5 * s.h2k * s.trace_h * s.density),
        integrand_mass,
        floor: sum(&|s| 0.5 * s.h2k.abs() * s.h_norm * s.density).max(integrand_mass),
        fd_steps: steps.steps(),
        nodes: atlas.len(),
        quadrature_order: atlas.order(),
    })
}

/// `H_2k = ∫ h_2k μ_g`.
pub fn integrate_invariant(atlas: &QuadratureAtlas, k: usize) -> Result<f64> {
    atlas.integrate(|geom| gauss_bonnet_curvature(&geom.riemann()?, k))
}

/// Richardson-extrapolated `d/dt H_2k(g + t h)` at `t = 0`.
pub fn fd_functional_derivative(
    def: &MetricDeformation,
    atlas: &QuadratureAtlas,
    k: usize,
    steps: FdSteps,
) -> Result<f64> {
    let n = def.base.dim();
    if k == 0 || 2 * k > n {
        return Err(Error::DegreeOutOfRange(format!(
            "2k exceeds n (k = {k}, n = {n})"
        )));
    }
    let offsets = steps.offsets();
    let charts: Vec<MetricChart> = offsets.iter().map(|&t| def.chart_at(t)).collect();
    let values = atlas.map_nodes(|x| {
        let mut v = [0.0; 4];
        for (i, chart) in charts.iter().enumerate() {
            let g = chart.point(x)?;
            v[i] = gauss_bonnet_curvature(&g.riemann()?, k)? * g.volume_density();
        }
        Ok(steps.derivative(v))
    })?;
    Ok(atlas.weighted_sum(&values))
}

/// `½ ∫ ⟨T_2k, h⟩ μ_g`.
pub fn gradient_pairing(def: &MetricDeformation, atlas: &QuadratureAtlas, k: usize) -> Result<f64> {
    atlas.integrate(|geom| {
        let bundle = invariant_bundle(&geom.riemann()?, k)?;
        Ok(0.5 * bundle.t2k.form().inner(&def.direction_at(geom))?)
    })
}

/// `|a − b| / max(|a|, |b|, floor)`.
pub fn relative_error(a: f64, b: f64, floor: f64) -> f64 {
    let denom = a.abs().max(b.abs()).max(floor);
    if denom == 0.0 {
        0.0
    } else {
        (a - b).abs() / denom
    }
}

/// Finite-difference derivative against a closed-form prediction.
#[derive(Debug, Clone, Serialize)]
pub struct VariationReport {
    pub label: String,
    pub manifold: String,
    pub k: usize,
    pub fd_value: f64,
    pub pairing_value: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub floor: f64,
    pub fd_step: [f64; 2],
    pub quadrature_order: usize,
    pub nodes: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl VariationReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: &str,
        manifold: &str,
        k: usize,
        fd_value: f64,
        pairing_value: f64,
        floor: f64,
        integrals: &VariationIntegrals,
        tolerance: f64,
    ) -> Self {
        let rel_err = relative_error(fd_value, pairing_value, floor);
        Self {
            label: label.to_string(),
            manifold: manifold.to_string(),
            k,
            fd_value,
            pairing_value,
            abs_err: (fd_value - pairing_value).abs(),
            rel_err,
            floor,
            fd_step: integrals.fd_steps,
            quadrature_order: integrals.quadrature_order,
            nodes: integrals.nodes,
            tolerance,
            pass: rel_err <= tolerance,
        }
    }
}

/// Default relative tolerance for first-variation comparisons.
pub const FIRST_VARIATION_TOL: f64 = 1e-3;

/// Compares the finite-difference derivative of `H_2k` with `½⟨T_2k, h⟩`.
pub fn verify_first_variation(
    def: &MetricDeformation,
    atlas: &QuadratureAtlas,
    k: usize,
    steps: FdSteps,
    tolerance: f64,
) -> Result<VariationReport> {
    let integrals = variation_integrals(def, atlas, k, steps)?;
    Ok(first_variation_report(def, &integrals, tolerance))
}

pub fn first_variation_report(
    def: &MetricDeformation,
    integrals: &VariationIntegrals,
    tolerance: f64,
) -> VariationReport {
    VariationReport::new(
        def.label(),
        def.base().name(),
        integrals.k,
        integrals.fd_derivative,
        integrals.pairing,
        integrals.floor,
        integrals,
        tolerance,
    )
}

/// Two numbers that should agree, with the scale used for the relative error.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Comparison {
    pub fn new(
        name: impl Into<String>,
        measured: f64,
        expected: f64,
        scale: f64,
        tolerance: f64,
    ) -> Self {
        let rel_err = relative_error(measured, expected, scale);
        Self {
            name: name.into(),
            measured,
            expected,
            abs_err: (measured - expected).abs(),
            rel_err,
            scale,
            tolerance,
            pass: rel_err <= tolerance,
        }
    }
}

/// `d/dt vol(g + t h) = ½ ∫ tr_g h μ`.
pub fn volume_derivative_check(integrals: &VariationIntegrals, tolerance: f64) -> Comparison {
    Comparison::new(
        "volume derivative = ½∫tr_g h μ",
        integrals.volume_derivative,
        integrals.half_trace,
        integrals.half_trace.abs().max(integrals.volume * 1e-3),
        tolerance,
    )
}

/// The pointwise derivative of `h_2k` differs from the curvature term
/// `⟨−c^{2k−1}R^k/(2(2k−1)!), h⟩` by divergences, which integrate to zero.
#[derive(Debug, Clone, Serialize)]
pub struct DivergenceCheck {
    /// `∫ ḣ_2k μ` against `∫ ⟨−c^{2k−1}R^k/(2(2k−1)!), h⟩ μ`.
    pub divergence_integral: Comparison,
    /// `∫ ḣ_2k μ` against the full derivative minus the volume term.
    pub volume_bookkeeping: Comparison,
    /// `∫ |ḣ_2k − curvature term| μ`: nonzero when the divergence part is
    /// genuinely present.
    pub divergence_mass: f64,
}

pub fn divergence_check(integrals: &VariationIntegrals, tolerance: f64) -> DivergenceCheck {
    let scale = integrals.divergence_mass.max(integrals.floor);
    DivergenceCheck {
        divergence_integral: Comparison::new(
            "∫ḣ_2k μ = ∫⟨−c^{2k−1}R^k/(2(2k−1)!), h⟩ μ",
            integrals.pointwise_derivative,
            integrals.curvature_term,
            scale,
            tolerance,
        ),
        volume_bookkeeping: Comparison::new(
            "∫ḣ_2k μ = H'_2k·h − ½∫h_2k tr h μ",
            integrals.pointwise_derivative,
            integrals.fd_derivative - integrals.volume_term,
            scale,
            tolerance,
        ),
        divergence_mass: integrals.divergence_mass,
    }
}
