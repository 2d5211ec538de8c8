use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::point::PointGeometry;
use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisKind {
    /// Open interval; stencils must stay strictly inside.
    Interval,
    /// Periodic coordinate; stencils wrap.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub kind: AxisKind,
}

impl Axis {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            kind: AxisKind::Interval,
        }
    }

    pub fn periodic(period: f64) -> Self {
        Self {
            lo: 0.0,
            hi: period,
            kind: AxisKind::Periodic,
        }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Rectangular parameter domain.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ParamBox {
    pub axes: Vec<Axis>,
}

impl ParamBox {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Whether `x ± margin` stays inside every interval axis.
    pub fn contains_with_margin(&self, x: &[f64], margin: &[f64]) -> bool {
        self.axes
            .iter()
            .zip(x)
            .zip(margin)
            .all(|((a, &xi), &m)| match a.kind {
                AxisKind::Periodic => xi.is_finite(),
                AxisKind::Interval => xi - m > a.lo && xi + m < a.hi,
            })
    }

    pub fn concat(&self, other: &ParamBox) -> ParamBox {
        ParamBox {
            axes: self.axes.iter().chain(&other.axes).copied().collect(),
        }
    }
}

/// Symmetric 2-tensor field in chart components, evaluated on jets so that
/// derivatives come out exactly. Used for metrics and for deformation
/// directions alike.
pub trait SymmetricField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// Row-major `n × n` components at the point carried by `x`.
    fn components(&self, x: &[Jet]) -> Vec<Jet>;
}

/// Scalar field on a chart, evaluated on jets.
pub trait ScalarField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn value(&self, x: &[Jet]) -> Jet;
}

/// Step rule `h_i = base · (1 + |x_i|)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StepRule {
    pub base: f64,
}

impl StepRule {
    /// Balances truncation and rounding for a 4th-order first-derivative
    /// stencil: `ε^{1/5}`.
    pub fn first_order_default() -> Self {
        Self {
            base: f64::EPSILON.powf(0.2),
        }
    }

    /// Same balance for a 4th-order second-derivative stencil: `ε^{1/6}`.
    pub fn second_order_default() -> Self {
        Self {
            base: f64::EPSILON.powf(1.0 / 6.0),
        }
    }

    pub fn step(&self, xi: f64) -> f64 {
        self.base * (1.0 + xi.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeScheme {
    /// Exact jets from the field's analytic expression.
    Analytic,
    /// 4th-order central differences of metric values.
    CentralDifference(StepRule),
}

/// Metric values with first and second coordinate derivatives at a point.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub g: DMatrix<f64>,
    /// `dg[a][(i, j)] = ∂_a g_ij`.
    pub dg: Vec<DMatrix<f64>>,
    /// `ddg[a][b][(i, j)] = ∂_a ∂_b g_ij`.
    pub ddg: Vec<Vec<DMatrix<f64>>>,
}

impl MetricJet {
    pub fn from_jets(n: usize, comps: &[Jet]) -> Self {
        let g = DMatrix::from_fn(n, n, |i, j| comps[i * n + j].v);
        let dg = (0..n)
            .map(|a| DMatrix::from_fn(n, n, |i, j| comps[i * n + j].d[a]))
            .collect();
        let ddg = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| DMatrix::from_fn(n, n, |i, j| comps[i * n + j].h[a][b]))
                    .collect()
            })
            .collect();
        Self { g, dg, ddg }
    }
}

/// A coordinate chart carrying a Riemannian metric.
#[derive(Clone)]
pub struct MetricChart {
    name: String,
    domain: ParamBox,
    metric: Arc<dyn SymmetricField>,
    scheme: DerivativeScheme,
    frame_order: Option<Vec<usize>>,
}

impl fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricChart")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("scheme", &self.scheme)
            .finish()
    }
}

impl MetricChart {
    pub fn new(
        name: impl Into<String>,
        domain: ParamBox,
        metric: Arc<dyn SymmetricField>,
    ) -> Result<Self> {
        if domain.dim() != metric.dim() {
            return Err(Error::DimensionMismatch(domain.dim(), metric.dim()));
        }
        crate::basis::check_dim(domain.dim())?;
        Ok(Self {
            name: name.into(),
            domain,
            metric,
            scheme: DerivativeScheme::Analytic,
            frame_order: None,
        })
    }

    pub fn with_scheme(mut self, scheme: DerivativeScheme) -> Self {
        self.scheme = scheme;
        self
    }

    /// Gram–Schmidt order of the coordinate basis when building frames.
    pub fn with_frame_order(mut self, order: Vec<usize>) -> Result<Self> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..self.dim()).collect::<Vec<_>>() {
            return Err(Error::InvalidParameter(format!(
                "frame order {order:?} is not a permutation"
            )));
        }
        self.frame_order = Some(order);
        Ok(self)
    }

    /// Replaces the metric, keeping domain, scheme and frame order.
    pub fn with_metric(&self, name: impl Into<String>, metric: Arc<dyn SymmetricField>) -> Self {
        Self {
            name: name.into(),
            metric,
            ..self.clone()
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &ParamBox {
        &self.domain
    }

    pub fn scheme(&self) -> DerivativeScheme {
        self.scheme
    }

    pub fn metric_field(&self) -> &Arc<dyn SymmetricField> {
        &self.metric
    }

    pub fn frame_order(&self) -> Option<&[usize]> {
        self.frame_order.as_deref()
    }

    pub fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.dim();
        let comps = self.metric.components(&Jet::values(x));
        DMatrix::from_fn(n, n, |i, j| comps[i * n + j].v)
    }

    /// Metric with derivatives, by the chart's derivative scheme.
    pub fn jet(&self, x: &[f64]) -> Result<MetricJet> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch(x.len(), n));
        }
        match self.scheme {
            DerivativeScheme::Analytic => Ok(MetricJet::from_jets(
                n,
                &self.metric.components(&Jet::seed(x)),
            )),
            DerivativeScheme::CentralDifference(rule) => self.fd_jet(x, rule),
        }
    }

    /// Central-difference metric jet with explicit step rule.
    pub fn fd_jet(&self, x: &[f64], rule: StepRule) -> Result<MetricJet> {
        let n = self.dim();
        let steps: Vec<f64> = x.iter().map(|&xi| rule.step(xi)).collect();
        let margin: Vec<f64> = steps.iter().map(|h| 2.0 * h).collect();
        if !self.domain.contains_with_margin(x, &margin) {
            return Err(Error::OutOfDomain {
                point: x.to_vec(),
                margin: margin.iter().cloned().fold(0.0, f64::max),
            });
        }
        let at = |offsets: &[(usize, f64)]| {
            let mut y = x.to_vec();
            for &(a, o) in offsets {
                y[a] += o;
            }
            self.metric(&y)
        };
        let g = self.metric(x);
        let mut dg = Vec::with_capacity(n);
        let mut ddg = vec![vec![DMatrix::zeros(n, n); n]; n];
        for a in 0..n {
            let h = steps[a];
            let fm2 = at(&[(a, -2.0 * h)]);
            let fm1 = at(&[(a, -h)]);
            let fp1 = at(&[(a, h)]);
            let fp2 = at(&[(a, 2.0 * h)]);
            dg.push((&fm2 - &fm1 * 8.0 + &fp1 * 8.0 - &fp2) / (12.0 * h));
            ddg[a][a] = (-&fm2 + &fm1 * 16.0 - &g * 30.0 + &fp1 * 16.0 - &fp2) / (12.0 * h * h);
        }
        const W: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];
        for a in 0..n {
            for b in (a + 1)..n {
                let (ha, hb) = (steps[a], steps[b]);
                let mut acc = DMatrix::zeros(n, n);
                for &(sa, wa) in &W {
                    for &(sb, wb) in &W {
                        acc += at(&[(a, sa * ha), (b, sb * hb)]) * (wa * wb);
                    }
                }
                let m = acc / (144.0 * ha * hb);
                ddg[a][b] = m.clone();
                ddg[b][a] = m;
            }
        }
        Ok(MetricJet { g, dg, ddg })
    }

    /// Full point data: metric, inverse, Christoffel symbols and their
    /// derivatives, orthonormal frame.
    pub fn point(&self, x: &[f64]) -> Result<PointGeometry> {
        let jet = self.jet(x)?;
        PointGeometry::from_jet(x, jet, self.frame_order.as_deref())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug)]
    struct Warped;

    impl SymmetricField for Warped {
        fn dim(&self) -> usize {
            2
        }
        fn components(&self, x: &[Jet]) -> Vec<Jet> {
            let a = (x[0] * x[1]).exp();
            let b = x[0].sin() * 0.3;
            let c = x[1].cos() + 2.0;
            vec![a, b, b, c]
        }
    }

    #[test]
    fn analytic_jet_matches_central_differences() {
        let chart = MetricChart::new(
            "warped",
            ParamBox {
                axes: vec![Axis::interval(-1.0, 1.0), Axis::interval(-1.0, 1.0)],
            },
            Arc::new(Warped),
        )
        .unwrap();
        let x = [0.3, -0.2];
        let exact = chart.jet(&x).unwrap();
        let fd = chart.fd_jet(&x, StepRule::second_order_default()).unwrap();
        for a in 0..2 {
            assert!((&exact.dg[a] - &fd.dg[a]).amax() < 1e-9);
            for b in 0..2 {
                assert!(
                    (&exact.ddg[a][b] - &fd.ddg[a][b]).amax() < 1e-7,
                    "a={a} b={b}"
                );
            }
        }
        // O(step^4) convergence of the first derivative
        let coarse = chart.fd_jet(&x, StepRule { base: 0.02 }).unwrap();
        let finer = chart.fd_jet(&x, StepRule { base: 0.01 }).unwrap();
        let e1 = (&exact.dg[0] - &coarse.dg[0]).amax();
        let e2 = (&exact.dg[0] - &finer.dg[0]).amax();
        assert!(e1 / e2 > 10.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn stencil_must_stay_inside() {
        let chart = MetricChart::new(
            "warped",
            ParamBox {
                axes: vec![Axis::interval(-1.0, 1.0), Axis::interval(-1.0, 1.0)],
            },
            Arc::new(Warped),
        )
        .unwrap();
        let err = chart
            .fd_jet(&[0.9999, 0.0], StepRule::second_order_default())
            .unwrap_err();
        assert!(matches!(err, Error::OutOfDomain { .. }));
    }
}
