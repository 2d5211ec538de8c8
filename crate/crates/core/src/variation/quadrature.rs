use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{AxisKind, MetricChart, PointGeometry};

/// Tensor-product quadrature over a chart covering a closed manifold up to
/// a null set: Gauss–Legendre on interval axes, the equal-weight rule on
/// periodic axes.
#[derive(Debug, Clone)]
pub struct QuadratureAtlas {
    chart: MetricChart,
    orders: Vec<usize>,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
    excluded_measure: f64,
}

impl QuadratureAtlas {
    pub fn new(chart: MetricChart, order: usize) -> Result<Self> {
        let orders = vec![order; chart.dim()];
        Self::with_orders(chart, &orders)
    }

    pub fn with_orders(chart: MetricChart, orders: &[usize]) -> Result<Self> {
        if orders.len() != chart.dim() {
            return Err(Error::DimensionMismatch(orders.len(), chart.dim()));
        }
        let mut axes_rules: Vec<Vec<(f64, f64)>> = Vec::with_capacity(orders.len());
        for (axis, &m) in chart.domain().axes.iter().zip(orders) {
            let m = NonZeroUsize::new(m).ok_or_else(|| {
                Error::InvalidParameter("quadrature order must be positive".into())
            })?;
            let rule: Vec<(f64, f64)> = match axis.kind {
                AxisKind::Interval => {
                    let half = 0.5 * axis.length();
                    let mid = 0.5 * (axis.lo + axis.hi);
                    GaussLegendre::new(m)
                        .as_node_weight_pairs()
                        .iter()
                        .map(|&(x, w)| (mid + half * x, half * w))
                        .collect()
                }
                AxisKind::Periodic => {
                    let h = axis.length() / m.get() as f64;
                    (0..m.get())
                        .map(|i| (axis.lo + (i as f64 + 0.5) * h, h))
                        .collect()
                }
            };
            axes_rules.push(rule);
        }
        let total: usize = axes_rules.iter().map(Vec::len).product();
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let n = axes_rules.len();
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            nodes.push((0..n).map(|a| axes_rules[a][idx[a]].0).collect());
            weights.push((0..n).map(|a| axes_rules[a][idx[a]].1).product());
            for a in (0..n).rev() {
                idx[a] += 1;
                if idx[a] < axes_rules[a].len() {
                    break;
                }
                idx[a] = 0;
            }
        }
        Ok(Self {
            chart,
            orders: orders.to_vec(),
            nodes,
            weights,
            excluded_measure: 0.0,
        })
    }

    /// Same nodes and weights over a different metric on the same domain.
    pub fn with_chart(&self, chart: MetricChart) -> Self {
        Self {
            chart,
            ..self.clone()
        }
    }

    pub fn chart(&self) -> &MetricChart {
        &self.chart
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// Largest per-axis order.
    pub fn order(&self) -> usize {
        self.orders.iter().copied().max().unwrap_or(0)
    }

    /// Volume fraction left out of the node set. Gauss–Legendre nodes are
    /// interior, so only a null set (poles, seams) is omitted.
    pub fn excluded_measure(&self) -> f64 {
        self.excluded_measure
    }

    /// Smallest distance from a node to the boundary of an interval axis.
    pub fn boundary_clearance(&self) -> f64 {
        let axes = &self.chart.domain().axes;
        self.nodes
            .iter()
            .flat_map(|x| {
                axes.iter()
                    .zip(x)
                    .filter(|(a, _)| a.kind == AxisKind::Interval)
                    .map(|(a, &xi)| (xi - a.lo).min(a.hi - xi))
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn density(&self, x: &[f64]) -> Result<f64> {
        Ok(self.chart.point(x)?.volume_density())
    }

    /// Evaluates `f` at every node in parallel, keeping node order.
    pub fn map_nodes<T: Send>(&self, f: impl Fn(&[f64]) -> Result<T> + Sync) -> Result<Vec<T>> {
        self.nodes
            .par_iter()
            .map(|x| f(x).map_err(|e| e.at_node(x)))
            .collect()
    }

    /// `Σ w_i v_i` in node order.
    pub fn weighted_sum(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// `∫ f μ_g`. Nodes are evaluated in parallel; the sum runs in node order
    /// so results do not depend on the thread count.
    pub fn integrate(&self, f: impl Fn(&PointGeometry) -> Result<f64> + Sync) -> Result<f64> {
        let values = self.map_nodes(|x| {
            let geom = self.chart.point(x)?;
            Ok(f(&geom)? * geom.volume_density())
        })?;
        Ok(self.weighted_sum(&values))
    }

    pub fn volume(&self) -> Result<f64> {
        self.integrate(|_| Ok(1.0))
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::geometry::Manifold;

    #[test]
    fn sphere_volumes() {
        // |S^n(r)| = 2π^{(n+1)/2} r^n / Γ((n+1)/2)
        let expected = [(2, 4.0 * PI), (3, 2.0 * PI * PI), (4, 8.0 * PI * PI / 3.0)];
        for (n, v) in expected {
            let atlas = QuadratureAtlas::new(Manifold::sphere(n, 1.0).chart(), 12).unwrap();
            assert!((atlas.volume().unwrap() - v).abs() < 1e-10 * v, "n={n}");
        }
        let atlas = QuadratureAtlas::new(Manifold::sphere(2, 2.0).chart(), 12).unwrap();
        assert!((atlas.volume().unwrap() - 16.0 * PI).abs() < 1e-9);
        assert!(atlas.boundary_clearance() > 1e-3);
        assert_eq!(atlas.excluded_measure(), 0.0);
    }

    #[test]
    fn torus_volume_and_determinism() {
        let atlas =
            QuadratureAtlas::new(Manifold::flat_torus(&[1.0, 2.0, 3.0]).chart(), 5).unwrap();
        assert_eq!(atlas.len(), 125);
        assert!((atlas.volume().unwrap() - 6.0).abs() < 1e-12);
        let a = atlas
            .integrate(|g| Ok(g.point()[0].sin() + g.point()[2]))
            .unwrap();
        let b = atlas
            .integrate(|g| Ok(g.point()[0].sin() + g.point()[2]))
            .unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
