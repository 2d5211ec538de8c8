use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::functional::{
    first_variation_report, variation_integrals, FdSteps, MetricDeformation, VariationReport,
};
use super::quadrature::QuadratureAtlas;
use crate::error::Result;
use crate::geometry::{CatalogSpec, Manifold, SymmetricField};

/// Deformation direction built from a catalog manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DirectionSpec {
    /// `h = g`.
    Metric,
    /// `h = f g` with `f` a seeded smooth function.
    Conformal { seed: u64 },
    /// Seeded smooth symmetric field.
    RandomSymmetric { seed: u64 },
}

impl DirectionSpec {
    pub fn build(&self, m: &Manifold) -> Arc<dyn SymmetricField> {
        match *self {
            Self::Metric => m.metric_field(),
            Self::Conformal { seed } => {
                m.conformal_direction(m.random_scalar_field(0.5, 0.5, seed))
            }
            Self::RandomSymmetric { seed } => m.random_symmetric_field(0.3, seed),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Metric => "h = g".into(),
            Self::Conformal { seed } => format!("h = f g (seed {seed})"),
            Self::RandomSymmetric { seed } => format!("random symmetric h (seed {seed})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCase {
    pub manifold: CatalogSpec,
    pub k: usize,
    pub direction: DirectionSpec,
    pub quadrature_order: usize,
}

impl GridCase {
    pub fn run(&self, steps: FdSteps, tolerance: f64) -> Result<VariationReport> {
        let m = self.manifold.build()?;
        let atlas = QuadratureAtlas::new(m.chart(), self.quadrature_order)?;
        let def = MetricDeformation::general(
            m.chart(),
            self.direction.build(&m),
            self.direction.label(),
        )?;
        let integrals = variation_integrals(&def, &atlas, self.k, steps)?;
        Ok(first_variation_report(&def, &integrals, tolerance))
    }
}

/// Default per-axis quadrature order by dimension.
pub fn default_order(n: usize) -> usize {
    match n {
        0..=3 => 16,
        4 => 10,
        _ => 6,
    }
}

/// First-variation cases over round spheres, a product with a flat factor and
/// a conformally flat torus.
pub fn first_variation_grid() -> Vec<GridCase> {
    use DirectionSpec::*;
    let sphere = |n| CatalogSpec::Sphere { n, r: 1.0 };
    let s2t2 = CatalogSpec::Product {
        first: Box::new(sphere(2)),
        second: Box::new(CatalogSpec::FlatTorus {
            periods: vec![6.0, 7.0],
        }),
    };
    let conformal_t4 = CatalogSpec::ConformalFlat {
        n: 4,
        amplitude: 0.2,
        seed: 4,
    };
    let case = |manifold: &CatalogSpec, k, direction, quadrature_order| GridCase {
        manifold: manifold.clone(),
        k,
        direction,
        quadrature_order,
    };
    vec![
        case(&sphere(3), 1, Metric, 12),
        case(&sphere(3), 1, Conformal { seed: 1 }, 16),
        case(&sphere(3), 1, RandomSymmetric { seed: 1 }, 16),
        case(&sphere(4), 1, Conformal { seed: 2 }, 10),
        case(&sphere(4), 1, RandomSymmetric { seed: 2 }, 10),
        case(&sphere(4), 2, RandomSymmetric { seed: 2 }, 10),
        case(&sphere(5), 1, Metric, 6),
        case(&sphere(5), 2, Metric, 6),
        case(&s2t2, 1, Conformal { seed: 3 }, 10),
        case(&s2t2, 1, RandomSymmetric { seed: 3 }, 10),
        case(&s2t2, 2, RandomSymmetric { seed: 3 }, 10),
        case(&conformal_t4, 1, RandomSymmetric { seed: 5 }, 12),
        case(&conformal_t4, 2, RandomSymmetric { seed: 5 }, 12),
    ]
}
