use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;

use super::chart::{ScalarField, SymmetricField};
use super::point::PointGeometry;
use crate::basis::binomial;
use crate::double_forms::{metric_power, DoubleForm};
use crate::error::{Error, Result};
use crate::invariants::lovelock_tensor;
use crate::jet::Jet;
use crate::sampling::Seeds;

type Evaluator = dyn Fn(&PointGeometry) -> Result<DoubleForm> + Send + Sync;

/// Section of `Λ^p ⊗ Λ^q`, evaluated in the orthonormal frame of each point.
#[derive(Clone)]
pub struct FormField {
    n: usize,
    p: usize,
    q: usize,
    eval: Arc<Evaluator>,
}

impl fmt::Debug for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormField(n={}, ({},{}))", self.n, self.p, self.q)
    }
}

/// Symmetric chart-component matrix of a field at a plain point.
pub fn sample_symmetric(field: &dyn SymmetricField, x: &[f64]) -> DMatrix<f64> {
    let n = field.dim();
    let comps = field.components(&Jet::values(x));
    DMatrix::from_fn(n, n, |i, j| comps[i * n + j].v)
}

pub fn sample_scalar(field: &dyn ScalarField, x: &[f64]) -> f64 {
    field.value(&Jet::values(x)).v
}

impl FormField {
    pub fn new(
        n: usize,
        p: usize,
        q: usize,
        eval: impl Fn(&PointGeometry) -> Result<DoubleForm> + Send + Sync + 'static,
    ) -> Self {
        Self {
            n,
            p,
            q,
            eval: Arc::new(eval),
        }
    }

    /// Field given by coordinate components `ω(∂_I, ∂_J)`.
    pub fn from_coordinates(
        n: usize,
        p: usize,
        q: usize,
        f: impl Fn(&[f64]) -> DoubleForm + Send + Sync + 'static,
    ) -> Self {
        Self::new(n, p, q, move |geom| geom.to_frame(&f(geom.point())))
    }

    /// Seeded trigonometric polynomial with frequencies in `{−1, 0, 1}` per
    /// coordinate, periodic with period `2π` in every coordinate.
    pub fn random_trig(n: usize, p: usize, q: usize, seed: u64) -> Self {
        let mut rng = Seeds::new(seed).child("trig_form_field").rng();
        let len = binomial(n, p) * binomial(n, q);
        let modes: Vec<(Vec<f64>, f64, f64, f64)> = (0..len * 3)
            .map(|_| {
                let k: Vec<f64> = (0..n).map(|_| rng.gen_range(-1..=1) as f64).collect();
                (
                    k,
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect();
        Self::from_coordinates(n, p, q, move |x| {
            let mut coeffs = vec![0.0; len];
            for (idx, (k, c, s, b)) in modes.iter().enumerate() {
                let phase: f64 = k.iter().zip(x).map(|(ki, xi)| ki * xi).sum();
                coeffs[idx % len] += b + c * phase.cos() + s * phase.sin();
            }
            DoubleForm::from_coeffs(n, p, q, coeffs)
                .expect("coefficient count matches the bidegree")
        })
    }

    pub fn constant(form: DoubleForm) -> Self {
        let (n, p, q) = (form.n(), form.p(), form.q());
        Self::new(n, p, q, move |_| Ok(form.clone()))
    }

    pub fn metric(n: usize) -> Self {
        Self::constant(DoubleForm::metric(n))
    }

    pub fn metric_power(n: usize, m: usize) -> Self {
        Self::constant(metric_power(n, m))
    }

    pub fn riemann(n: usize) -> Self {
        Self::new(n, 2, 2, |geom| Ok(geom.riemann()?.into_form()))
    }

    /// `T_2k` of the chart metric.
    pub fn lovelock(n: usize, k: usize) -> Self {
        Self::new(n, 1, 1, move |geom| {
            Ok(lovelock_tensor(&geom.riemann()?, k)?.into_form())
        })
    }

    pub fn symmetric(field: Arc<dyn SymmetricField>) -> Self {
        let n = field.dim();
        Self::new(n, 1, 1, move |geom| {
            Ok(geom.symmetric_to_frame(&sample_symmetric(field.as_ref(), geom.point())))
        })
    }

    pub fn scalar(field: Arc<dyn ScalarField>) -> Self {
        let n = field.dim();
        Self::new(n, 0, 0, move |geom| {
            Ok(DoubleForm::scalar(
                n,
                sample_scalar(field.as_ref(), geom.point()),
            ))
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn eval(&self, geom: &PointGeometry) -> Result<DoubleForm> {
        let w = (self.eval)(geom)?;
        if w.n() != self.n {
            return Err(Error::DimensionMismatch(w.n(), self.n));
        }
        if w.bidegree() != (self.p, self.q) {
            return Err(Error::BidegreeMismatch(w.p(), w.q(), self.p, self.q));
        }
        Ok(w)
    }

    /// Coordinate components at the point.
    pub fn eval_coordinates(&self, geom: &PointGeometry) -> Result<DoubleForm> {
        geom.to_coordinates(&self.eval(geom)?)
    }

    /// Pointwise image under a bidegree-changing map.
    pub fn map(
        &self,
        p: usize,
        q: usize,
        f: impl Fn(DoubleForm) -> Result<DoubleForm> + Send + Sync + 'static,
    ) -> Self {
        let inner = self.clone();
        Self::new(self.n, p, q, move |geom| f(inner.eval(geom)?))
    }

    pub fn hodge_star(&self) -> Self {
        self.map(self.n - self.p, self.n - self.q, |w| Ok(w.hodge_star()))
    }

    pub fn contract(&self) -> Result<Self> {
        if self.p == 0 || self.q == 0 {
            return Err(Error::DegreeOutOfRange(
                "contraction needs p, q >= 1".into(),
            ));
        }
        Ok(self.map(self.p - 1, self.q - 1, |w| w.contract()))
    }

    pub fn wedge(&self, other: &FormField) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let (a, b) = (self.clone(), other.clone());
        let (p, q) = (
            (self.p + other.p).min(self.n),
            (self.q + other.q).min(self.n),
        );
        Ok(Self::new(self.n, p, q, move |geom| {
            a.eval(geom)?.wedge(&b.eval(geom)?)
        }))
    }

    pub fn add(&self, other: &FormField) -> Result<Self> {
        if (self.n, self.p, self.q) != (other.n, other.p, other.q) {
            return Err(Error::BidegreeMismatch(self.p, self.q, other.p, other.q));
        }
        let (a, b) = (self.clone(), other.clone());
        Ok(Self::new(self.n, self.p, self.q, move |geom| {
            Ok(a.eval(geom)? + b.eval(geom)?)
        }))
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(self.p, self.q, move |w| Ok(w.scaled(s)))
    }
}
