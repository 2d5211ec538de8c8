//! Builtin manifolds. Each is a chart together with a smooth map `Y` into
//! some `ℝ^N` whose components are products of per-axis trigonometric
//! factors. Metrics are pulled back from an ambient symmetric field
//! `A(Y)`, and deformation directions and scalar fields are built from
//! global functions of `Y`, so they are smooth on the closed manifold and
//! not only on the chart.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::chart::{Axis, MetricChart, ParamBox, ScalarField, SymmetricField};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::sampling::Seeds;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Trig {
    Sin(f64),
    Cos(f64),
}

impl Trig {
    fn eval(self, x: &Jet) -> Jet {
        match self {
            Trig::Sin(w) => x.scale(w).sin(),
            Trig::Cos(w) => x.scale(w).cos(),
        }
    }

    fn derivative(self, x: &Jet) -> Jet {
        match self {
            Trig::Sin(w) => x.scale(w).cos().scale(w),
            Trig::Cos(w) => x.scale(w).sin().scale(-w),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Monomial {
    scale: f64,
    factors: Vec<(usize, Trig)>,
}

/// Smooth map from the chart into `ℝ^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    n: usize,
    coords: Vec<Monomial>,
}

impl Embedding {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len()
    }

    /// Round sphere of radius `r` in hyperspherical coordinates
    /// `(θ_1, …, θ_{n−1}, φ)`.
    pub fn sphere(n: usize, r: f64) -> Self {
        let mut coords = Vec::with_capacity(n + 1);
        for a in 0..n {
            let mut factors: Vec<(usize, Trig)> = (0..a).map(|b| (b, Trig::Sin(1.0))).collect();
            factors.push((a, Trig::Cos(1.0)));
            coords.push(Monomial { scale: r, factors });
        }
        let mut last: Vec<(usize, Trig)> = (0..n - 1).map(|b| (b, Trig::Sin(1.0))).collect();
        last.push((n - 1, Trig::Sin(1.0)));
        coords.push(Monomial {
            scale: r,
            factors: last,
        });
        Self { n, coords }
    }

    /// Flat torus with the given periods, as a product of round circles.
    pub fn torus(periods: &[f64]) -> Self {
        let mut coords = Vec::with_capacity(2 * periods.len());
        for (a, &l) in periods.iter().enumerate() {
            let w = 2.0 * PI / l;
            coords.push(Monomial {
                scale: 1.0 / w,
                factors: vec![(a, Trig::Cos(w))],
            });
            coords.push(Monomial {
                scale: 1.0 / w,
                factors: vec![(a, Trig::Sin(w))],
            });
        }
        Self {
            n: periods.len(),
            coords,
        }
    }

    pub fn product(a: &Embedding, b: &Embedding) -> Self {
        let shifted = b.coords.iter().map(|m| Monomial {
            scale: m.scale,
            factors: m.factors.iter().map(|&(ax, t)| (ax + a.n, t)).collect(),
        });
        Self {
            n: a.n + b.n,
            coords: a.coords.iter().cloned().chain(shifted).collect(),
        }
    }

    /// `Y(x)` and `∂_i Y(x)` as jets; `dy[i][β] = ∂_i Y_β`.
    pub fn eval(&self, x: &[Jet]) -> (Vec<Jet>, Vec<Vec<Jet>>) {
        let dim = x[0].dim();
        let mut y = Vec::with_capacity(self.coords.len());
        let mut dy = vec![Vec::with_capacity(self.coords.len()); self.n];
        for m in &self.coords {
            let vals: Vec<Jet> = m.factors.iter().map(|&(a, t)| t.eval(&x[a])).collect();
            let mut prod = Jet::constant(dim, m.scale);
            for v in &vals {
                prod = prod * *v;
            }
            y.push(prod);
            for (i, dyi) in dy.iter_mut().enumerate() {
                let mut d = Jet::constant(dim, 0.0);
                for (slot, &(a, t)) in m.factors.iter().enumerate() {
                    if a != i {
                        continue;
                    }
                    let mut term = Jet::constant(dim, m.scale);
                    for (other, v) in vals.iter().enumerate() {
                        term = term
                            * if other == slot {
                                t.derivative(&x[a])
                            } else {
                                *v
                            };
                    }
                    d += term;
                }
                dyi.push(d);
            }
        }
        (y, dy)
    }

    pub fn eval_values(&self, x: &[f64]) -> Vec<f64> {
        self.eval(&Jet::values(x))
            .0
            .into_iter()
            .map(|j| j.v)
            .collect()
    }
}

/// Quadratic polynomial `c + b·Y + Yᵀ Q Y` on the ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientPolynomial {
    pub constant: f64,
    pub linear: Vec<f64>,
    pub quadratic: Vec<Vec<f64>>,
}

impl AmbientPolynomial {
    pub fn constant(dim: usize, c: f64) -> Self {
        Self {
            constant: c,
            linear: vec![0.0; dim],
            quadratic: vec![vec![0.0; dim]; dim],
        }
    }

    /// Coefficients uniform in `[-1, 1]`, scaled by `amplitude / scale^deg`
    /// so that values stay of order `amplitude` for `|Y| ≲ scale`.
    pub fn random(rng: &mut impl Rng, dim: usize, amplitude: f64, scale: f64) -> Self {
        let linear = (0..dim)
            .map(|_| amplitude * rng.gen_range(-1.0..1.0) / scale)
            .collect();
        let quadratic = (0..dim)
            .map(|_| {
                (0..dim)
                    .map(|_| amplitude * rng.gen_range(-1.0..1.0) / (scale * scale))
                    .collect()
            })
            .collect();
        Self {
            constant: 0.0,
            linear,
            quadratic,
        }
    }

    pub fn eval(&self, y: &[Jet]) -> Jet {
        let dim = y[0].dim();
        let mut acc = Jet::constant(dim, self.constant);
        for (b, yb) in self.linear.iter().zip(y) {
            if *b != 0.0 {
                acc.add_scaled(yb, *b);
            }
        }
        for (row, yi) in self.quadratic.iter().zip(y) {
            let mut lin = Jet::constant(dim, 0.0);
            for (q, yj) in row.iter().zip(y) {
                if *q != 0.0 {
                    lin.add_scaled(yj, *q);
                }
            }
            acc.add_product(yi, &lin);
        }
        acc
    }
}

/// Ambient symmetric field `A(Y) = e^{2u(Y)} I + s·w wᵀ + P(Y)` where
/// `P` is an optional symmetric matrix of polynomials.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientField {
    pub conformal: Option<AmbientPolynomial>,
    pub base_scale: f64,
    pub rank_one: Option<(f64, Vec<f64>)>,
    pub entries: Vec<(usize, usize, AmbientPolynomial)>,
}

impl AmbientField {
    pub fn euclidean() -> Self {
        Self {
            conformal: None,
            base_scale: 1.0,
            rank_one: None,
            entries: Vec::new(),
        }
    }

    pub fn zero() -> Self {
        Self {
            conformal: None,
            base_scale: 0.0,
            rank_one: None,
            entries: Vec::new(),
        }
    }
}

/// Pullback `Σ A_{βγ}(Y) ∂_iY_β ∂_jY_γ` of an ambient field.
#[derive(Debug, Clone)]
pub struct PulledBackField {
    pub embedding: Arc<Embedding>,
    pub ambient: AmbientField,
}

impl SymmetricField for PulledBackField {
    fn dim(&self) -> usize {
        self.embedding.dim()
    }

    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        let n = self.embedding.dim();
        let dim = x[0].dim();
        let (y, dy) = self.embedding.eval(x);
        let mut out = vec![Jet::constant(dim, 0.0); n * n];
        let a = &self.ambient;

        let iso = match &a.conformal {
            Some(u) => u.eval(&y).scale(2.0).exp().scale(a.base_scale),
            None => Jet::constant(dim, a.base_scale),
        };
        let projected: Option<(f64, Vec<Jet>)> = a.rank_one.as_ref().map(|(s, w)| {
            let proj = (0..n)
                .map(|i| {
                    let mut acc = Jet::constant(dim, 0.0);
                    for (wb, d) in w.iter().zip(&dy[i]) {
                        acc.add_scaled(d, *wb);
                    }
                    acc
                })
                .collect();
            (*s, proj)
        });
        let entries: Vec<(usize, usize, Jet)> = a
            .entries
            .iter()
            .map(|(b, c, p)| (*b, *c, p.eval(&y)))
            .collect();

        for i in 0..n {
            for j in i..n {
                let mut gram = Jet::constant(dim, 0.0);
                if a.base_scale != 0.0 {
                    for (u, v) in dy[i].iter().zip(&dy[j]) {
                        gram.add_product(u, v);
                    }
                }
                let mut gij = Jet::constant(dim, 0.0);
                gij.add_product(&iso, &gram);
                if let Some((s, proj)) = &projected {
                    let mut t = Jet::constant(dim, 0.0);
                    t.add_product(&proj[i], &proj[j]);
                    gij.add_scaled(&t, *s);
                }
                for (b, c, e) in &entries {
                    let mut t = Jet::constant(dim, 0.0);
                    t.add_product(&dy[i][*b], &dy[j][*c]);
                    if b != c {
                        t.add_product(&dy[i][*c], &dy[j][*b]);
                    }
                    gij.add_product(e, &t);
                }
                out[i * n + j] = gij;
                out[j * n + i] = gij;
            }
        }
        out
    }
}

/// Block-diagonal metric on a product chart.
#[derive(Debug, Clone)]
pub struct ProductField {
    pub first: Arc<dyn SymmetricField>,
    pub second: Arc<dyn SymmetricField>,
}

impl SymmetricField for ProductField {
    fn dim(&self) -> usize {
        self.first.dim() + self.second.dim()
    }

    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        let (na, n) = (self.first.dim(), self.dim());
        let dim = x[0].dim();
        let a = self.first.components(&x[..na]);
        let b = self.second.components(&x[na..]);
        let mut out = vec![Jet::constant(dim, 0.0); n * n];
        for i in 0..na {
            for j in 0..na {
                out[i * n + j] = a[i * na + j];
            }
        }
        let nb = n - na;
        for i in 0..nb {
            for j in 0..nb {
                out[(na + i) * n + na + j] = b[i * nb + j];
            }
        }
        out
    }
}

/// Pointwise `f · S` for a scalar field `f` and symmetric field `S`.
#[derive(Debug, Clone)]
pub struct ScaledField {
    pub factor: Arc<dyn ScalarField>,
    pub field: Arc<dyn SymmetricField>,
}

impl SymmetricField for ScaledField {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        let f = self.factor.value(x);
        self.field
            .components(x)
            .into_iter()
            .map(|c| c * f)
            .collect()
    }
}

/// `first + t · second`.
#[derive(Debug, Clone)]
pub struct SumField {
    pub first: Arc<dyn SymmetricField>,
    pub second: Arc<dyn SymmetricField>,
    pub t: f64,
}

impl SymmetricField for SumField {
    fn dim(&self) -> usize {
        self.first.dim()
    }

    fn components(&self, x: &[Jet]) -> Vec<Jet> {
        let mut a = self.first.components(x);
        if self.t != 0.0 {
            for (c, d) in a.iter_mut().zip(self.second.components(x)) {
                c.add_scaled(&d, self.t);
            }
        }
        a
    }
}

/// Scalar field `P(Y(x))`.
#[derive(Debug, Clone)]
pub struct AmbientScalar {
    pub embedding: Arc<Embedding>,
    pub polynomial: AmbientPolynomial,
}

impl ScalarField for AmbientScalar {
    fn dim(&self) -> usize {
        self.embedding.dim()
    }

    fn value(&self, x: &[Jet]) -> Jet {
        self.polynomial.eval(&self.embedding.eval(x).0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantScalar {
    pub n: usize,
    pub value: f64,
}

impl ScalarField for ConstantScalar {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[Jet]) -> Jet {
        Jet::constant(x[0].dim(), self.value)
    }
}

/// `f + shift`.
#[derive(Debug, Clone)]
pub struct ShiftedScalar {
    pub field: Arc<dyn ScalarField>,
    pub shift: f64,
}

impl ScalarField for ShiftedScalar {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn value(&self, x: &[Jet]) -> Jet {
        self.field.value(x) + self.shift
    }
}

/// Catalog identifiers with parameters.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "id", rename_all = "snake_case", deny_unknown_fields)]
pub enum CatalogSpec {
    FlatTorus {
        periods: Vec<f64>,
    },
    Sphere {
        n: usize,
        r: f64,
    },
    Product {
        first: Box<CatalogSpec>,
        second: Box<CatalogSpec>,
    },
    ConformalFlat {
        n: usize,
        amplitude: f64,
        seed: u64,
    },
    PerturbedSphere {
        n: usize,
        r: f64,
        amplitude: f64,
        seed: u64,
    },
}

impl CatalogSpec {
    pub fn dim(&self) -> usize {
        match self {
            CatalogSpec::FlatTorus { periods } => periods.len(),
            CatalogSpec::Sphere { n, .. }
            | CatalogSpec::ConformalFlat { n, .. }
            | CatalogSpec::PerturbedSphere { n, .. } => *n,
            CatalogSpec::Product { first, second } => first.dim() + second.dim(),
        }
    }

    /// Range checks on the parameters; all problems are collected.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        self.validate_into(&mut errs);
        let n = self.dim();
        if n == 0 || n > crate::MAX_DIM {
            errs.push(format!("dimension {n} outside 1..={}", crate::MAX_DIM));
        }
        errs
    }

    fn validate_into(&self, errs: &mut Vec<String>) {
        match self {
            CatalogSpec::FlatTorus { periods } => {
                if periods.is_empty() {
                    errs.push("flat_torus needs at least one period".into());
                }
                if periods.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
                    errs.push("flat_torus periods must be positive".into());
                }
            }
            CatalogSpec::Sphere { n, r } => {
                if *n < 2 {
                    errs.push(format!("sphere dimension must be at least 2, got {n}"));
                }
                if !(r.is_finite() && *r > 0.0) {
                    errs.push("sphere radius must be positive".into());
                }
            }
            CatalogSpec::Product { first, second } => {
                first.validate_into(errs);
                second.validate_into(errs);
            }
            CatalogSpec::ConformalFlat { n, amplitude, .. } => {
                if *n == 0 {
                    errs.push("conformal_flat dimension must be positive".into());
                }
                if !amplitude.is_finite() || amplitude.abs() > 1.0 {
                    errs.push("conformal_flat amplitude must lie in [-1, 1]".into());
                }
            }
            CatalogSpec::PerturbedSphere {
                n, r, amplitude, ..
            } => {
                if *n < 2 {
                    errs.push(format!(
                        "perturbed_sphere dimension must be at least 2, got {n}"
                    ));
                }
                if !(r.is_finite() && *r > 0.0) {
                    errs.push("perturbed_sphere radius must be positive".into());
                }
                if !(amplitude.is_finite() && (0.0..=0.5).contains(amplitude)) {
                    errs.push("perturbed_sphere amplitude must lie in [0, 0.5] to keep the metric positive".into());
                }
            }
        }
    }

    pub fn build(&self) -> Result<Manifold> {
        let errs = self.validate();
        if !errs.is_empty() {
            return Err(Error::InvalidParameter(errs.join("; ")));
        }
        Ok(match self {
            CatalogSpec::FlatTorus { periods } => Manifold::flat_torus(periods),
            CatalogSpec::Sphere { n, r } => Manifold::sphere(*n, *r),
            CatalogSpec::Product { first, second } => {
                Manifold::product(&first.build()?, &second.build()?)
            }
            CatalogSpec::ConformalFlat { n, amplitude, seed } => {
                Manifold::conformal_flat(*n, *amplitude, *seed)
            }
            CatalogSpec::PerturbedSphere {
                n,
                r,
                amplitude,
                seed,
            } => Manifold::perturbed_sphere(*n, *r, *amplitude, *seed),
        })
    }
}

/// A closed manifold described by one chart and an embedding.
#[derive(Clone)]
pub struct Manifold {
    name: String,
    domain: ParamBox,
    embedding: Arc<Embedding>,
    metric: Arc<dyn SymmetricField>,
    /// Radius scale of the embedding, used to normalize random fields.
    scale: f64,
}

impl fmt::Debug for Manifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Manifold")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

fn sphere_box(n: usize) -> ParamBox {
    let mut axes: Vec<Axis> = (0..n - 1).map(|_| Axis::interval(0.0, PI)).collect();
    axes.push(Axis::periodic(2.0 * PI));
    ParamBox { axes }
}

impl Manifold {
    pub fn flat_torus(periods: &[f64]) -> Self {
        let embedding = Arc::new(Embedding::torus(periods));
        let metric = Arc::new(PulledBackField {
            embedding: embedding.clone(),
            ambient: AmbientField::euclidean(),
        });
        let scale = periods.iter().cloned().fold(0.0, f64::max) / (2.0 * PI);
        Self {
            name: format!("flat_torus({})", periods.len()),
            domain: ParamBox {
                axes: periods.iter().map(|&l| Axis::periodic(l)).collect(),
            },
            embedding,
            metric,
            scale,
        }
    }

    pub fn sphere(n: usize, r: f64) -> Self {
        let embedding = Arc::new(Embedding::sphere(n, r));
        let metric = Arc::new(PulledBackField {
            embedding: embedding.clone(),
            ambient: AmbientField::euclidean(),
        });
        Self {
            name: format!("sphere({n}, {r})"),
            domain: sphere_box(n),
            embedding,
            metric,
            scale: r,
        }
    }

    pub fn product(a: &Manifold, b: &Manifold) -> Self {
        Self {
            name: format!("{}x{}", a.name, b.name),
            domain: a.domain.concat(&b.domain),
            embedding: Arc::new(Embedding::product(&a.embedding, &b.embedding)),
            metric: Arc::new(ProductField {
                first: a.metric.clone(),
                second: b.metric.clone(),
            }),
            scale: a.scale.max(b.scale),
        }
    }

    /// `e^{2u} δ` on the `2π`-periodic torus, `u` a seeded trigonometric
    /// polynomial of size `amplitude`.
    pub fn conformal_flat(n: usize, amplitude: f64, seed: u64) -> Self {
        let periods = vec![2.0 * PI; n];
        let embedding = Arc::new(Embedding::torus(&periods));
        let mut rng = Seeds::new(seed).child("conformal_flat").rng();
        let u = AmbientPolynomial::random(&mut rng, embedding.ambient_dim(), amplitude, 1.0);
        let ambient = AmbientField {
            conformal: Some(u),
            ..AmbientField::euclidean()
        };
        Self {
            name: format!("conformal_flat({n}, {amplitude}, {seed})"),
            domain: ParamBox {
                axes: periods.iter().map(|&l| Axis::periodic(l)).collect(),
            },
            metric: Arc::new(PulledBackField {
                embedding: embedding.clone(),
                ambient,
            }),
            embedding,
            scale: 1.0,
        }
    }

    /// Round sphere metric deformed to `e^{2a u(Y)} I + a w wᵀ` in the
    /// ambient space, with `u` a seeded quadratic and `w` a seeded unit
    /// vector. Positive definite for every `a ≥ 0`.
    pub fn perturbed_sphere(n: usize, r: f64, amplitude: f64, seed: u64) -> Self {
        let embedding = Arc::new(Embedding::sphere(n, r));
        let seeds = Seeds::new(seed).child("perturbed_sphere");
        let mut rng = seeds.rng();
        let u = AmbientPolynomial::random(&mut rng, n + 1, amplitude, r);
        let mut w: Vec<f64> = (0..=n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        w.iter_mut().for_each(|v| *v /= norm);
        let ambient = AmbientField {
            conformal: Some(u),
            base_scale: 1.0,
            rank_one: Some((amplitude, w)),
            entries: Vec::new(),
        };
        Self {
            name: format!("perturbed_sphere({n}, {r}, {amplitude}, {seed})"),
            domain: sphere_box(n),
            metric: Arc::new(PulledBackField {
                embedding: embedding.clone(),
                ambient,
            }),
            embedding,
            scale: r,
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

    pub fn embedding(&self) -> &Arc<Embedding> {
        &self.embedding
    }

    pub fn metric_field(&self) -> Arc<dyn SymmetricField> {
        self.metric.clone()
    }

    pub fn chart(&self) -> MetricChart {
        MetricChart::new(self.name.clone(), self.domain.clone(), self.metric.clone())
            .expect("catalog domains match their metrics")
    }

    /// Seeded smooth symmetric field: pullback of a random ambient field
    /// with polynomial entries of size `amplitude`.
    pub fn random_symmetric_field(&self, amplitude: f64, seed: u64) -> Arc<dyn SymmetricField> {
        let dim = self.embedding.ambient_dim();
        let mut rng = Seeds::new(seed).child("symmetric_field").rng();
        let mut entries = Vec::new();
        for b in 0..dim {
            for c in b..dim {
                entries.push((
                    b,
                    c,
                    AmbientPolynomial {
                        constant: amplitude * rng.gen_range(-1.0..1.0),
                        ..AmbientPolynomial::random(&mut rng, dim, amplitude, self.scale)
                    },
                ));
            }
        }
        Arc::new(PulledBackField {
            embedding: self.embedding.clone(),
            ambient: AmbientField {
                entries,
                ..AmbientField::zero()
            },
        })
    }

    /// Seeded smooth scalar field `P(Y)` with `P` a random quadratic plus
    /// the given constant.
    pub fn random_scalar_field(
        &self,
        constant: f64,
        amplitude: f64,
        seed: u64,
    ) -> Arc<dyn ScalarField> {
        let mut rng = Seeds::new(seed).child("scalar_field").rng();
        let mut polynomial = AmbientPolynomial::random(
            &mut rng,
            self.embedding.ambient_dim(),
            amplitude,
            self.scale,
        );
        polynomial.constant = constant;
        Arc::new(AmbientScalar {
            embedding: self.embedding.clone(),
            polynomial,
        })
    }

    /// Linear function `b·Y` of the embedding coordinates.
    pub fn linear_scalar_field(&self, coefficients: &[f64]) -> Arc<dyn ScalarField> {
        let dim = self.embedding.ambient_dim();
        let mut polynomial = AmbientPolynomial::constant(dim, 0.0);
        for (l, c) in polynomial.linear.iter_mut().zip(coefficients) {
            *l = *c;
        }
        Arc::new(AmbientScalar {
            embedding: self.embedding.clone(),
            polynomial,
        })
    }

    /// `f · g` for the manifold's own metric.
    pub fn conformal_direction(&self, f: Arc<dyn ScalarField>) -> Arc<dyn SymmetricField> {
        Arc::new(ScaledField {
            factor: f,
            field: self.metric.clone(),
        })
    }
}
