//! Covariant derivatives of form fields and the second Bianchi operators.
//!
//! Derivatives are taken of coordinate components by 4th-order central
//! differences, corrected with Christoffel symbols, then expressed in the
//! orthonormal frame at the base point.

use std::collections::HashMap;

use super::chart::{MetricChart, StepRule};
use super::field::FormField;
use super::point::PointGeometry;
use crate::basis::{basis, indices, Mask};
use crate::double_forms::DoubleForm;
use crate::error::{Error, Result};

const STENCIL: [(i32, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];

/// Finite-difference stencil around a base point with cached point data.
pub struct JetStencil<'c> {
    chart: &'c MetricChart,
    base: Vec<f64>,
    steps: Vec<f64>,
    geometry: HashMap<Vec<i32>, PointGeometry>,
}

impl<'c> JetStencil<'c> {
    /// Stencil supporting nested second derivatives (offsets up to `4h`).
    pub fn new(chart: &'c MetricChart, x: &[f64], rule: StepRule) -> Result<Self> {
        if x.len() != chart.dim() {
            return Err(Error::DimensionMismatch(x.len(), chart.dim()));
        }
        let steps: Vec<f64> = x.iter().map(|&xi| rule.step(xi)).collect();
        let margin: Vec<f64> = steps.iter().map(|h| 4.0 * h).collect();
        if !chart.domain().contains_with_margin(x, &margin) {
            return Err(Error::OutOfDomain {
                point: x.to_vec(),
                margin: margin.iter().cloned().fold(0.0, f64::max),
            });
        }
        Ok(Self {
            chart,
            base: x.to_vec(),
            steps,
            geometry: HashMap::new(),
        })
    }

    pub fn with_default_steps(chart: &'c MetricChart, x: &[f64]) -> Result<Self> {
        Self::new(chart, x, StepRule::first_order_default())
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    /// Point data at `base + Σ offsets[a]·h_a·e_a`.
    pub fn geometry(&mut self, offsets: &[i32]) -> Result<&PointGeometry> {
        if !self.geometry.contains_key(offsets) {
            let y: Vec<f64> = self
                .base
                .iter()
                .zip(&self.steps)
                .zip(offsets)
                .map(|((b, h), &o)| b + o as f64 * h)
                .collect();
            let geom = self.chart.point(&y)?;
            self.geometry.insert(offsets.to_vec(), geom);
        }
        Ok(&self.geometry[offsets])
    }
}

/// Evaluates one field on a stencil, caching coordinate values.
struct Sampler<'s, 'c> {
    stencil: &'s mut JetStencil<'c>,
    field: &'s FormField,
    values: HashMap<Vec<i32>, DoubleForm>,
}

impl<'s, 'c> Sampler<'s, 'c> {
    fn new(stencil: &'s mut JetStencil<'c>, field: &'s FormField) -> Self {
        Self {
            stencil,
            field,
            values: HashMap::new(),
        }
    }

    fn value(&mut self, offsets: &[i32]) -> Result<DoubleForm> {
        if let Some(v) = self.values.get(offsets) {
            return Ok(v.clone());
        }
        let geom = self.stencil.geometry(offsets)?;
        let v = self.field.eval_coordinates(geom)?;
        self.values.insert(offsets.to_vec(), v.clone());
        Ok(v)
    }

    /// Coordinate `∇_a ω` for every `a`, at the given offset.
    fn nabla(&mut self, offsets: &[i32]) -> Result<Vec<DoubleForm>> {
        let n = self.stencil.dim();
        let mut out = Vec::with_capacity(n);
        for a in 0..n {
            let h = self.stencil.steps[a];
            let mut acc: Option<DoubleForm> = None;
            for &(s, w) in &STENCIL {
                let mut o = offsets.to_vec();
                o[a] += s;
                let v = self.value(&o)?.scaled(w / (12.0 * h));
                acc = Some(match acc {
                    None => v,
                    Some(a) => a + v,
                });
            }
            out.push(acc.expect("stencil is non-empty"));
        }
        let center = self.value(offsets)?;
        let geom = self.stencil.geometry(offsets)?;
        for (a, d) in out.iter_mut().enumerate() {
            *d -= &center.derivation(geom.connection(a))?;
        }
        Ok(out)
    }

    /// Coordinate `∇²_{b,a} ω = ∇_b(∇ω)(∂_a)`, indexed `[b·n + a]`.
    fn nabla2(&mut self) -> Result<Vec<DoubleForm>> {
        let n = self.stencil.dim();
        let zero = vec![0; n];
        let first = self.nabla(&zero)?;
        let mut out = Vec::with_capacity(n * n);
        for b in 0..n {
            let h = self.stencil.steps[b];
            let mut shifted = Vec::with_capacity(STENCIL.len());
            for &(s, w) in &STENCIL {
                let mut o = zero.clone();
                o[b] += s;
                shifted.push((w / (12.0 * h), self.nabla(&o)?));
            }
            let geom = self.stencil.geometry(&zero)?;
            let gamma_b = geom.connection(b).clone();
            for a in 0..n {
                let mut d = DoubleForm::zero(first[a].n(), first[a].p(), first[a].q());
                for (w, vals) in &shifted {
                    d += &vals[a].scaled(*w);
                }
                for (m, fm) in first.iter().enumerate() {
                    let c = gamma_b[(m, a)];
                    if c != 0.0 {
                        d -= &fm.scaled(c);
                    }
                }
                d -= &first[a].derivation(&gamma_b)?;
                out.push(d);
            }
        }
        Ok(out)
    }
}

/// `∇ω` in the orthonormal frame: `forms[c] = ∇_{e_c} ω`.
#[derive(Debug, Clone)]
pub struct CovariantDerivative {
    pub forms: Vec<DoubleForm>,
}

impl CovariantDerivative {
    /// `∇_v ω` for a frame vector `v`.
    pub fn along(&self, v: &[f64]) -> DoubleForm {
        let mut acc = self.forms[0].scaled(0.0);
        for (f, c) in self.forms.iter().zip(v) {
            acc += &f.scaled(*c);
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.forms
            .iter()
            .map(DoubleForm::max_abs)
            .fold(0.0, f64::max)
    }
}

/// `∇²ω` in the orthonormal frame: `forms[c·n + d] = ∇²_{e_c, e_d} ω`.
#[derive(Debug, Clone)]
pub struct SecondCovariantDerivative {
    pub n: usize,
    pub forms: Vec<DoubleForm>,
}

impl SecondCovariantDerivative {
    pub fn get(&self, c: usize, d: usize) -> &DoubleForm {
        &self.forms[c * self.n + d]
    }
}

fn frame_combination(geom: &PointGeometry, coordinate: &[DoubleForm]) -> Result<Vec<DoubleForm>> {
    let n = geom.dim();
    let e = geom.frame();
    let framed: Vec<DoubleForm> = coordinate
        .iter()
        .map(|w| geom.to_frame(w))
        .collect::<Result<_>>()?;
    Ok((0..n)
        .map(|c| {
            let mut acc = framed[0].scaled(0.0);
            for (a, f) in framed.iter().enumerate() {
                if e[(a, c)] != 0.0 {
                    acc += &f.scaled(e[(a, c)]);
                }
            }
            acc
        })
        .collect())
}

impl JetStencil<'_> {
    pub fn covariant_derivative(&mut self, field: &FormField) -> Result<CovariantDerivative> {
        check_field(self.chart, field)?;
        let zero = vec![0; self.dim()];
        let coordinate = Sampler::new(self, field).nabla(&zero)?;
        let geom = self.geometry(&zero)?;
        Ok(CovariantDerivative {
            forms: frame_combination(geom, &coordinate)?,
        })
    }

    pub fn second_covariant_derivative(
        &mut self,
        field: &FormField,
    ) -> Result<SecondCovariantDerivative> {
        check_field(self.chart, field)?;
        let n = self.dim();
        let zero = vec![0; n];
        let coordinate = Sampler::new(self, field).nabla2()?;
        let geom = self.geometry(&zero)?;
        let e = geom.frame();
        // Convert the inner slot first, then the outer one.
        let mut inner = Vec::with_capacity(n * n);
        for b in 0..n {
            inner.extend(frame_combination(geom, &coordinate[b * n..(b + 1) * n])?);
        }
        let mut forms = Vec::with_capacity(n * n);
        for c in 0..n {
            for d in 0..n {
                let mut acc = inner[d].scaled(0.0);
                for b in 0..n {
                    if e[(b, c)] != 0.0 {
                        acc += &inner[b * n + d].scaled(e[(b, c)]);
                    }
                }
                forms.push(acc);
            }
        }
        Ok(SecondCovariantDerivative { n, forms })
    }
}

fn check_field(chart: &MetricChart, field: &FormField) -> Result<()> {
    if field.dim() != chart.dim() {
        return Err(Error::DimensionMismatch(field.dim(), chart.dim()));
    }
    Ok(())
}

/// `Σ_j (−1)^j nabla[s_j](S∖s_j, J)` over the first block (1-based `j`).
pub fn alternate_first(nabla: &[DoubleForm]) -> DoubleForm {
    let w = &nabla[0];
    let (n, p, q) = (w.n(), w.p(), w.q());
    if p + 1 > n {
        return DoubleForm::zero(n, n, q);
    }
    let b = basis(n);
    let mut out = DoubleForm::zero(n, p + 1, q);
    for &s in b.subsets(p + 1) {
        for &t in b.subsets(q) {
            out.add_at_masks(
                s,
                t,
                alternating_sum(s, |m, rest| nabla[m].at_masks(rest, t)),
            );
        }
    }
    out
}

/// Same alternation over the second block.
pub fn alternate_second(nabla: &[DoubleForm]) -> DoubleForm {
    let w = &nabla[0];
    let (n, p, q) = (w.n(), w.p(), w.q());
    if q + 1 > n {
        return DoubleForm::zero(n, p, n);
    }
    let b = basis(n);
    let mut out = DoubleForm::zero(n, p, q + 1);
    for &s in b.subsets(p) {
        for &t in b.subsets(q + 1) {
            out.add_at_masks(
                s,
                t,
                alternating_sum(t, |m, rest| nabla[m].at_masks(s, rest)),
            );
        }
    }
    out
}

fn alternating_sum(set: Mask, mut term: impl FnMut(usize, Mask) -> f64) -> f64 {
    let mut acc = 0.0;
    for (j, m) in indices(set).enumerate() {
        let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
        acc += sign * term(m, set & !(1 << m));
    }
    acc
}

/// `Σ_{i,j} (−1)^{i+j} N[x_i][y_j](X∖x_i, Y∖y_j)` where `N[c][d]` is
/// `second[c·n+d]` when `outer_first` and `second[d·n+c]` otherwise.
fn double_alternation(second: &SecondCovariantDerivative, outer_first: bool) -> DoubleForm {
    let n = second.n;
    let w = &second.forms[0];
    let (p, q) = (w.p(), w.q());
    if p + 1 > n || q + 1 > n {
        return DoubleForm::zero(n, (p + 1).min(n), (q + 1).min(n));
    }
    let b = basis(n);
    let mut out = DoubleForm::zero(n, p + 1, q + 1);
    for &s in b.subsets(p + 1) {
        for &t in b.subsets(q + 1) {
            let mut acc = 0.0;
            for (i, x) in indices(s).enumerate() {
                for (j, y) in indices(t).enumerate() {
                    let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    let form = if outer_first {
                        second.get(x, y)
                    } else {
                        second.get(y, x)
                    };
                    acc += sign * form.at_masks(s & !(1 << x), t & !(1 << y));
                }
            }
            out.add_at_masks(s, t, acc);
        }
    }
    out
}

pub fn d_from_nabla(nabla: &CovariantDerivative) -> DoubleForm {
    alternate_first(&nabla.forms)
}

pub fn d_tilde_from_nabla(nabla: &CovariantDerivative) -> DoubleForm {
    alternate_second(&nabla.forms)
}

/// `DD̃ω` from `∇²ω`.
pub fn d_d_tilde_from_second(second: &SecondCovariantDerivative) -> DoubleForm {
    double_alternation(second, true)
}

/// `D̃Dω` from `∇²ω`.
pub fn d_tilde_d_from_second(second: &SecondCovariantDerivative) -> DoubleForm {
    double_alternation(second, false)
}

pub fn covariant_derivative(
    chart: &MetricChart,
    field: &FormField,
    x: &[f64],
) -> Result<CovariantDerivative> {
    JetStencil::with_default_steps(chart, x)?.covariant_derivative(field)
}

pub fn second_covariant_derivative(
    chart: &MetricChart,
    field: &FormField,
    x: &[f64],
) -> Result<SecondCovariantDerivative> {
    JetStencil::with_default_steps(chart, x)?.second_covariant_derivative(field)
}

/// Second Bianchi sum `D`, raising the first degree.
pub fn bianchi_d(chart: &MetricChart, field: &FormField, x: &[f64]) -> Result<DoubleForm> {
    Ok(d_from_nabla(&covariant_derivative(chart, field, x)?))
}

/// Adjoint second Bianchi sum `D̃`, raising the second degree.
pub fn bianchi_d_tilde(chart: &MetricChart, field: &FormField, x: &[f64]) -> Result<DoubleForm> {
    Ok(d_tilde_from_nabla(&covariant_derivative(chart, field, x)?))
}

pub fn d_d_tilde(chart: &MetricChart, field: &FormField, x: &[f64]) -> Result<DoubleForm> {
    Ok(d_d_tilde_from_second(&second_covariant_derivative(
        chart, field, x,
    )?))
}

pub fn d_tilde_d(chart: &MetricChart, field: &FormField, x: &[f64]) -> Result<DoubleForm> {
    Ok(d_tilde_d_from_second(&second_covariant_derivative(
        chart, field, x,
    )?))
}

/// `(DD̃ + D̃D)ω`.
pub fn hessian_operator(chart: &MetricChart, field: &FormField, x: &[f64]) -> Result<DoubleForm> {
    let second = second_covariant_derivative(chart, field, x)?;
    Ok(d_d_tilde_from_second(&second) + d_tilde_d_from_second(&second))
}

/// Sign `σ` in `δω = σ·*D*ω` for a `(p,q)` form in dimension `n`, with this
/// crate's star and product conventions: `σ = (−1)^{n+p+(p+q)(n−p−q)}`.
/// The sign for `δ̃ω = σ'·*D̃*ω` is `star_route_sign(n, q, p)`.
pub fn star_route_sign(n: usize, p: usize, q: usize) -> f64 {
    if (n + p + (p + q) * (n + p + q)).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `δω` and `δ̃ω` by the definitions `cD̃ + D̃c`, `cD + Dc` and by star
/// conjugation of `D` and `D̃`.
#[derive(Debug, Clone)]
pub struct DeltaOps {
    /// `cD̃ω + D̃cω`; `None` when `p = 0`.
    pub delta: Option<DoubleForm>,
    /// `cDω + Dcω`; `None` when `q = 0`.
    pub delta_tilde: Option<DoubleForm>,
    pub delta_star: Option<DoubleForm>,
    pub delta_tilde_star: Option<DoubleForm>,
}

impl DeltaOps {
    /// Largest discrepancy between the two routes.
    pub fn route_gap(&self) -> f64 {
        let gap = |a: &Option<DoubleForm>, b: &Option<DoubleForm>| match (a, b) {
            (Some(a), Some(b)) => (a - b).max_abs(),
            _ => 0.0,
        };
        gap(&self.delta, &self.delta_star).max(gap(&self.delta_tilde, &self.delta_tilde_star))
    }
}

fn contract_each(forms: &[DoubleForm]) -> Result<Vec<DoubleForm>> {
    forms.iter().map(DoubleForm::contract).collect()
}

/// `δω = cD̃ω + D̃cω` from `∇ω`; `None` when `p = 0`.
pub fn delta_from_nabla(
    nabla: &CovariantDerivative,
    n: usize,
    p: usize,
    q: usize,
) -> Result<Option<DoubleForm>> {
    if p == 0 {
        return Ok(None);
    }
    let first = if q < n {
        alternate_second(&nabla.forms).contract()?
    } else {
        DoubleForm::zero(n, p - 1, q)
    };
    let second = if q >= 1 {
        alternate_second(&contract_each(&nabla.forms)?)
    } else {
        first.scaled(0.0)
    };
    Ok(Some(first + second))
}

/// `δ̃ω = cDω + Dcω` from `∇ω`; `None` when `q = 0`.
pub fn delta_tilde_from_nabla(
    nabla: &CovariantDerivative,
    n: usize,
    p: usize,
    q: usize,
) -> Result<Option<DoubleForm>> {
    if q == 0 {
        return Ok(None);
    }
    let first = if p < n {
        alternate_first(&nabla.forms).contract()?
    } else {
        DoubleForm::zero(n, p, q - 1)
    };
    let second = if p >= 1 {
        alternate_first(&contract_each(&nabla.forms)?)
    } else {
        first.scaled(0.0)
    };
    Ok(Some(first + second))
}

pub fn delta_ops(chart: &MetricChart, field: &FormField, x: &[f64]) -> Result<DeltaOps> {
    let n = chart.dim();
    let (p, q) = field.bidegree();
    let mut stencil = JetStencil::with_default_steps(chart, x)?;
    let nabla = stencil.covariant_derivative(field)?;
    let delta = delta_from_nabla(&nabla, n, p, q)?;
    let delta_tilde = delta_tilde_from_nabla(&nabla, n, p, q)?;
    let star_nabla = if p >= 1 || q >= 1 {
        Some(stencil.covariant_derivative(&field.hodge_star())?)
    } else {
        None
    };
    let delta_star = match (&delta, &star_nabla) {
        (Some(_), Some(sn)) => Some(
            alternate_first(&sn.forms)
                .hodge_star()
                .scaled(star_route_sign(n, p, q)),
        ),
        _ => None,
    };
    let delta_tilde_star = match (&delta_tilde, &star_nabla) {
        (Some(_), Some(sn)) => Some(
            alternate_second(&sn.forms)
                .hodge_star()
                .scaled(star_route_sign(n, q, p)),
        ),
        _ => None,
    };
    Ok(DeltaOps {
        delta,
        delta_tilde,
        delta_star,
        delta_tilde_star,
    })
}

/// First-order operator applied pointwise through a stencil, as a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstOrder {
    D,
    DTilde,
    Delta,
    DeltaTilde,
}

impl FirstOrder {
    /// Bidegree of the image of a `(p, q)` field in dimension `n`, or
    /// `None` when a degree would leave `0..=n`.
    pub fn image(self, n: usize, p: usize, q: usize) -> Option<(usize, usize)> {
        match self {
            Self::D => (p < n).then_some((p + 1, q)),
            Self::DTilde => (q < n).then_some((p, q + 1)),
            Self::Delta => p.checked_sub(1).map(|p| (p, q)),
            Self::DeltaTilde => q.checked_sub(1).map(|q| (p, q)),
        }
    }

    pub fn apply(self, chart: &MetricChart, field: &FormField, x: &[f64]) -> Result<DoubleForm> {
        let n = chart.dim();
        let (p, q) = field.bidegree();
        let nabla = covariant_derivative(chart, field, x)?;
        let out = match self {
            Self::D => Some(d_from_nabla(&nabla)),
            Self::DTilde => Some(d_tilde_from_nabla(&nabla)),
            Self::Delta => delta_from_nabla(&nabla, n, p, q)?,
            Self::DeltaTilde => delta_tilde_from_nabla(&nabla, n, p, q)?,
        };
        out.ok_or_else(|| Error::DegreeOutOfRange(format!("{self:?} of a ({p},{q}) form")))
    }

    /// The operator applied to `field`, evaluated lazily at each point.
    pub fn field(self, chart: &MetricChart, field: &FormField) -> Result<FormField> {
        let (p, q) = field.bidegree();
        let (pp, qq) = self
            .image(field.dim(), p, q)
            .ok_or_else(|| Error::DegreeOutOfRange(format!("{self:?} of a ({p},{q}) form")))?;
        let chart = chart.clone();
        let inner = field.clone();
        Ok(FormField::new(field.dim(), pp, qq, move |geom| {
            self.apply(&chart, &inner, geom.point())
        }))
    }
}
