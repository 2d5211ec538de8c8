//! Pointwise curvature invariants of a curvature structure `R ∈ C²`.

mod suites;

use log::warn;

use crate::basis::factorial;
use crate::double_forms::{
    metric_power, primitive_decompose, BianchiFlag, CurvatureStructure, DoubleForm,
};
use crate::error::{Error, Result};

pub use suites::{
    catalog_curvatures, catalog_samples, curvature_identity_suite, einstein_equivalence_suite,
    EinsteinEquivalenceReport,
};

/// Relative agreement required between the two routes to `h_2k` and `T_2k`.
pub const DUAL_ROUTE_TOL: f64 = 1e-10;

fn check_order(r: &CurvatureStructure, k: usize) -> Result<()> {
    if r.degree() != 2 {
        return Err(Error::DegreeOutOfRange(format!(
            "curvature must be a (2,2) structure, got degree {}",
            r.degree()
        )));
    }
    if k == 0 || 2 * k > r.n() {
        return Err(Error::DegreeOutOfRange(format!(
            "2k exceeds n (k = {k}, n = {})",
            r.n()
        )));
    }
    let holds = match r.bianchi() {
        BianchiFlag::Verified => true,
        BianchiFlag::Violated => false,
        BianchiFlag::Unchecked => r.bianchi_holds(),
    };
    if !holds {
        warn!("curvature structure violates the first Bianchi identity; continuing");
    }
    Ok(())
}

fn agree(what: &'static str, a: f64, b: f64, scale: f64) -> Result<()> {
    if (a - b).abs() > DUAL_ROUTE_TOL * scale.max(a.abs()).max(b.abs()).max(1.0) {
        return Err(Error::DualRouteMismatch {
            what,
            first: a,
            second: b,
        });
    }
    Ok(())
}

/// `h_2k` by both routes: `*(g^{n−2k} R^k)/(n−2k)!` and `c^{2k} R^k/(2k)!`.
pub fn gauss_bonnet_routes(r: &CurvatureStructure, k: usize) -> Result<(f64, f64)> {
    check_order(r, k)?;
    let n = r.n();
    let rk = r.form().power(k)?;
    let star_route = metric_power(n, n - 2 * k)
        .wedge(&rk)?
        .hodge_star()
        .scalar_value()?
        / factorial(n - 2 * k);
    let contraction_route = rk.contract_times(2 * k)?.scalar_value()? / factorial(2 * k);
    Ok((star_route, contraction_route))
}

/// Gauss–Bonnet curvature `h_2k`; both routes are evaluated and must agree.
pub fn gauss_bonnet_curvature(r: &CurvatureStructure, k: usize) -> Result<f64> {
    let (a, b) = gauss_bonnet_routes(r, k)?;
    agree("h_2k", a, b, r.form().norm().powi(k as i32))?;
    Ok(a)
}

/// Generalized Ricci tensor `c^{2k−1} R^k / (2k−1)!`.
pub fn generalized_ricci(r: &CurvatureStructure, k: usize) -> Result<DoubleForm> {
    check_order(r, k)?;
    Ok(r.form()
        .power(k)?
        .contract_times(2 * k - 1)?
        .scaled(1.0 / factorial(2 * k - 1)))
}

/// `T_2k` by the star route `*(g^{n−2k−1} R^k)/(n−2k−1)!` (zero when `2k = n`)
/// and by the contraction route `h_2k g − c^{2k−1}R^k/(2k−1)!`.
pub fn lovelock_routes(r: &CurvatureStructure, k: usize) -> Result<(DoubleForm, DoubleForm)> {
    check_order(r, k)?;
    let n = r.n();
    let rk = r.form().power(k)?;
    let star_route = if 2 * k == n {
        DoubleForm::zero(n, 1, 1)
    } else {
        metric_power(n, n - 2 * k - 1)
            .wedge(&rk)?
            .hodge_star()
            .scaled(1.0 / factorial(n - 2 * k - 1))
    };
    let h = rk.contract_times(2 * k)?.scalar_value()? / factorial(2 * k);
    let ricci = rk
        .contract_times(2 * k - 1)?
        .scaled(1.0 / factorial(2 * k - 1));
    let contraction_route = &DoubleForm::metric(n).scaled(h) - &ricci;
    Ok((star_route, contraction_route))
}

/// Einstein–Lovelock tensor `T_2k`, cross-checked between both routes.
pub fn lovelock_tensor(r: &CurvatureStructure, k: usize) -> Result<CurvatureStructure> {
    let (a, b) = lovelock_routes(r, k)?;
    let scale = r.form().norm().powi(k as i32);
    let diff = (&a - &b).max_abs();
    if diff > DUAL_ROUTE_TOL * scale.max(a.max_abs()).max(1.0) {
        return Err(Error::DualRouteMismatch {
            what: "T_2k",
            first: a.max_abs(),
            second: b.max_abs(),
        });
    }
    CurvatureStructure::symmetrize(&a)
}

/// `(p,q)`-curvature tensor `R_(p,q) = *(g^{n−2q−p} R^q)/(n−2q−p)!`.
pub fn pq_curvature_tensor(
    r: &CurvatureStructure,
    p: usize,
    q: usize,
) -> Result<CurvatureStructure> {
    let n = r.n();
    if q == 0 || 2 * q > n || p + 2 * q > n {
        return Err(Error::DegreeOutOfRange(format!(
            "(p,q) = ({p},{q}) needs 1 <= q <= n/2 and p <= n - 2q (n = {n})"
        )));
    }
    check_order(r, q)?;
    let m = n - 2 * q - p;
    let form = metric_power(n, m)
        .wedge(&r.form().power(q)?)?
        .hodge_star()
        .scaled(1.0 / factorial(m));
    CurvatureStructure::symmetrize(&form)
}

#[derive(Debug, Clone)]
pub struct InvariantBundle {
    pub n: usize,
    pub k: usize,
    pub h2k: f64,
    pub t2k: CurvatureStructure,
    /// `c^{2k−1} R^k / (2k−1)!`.
    pub generalized_ricci: CurvatureStructure,
}

impl InvariantBundle {
    pub fn trace_t2k(&self) -> f64 {
        trace(self.t2k.form())
    }
}

pub fn invariant_bundle(r: &CurvatureStructure, k: usize) -> Result<InvariantBundle> {
    Ok(InvariantBundle {
        n: r.n(),
        k,
        h2k: gauss_bonnet_curvature(r, k)?,
        t2k: lovelock_tensor(r, k)?,
        generalized_ricci: CurvatureStructure::symmetrize(&generalized_ricci(r, k)?)?,
    })
}

/// Trace of a `(1,1)` form in the orthonormal frame.
pub fn trace(form: &DoubleForm) -> f64 {
    let n = form.n();
    (0..n).map(|i| form.coeffs()[i * n + i]).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct EinsteinDeviation {
    /// `trace(T_2k)/n`.
    pub lambda: f64,
    /// `max |T_2k − λ g|`.
    pub residual: f64,
    /// `max |ω₁|` for the traceless `(1,1)` part of `R^k`; `None` when
    /// `n < 4k`, outside the range where the splitting is unique.
    pub omega1: Option<f64>,
    /// `1e-8 (1 + |R|^k)`.
    pub threshold: f64,
}

impl EinsteinDeviation {
    pub fn is_einstein(&self) -> bool {
        self.residual <= self.threshold
    }

    pub fn omega1_vanishes(&self) -> Option<bool> {
        self.omega1.map(|w| w <= self.threshold)
    }
}

/// Deviation of `T_2k` from a multiple of the metric, alongside the `(1,1)`
/// traceless component of `R^k`. Both vanish together.
pub fn einstein_deviation(r: &CurvatureStructure, k: usize) -> Result<EinsteinDeviation> {
    let t = lovelock_tensor(r, k)?;
    let n = r.n();
    let lambda = trace(t.form()) / n as f64;
    let residual = (t.form() - &DoubleForm::metric(n).scaled(lambda)).max_abs();
    let omega1 = if n >= 4 * k {
        let rk = r.power(k)?;
        Some(primitive_decompose(&rk)?.component_of_degree(1).max_abs())
    } else {
        None
    };
    Ok(EinsteinDeviation {
        lambda,
        residual,
        omega1,
        threshold: 1e-8 * (1.0 + r.form().norm().powi(k as i32)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_bianchi, random_symmetric, Seeds};

    #[test]
    fn flat_is_zero() {
        let r = CurvatureStructure::constant_curvature(5, 0.0);
        for k in 1..=2 {
            assert_eq!(gauss_bonnet_curvature(&r, k).unwrap(), 0.0);
            assert_eq!(lovelock_tensor(&r, k).unwrap().form().max_abs(), 0.0);
        }
    }

    #[test]
    fn order_range_is_checked() {
        let r = CurvatureStructure::constant_curvature(4, 1.0);
        assert!(gauss_bonnet_curvature(&r, 3).is_err());
        assert!(gauss_bonnet_curvature(&r, 0).is_err());
        assert!(pq_curvature_tensor(&r, 3, 1).is_err());
        assert!(pq_curvature_tensor(&r, 0, 3).is_err());
    }

    #[test]
    fn constant_curvature_lovelock_tensor() {
        // Ric = (n−1)κ g, h₂ = n(n−1)κ/2 = 6, so T₂ = 3g.
        let r = CurvatureStructure::constant_curvature(4, 1.0);
        let t = lovelock_tensor(&r, 1).unwrap();
        assert!((t.form() - &DoubleForm::metric(4).scaled(3.0)).max_abs() < 1e-12);
    }

    #[test]
    fn top_order_lovelock_vanishes() {
        let mut rng = Seeds::new(3).rng();
        let r = random_bianchi(&mut rng, 4, 2);
        let (star, contraction) = lovelock_routes(&r, 2).unwrap();
        assert_eq!(star.max_abs(), 0.0);
        assert!(contraction.max_abs() < 1e-10 * (1.0 + r.form().norm().powi(2)));
    }

    #[test]
    fn pq_tensor_endpoints() {
        let mut rng = Seeds::new(11).rng();
        let r = random_bianchi(&mut rng, 5, 2);
        let h = gauss_bonnet_curvature(&r, 1).unwrap();
        let r01 = pq_curvature_tensor(&r, 0, 1).unwrap();
        assert!((r01.form().scalar_value().unwrap() - h).abs() < 1e-10 * h.abs().max(1.0));
        let r11 = pq_curvature_tensor(&r, 1, 1).unwrap();
        let t = lovelock_tensor(&r, 1).unwrap();
        assert!((r11.form() - t.form()).max_abs() < 1e-10 * t.form().max_abs().max(1.0));
    }

    #[test]
    fn non_bianchi_input_still_computes() {
        let mut rng = Seeds::new(5).rng();
        let r = random_symmetric(&mut rng, 4, 2);
        assert!(gauss_bonnet_curvature(&r, 1).is_ok());
    }

    #[test]
    fn flat_einstein_deviation() {
        let d = einstein_deviation(&CurvatureStructure::constant_curvature(4, 0.0), 1).unwrap();
        assert_eq!((d.lambda, d.residual), (0.0, 0.0));
        assert_eq!(d.omega1, Some(0.0));
    }
}
