use nalgebra::{DMatrix, DVector};

use super::form::{compound, DoubleForm};
use crate::basis::{basis, indices, insert_sign};
use crate::error::{Error, Result};

/// Relative tolerance for the symmetry and first-Bianchi invariants.
pub const STRUCTURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BianchiFlag {
    Verified,
    Violated,
    Unchecked,
}

/// Symmetric `(p,p)` double form, an element of the ring of curvature
/// structures.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureStructure {
    form: DoubleForm,
    bianchi: BianchiFlag,
}

impl CurvatureStructure {
    /// Accepts a symmetric `(p,p)` form; Bianchi status is left unchecked.
    pub fn new(form: DoubleForm) -> Result<Self> {
        if form.p() != form.q() {
            return Err(Error::BidegreeMismatch(
                form.p(),
                form.q(),
                form.p(),
                form.p(),
            ));
        }
        let asym = form.asymmetry();
        if asym > STRUCTURE_TOL * form.max_abs().max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self {
            form,
            bianchi: BianchiFlag::Unchecked,
        })
    }

    /// Projects onto the symmetric part first. Meant for numerically assembled
    /// tensors whose asymmetry is pure rounding.
    pub fn symmetrize(form: &DoubleForm) -> Result<Self> {
        Self::new(form.symmetrized())
    }

    /// Like [`CurvatureStructure::new`], additionally classifying the first
    /// Bianchi identity.
    pub fn checked(form: DoubleForm) -> Result<Self> {
        let mut s = Self::new(form)?;
        s.bianchi = if s.bianchi_holds() {
            BianchiFlag::Verified
        } else {
            BianchiFlag::Violated
        };
        Ok(s)
    }

    pub fn bianchi_holds(&self) -> bool {
        first_bianchi_residual(&self.form) <= STRUCTURE_TOL * self.form.max_abs().max(1.0)
    }

    pub fn form(&self) -> &DoubleForm {
        &self.form
    }

    pub fn into_form(self) -> DoubleForm {
        self.form
    }

    pub fn bianchi(&self) -> BianchiFlag {
        self.bianchi
    }

    pub fn degree(&self) -> usize {
        self.form.p()
    }

    pub fn n(&self) -> usize {
        self.form.n()
    }

    /// `g^m` as a structure; satisfies Bianchi.
    pub fn metric_power(n: usize, m: usize) -> Self {
        Self {
            form: super::form::metric_power(n, m),
            bianchi: BianchiFlag::Verified,
        }
    }

    /// Constant sectional curvature `κ`: `(κ/2) g²`.
    pub fn constant_curvature(n: usize, kappa: f64) -> Self {
        Self {
            form: super::form::metric_power(n, 2).scaled(0.5 * kappa),
            bianchi: BianchiFlag::Verified,
        }
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let bianchi = match (self.bianchi, other.bianchi) {
            (BianchiFlag::Verified, BianchiFlag::Verified) => BianchiFlag::Verified,
            _ => BianchiFlag::Unchecked,
        };
        Ok(Self {
            form: self.form.wedge(&other.form)?,
            bianchi,
        })
    }

    /// `ω^k`; powers of Bianchi structures are Bianchi.
    pub fn power(&self, k: usize) -> Result<Self> {
        let bianchi = if self.bianchi == BianchiFlag::Verified {
            BianchiFlag::Verified
        } else {
            BianchiFlag::Unchecked
        };
        Ok(Self {
            form: self.form.power(k)?,
            bianchi,
        })
    }
}

/// Max-norm of the first Bianchi sum
/// `Σ_j (−1)^j ω(x_1 ∧ … x̂_j … ∧ x_{p+1}, x_j ∧ y_1 ∧ … ∧ y_{q−1})`.
pub fn first_bianchi_residual(form: &DoubleForm) -> f64 {
    let (n, p, q) = (form.n(), form.p(), form.q());
    if q == 0 || p + 1 > n {
        return 0.0;
    }
    let b = basis(n);
    let mut worst: f64 = 0.0;
    for &s in b.subsets(p + 1) {
        for &t in b.subsets(q - 1) {
            let mut sum = 0.0;
            for (pos, j) in indices(s).enumerate() {
                let bit = 1 << j;
                if t & bit != 0 {
                    continue;
                }
                let sign = if pos % 2 == 0 { -1.0 } else { 1.0 };
                sum += sign * insert_sign(j, t) * form.at_masks(s & !bit, t | bit);
            }
            worst = worst.max(sum.abs());
        }
    }
    worst
}

/// `F_h ω`: the derivation extension of the symmetric endomorphism `h̄`
/// applied to every argument, `ω(h̄x_1, …) + … + ω(…, h̄y_p)`.
///
/// On `(1,1)` forms this is `h̄∘k̄ + k̄∘h̄`; in an `h`-eigenframe it multiplies
/// each coefficient by the eigenvalue sum of the involved directions.
pub fn f_h(h: &CurvatureStructure, omega: &DoubleForm) -> Result<DoubleForm> {
    if h.degree() != 1 {
        return Err(Error::DegreeOutOfRange(format!(
            "F_h needs h of degree 1, got {}",
            h.degree()
        )));
    }
    if h.n() != omega.n() {
        return Err(Error::DimensionMismatch(h.n(), omega.n()));
    }
    let asym = omega.asymmetry();
    if asym > STRUCTURE_TOL * omega.max_abs().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let hm = h.form().to_matrix()?;
    omega.derivation(&hm)
}

/// Value of `ω` on the unit simple `p`-vector spanned by `vectors`
/// (frame components), after Gram–Schmidt orthonormalization.
pub fn sectional_value(omega: &CurvatureStructure, vectors: &[Vec<f64>]) -> Result<f64> {
    let n = omega.n();
    let p = omega.degree();
    if vectors.len() != p {
        return Err(Error::DegreeOutOfRange(format!(
            "expected {p} vectors, got {}",
            vectors.len()
        )));
    }
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(p);
    for v in vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch(v.len(), n));
        }
        let mut w = DVector::from_column_slice(v);
        let scale = w.norm();
        for e in &frame {
            let c = e.dot(&w);
            w -= e * c;
        }
        let len = w.norm();
        if scale == 0.0 || len <= 1e-10 * scale {
            return Err(Error::RankDeficient);
        }
        frame.push(w / len);
    }
    if p == 0 {
        return omega.form().scalar_value();
    }
    let v = DMatrix::from_fn(n, n, |i, j| if j < p { frame[j][i] } else { 0.0 });
    // Coefficients of v_1 ∧ … ∧ v_p are the p×p minors: column 0 of the compound.
    let comp = compound(&v, p);
    let b = basis(n);
    let first = b.rank(((1u32 << p) - 1) as u16);
    let coeffs: Vec<f64> = (0..b.count(p)).map(|k| comp[(k, first)]).collect();
    let form = omega.form();
    let mut total = 0.0;
    for (r, cr) in coeffs.iter().enumerate() {
        if *cr == 0.0 {
            continue;
        }
        for (c, cc) in coeffs.iter().enumerate() {
            total += cr * cc * form.coeffs()[r * coeffs.len() + c];
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metric_powers_satisfy_bianchi() {
        for n in 2..=6 {
            for m in 1..=n {
                assert_eq!(
                    first_bianchi_residual(&DoubleForm::metric(n).power(m).unwrap()),
                    0.0
                );
            }
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let w = DoubleForm::from_fn(3, 1, 1, |i, j| if i.mask() < j.mask() { 1.0 } else { 0.0 });
        assert!(matches!(
            CurvatureStructure::new(w.clone()),
            Err(Error::NotSymmetric(_))
        ));
        let h = CurvatureStructure::new(DoubleForm::metric(3)).unwrap();
        assert!(f_h(&h, &w).is_err());
        assert!(CurvatureStructure::new(DoubleForm::zero(3, 2, 1)).is_err());
    }

    #[test]
    fn sectional_value_of_half_metric_square() {
        let s =
            CurvatureStructure::new(DoubleForm::metric(4).power(2).unwrap().scaled(0.5)).unwrap();
        let v =
            sectional_value(&s, &[vec![1.0, 1.0, 0.0, 0.3], vec![0.0, 2.0, -1.0, 0.5]]).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        assert!(matches!(
            sectional_value(&s, &[vec![1.0, 0.0, 0.0, 0.0], vec![2.0, 0.0, 0.0, 0.0]]),
            Err(Error::RankDeficient)
        ));
    }

    #[test]
    fn f_h_with_metric_doubles_degree() {
        let g = CurvatureStructure::new(DoubleForm::metric(4)).unwrap();
        let w = DoubleForm::metric(4).power(2).unwrap();
        assert_eq!(f_h(&g, &w).unwrap(), w.scaled(4.0));
    }
}
