use std::fmt::Write as _;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;

use super::multi_index::{sort_tuple, MultiIndex};
use crate::basis::{basis, check_dim, factorial, indices, insert_sign, merge_sign, Basis, Mask};
use crate::error::{Error, Result};

/// Element of `Λ^p ⊗ Λ^q` over an `n`-dimensional inner-product space.
///
/// `coeffs[rank(I) * C(n,q) + rank(J)]` holds `ω(e_I, e_J)` for increasing
/// multi-indices `I`, `J` in a fixed orthonormal frame (or, for the
/// coordinate-level helpers in `geometry`, in a coordinate basis).
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleForm {
    n: usize,
    p: usize,
    q: usize,
    coeffs: Vec<f64>,
}

impl DoubleForm {
    pub fn zero(n: usize, p: usize, q: usize) -> Self {
        assert!(
            n <= crate::MAX_DIM && p <= n && q <= n,
            "bidegree ({p},{q}) invalid for n = {n}"
        );
        let b = basis(n);
        Self {
            n,
            p,
            q,
            coeffs: vec![0.0; b.count(p) * b.count(q)],
        }
    }

    pub fn try_zero(n: usize, p: usize, q: usize) -> Result<Self> {
        check_dim(n)?;
        if p > n || q > n {
            return Err(Error::DegreeOutOfRange(format!(
                "bidegree ({p},{q}) in dimension {n}"
            )));
        }
        Ok(Self::zero(n, p, q))
    }

    /// Builds a form from a dense coefficient array in storage order.
    pub fn from_coeffs(n: usize, p: usize, q: usize, coeffs: Vec<f64>) -> Result<Self> {
        let zero = Self::try_zero(n, p, q)?;
        if coeffs.len() != zero.coeffs.len() {
            return Err(Error::DimensionMismatch(coeffs.len(), zero.coeffs.len()));
        }
        Ok(Self { coeffs, ..zero })
    }

    pub fn from_fn(
        n: usize,
        p: usize,
        q: usize,
        mut f: impl FnMut(MultiIndex, MultiIndex) -> f64,
    ) -> Self {
        let mut out = Self::zero(n, p, q);
        let b = basis(n);
        let cols = b.count(q);
        for (r, &i) in b.subsets(p).iter().enumerate() {
            for (c, &j) in b.subsets(q).iter().enumerate() {
                out.coeffs[r * cols + c] = f(MultiIndex::from_mask(i), MultiIndex::from_mask(j));
            }
        }
        out
    }

    /// The scalar `s` as a `(0,0)` form.
    pub fn scalar(n: usize, s: f64) -> Self {
        let mut out = Self::zero(n, 0, 0);
        out.coeffs[0] = s;
        out
    }

    /// The ring unit `1 ∈ D^{0,0}`.
    pub fn unit(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    /// The metric `g` as a `(1,1)` form: identity coefficients in the frame.
    pub fn metric(n: usize) -> Self {
        Self::from_fn(n, 1, 1, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    /// `(1,1)` form with coefficients `m[(i, j)]`.
    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut out = Self::zero(n, 1, 1);
        for i in 0..n {
            for j in 0..n {
                out.coeffs[i * n + j] = m[(i, j)];
            }
        }
        out
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.p != 1 || self.q != 1 {
            return Err(Error::BidegreeMismatch(self.p, self.q, 1, 1));
        }
        Ok(DMatrix::from_row_slice(self.n, self.n, &self.coeffs))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn bidegree(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    fn cols(&self) -> usize {
        basis(self.n).count(self.q)
    }

    #[inline]
    pub(crate) fn at_masks(&self, i: Mask, j: Mask) -> f64 {
        let b = basis(self.n);
        self.coeffs[b.rank(i) * b.count(self.q) + b.rank(j)]
    }

    #[inline]
    pub(crate) fn add_at_masks(&mut self, i: Mask, j: Mask, v: f64) {
        let b = basis(self.n);
        let cols = b.count(self.q);
        self.coeffs[b.rank(i) * cols + b.rank(j)] += v;
    }

    pub fn get(&self, i: MultiIndex, j: MultiIndex) -> f64 {
        debug_assert!(i.degree() == self.p && j.degree() == self.q);
        self.at_masks(i.mask(), j.mask())
    }

    pub fn set(&mut self, i: MultiIndex, j: MultiIndex, v: f64) {
        let b = basis(self.n);
        let cols = b.count(self.q);
        self.coeffs[b.rank(i.mask()) * cols + b.rank(j.mask())] = v;
    }

    /// Value on arbitrary (not necessarily increasing) 0-based index tuples,
    /// recovered by antisymmetry within each block.
    pub fn eval_tuples(&self, x: &[usize], y: &[usize]) -> f64 {
        assert!(x.len() == self.p && y.len() == self.q);
        match (sort_tuple(x), sort_tuple(y)) {
            (Some((sx, i)), Some((sy, j))) => sx * sy * self.get(i, j),
            _ => 0.0,
        }
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        if self.bidegree() != other.bidegree() {
            return Err(Error::BidegreeMismatch(self.p, self.q, other.p, other.q));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    /// The form with its two argument blocks swapped.
    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.n, self.q, self.p);
        let b = basis(self.n);
        for &i in b.subsets(self.p) {
            for &j in b.subsets(self.q) {
                out.add_at_masks(j, i, self.at_masks(i, j));
            }
        }
        out
    }

    /// `max |ω(I,J) − ω(J,I)|`; infinite when `p ≠ q`.
    pub fn asymmetry(&self) -> f64 {
        if self.p != self.q {
            return f64::INFINITY;
        }
        (self - &self.transpose()).max_abs()
    }

    pub fn symmetrized(&self) -> Self {
        (self + &self.transpose()).scaled(0.5)
    }

    /// Exterior (Kulkarni–Nomizu) product with the shuffle-sum normalization:
    /// `(ω·θ)(e_I, e_J) = Σ ε ε' ω(e_{I₁}, e_{J₁}) θ(e_{I₂}, e_{J₂})` over the
    /// splittings of `I` and `J`. A result degree above `n` gives the zero form
    /// with the degree clamped to `n`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(self.n, other.n));
        }
        let n = self.n;
        let (p, q) = (self.p + other.p, self.q + other.q);
        if p > n || q > n {
            return Ok(Self::zero(n, p.min(n), q.min(n)));
        }
        let b = basis(n);
        let mut out = Self::zero(n, p, q);
        let rhs = nonzero_entries(other, b);
        let cols = self.cols();
        for (r, &i) in b.subsets(self.p).iter().enumerate() {
            for (c, &j) in b.subsets(self.q).iter().enumerate() {
                let a = self.coeffs[r * cols + c];
                if a == 0.0 {
                    continue;
                }
                for &(k, l, v) in &rhs {
                    if i & k != 0 || j & l != 0 {
                        continue;
                    }
                    let s = merge_sign(i, k) * merge_sign(j, l);
                    out.add_at_masks(i | k, j | l, s * a * v);
                }
            }
        }
        Ok(out)
    }

    /// `ω^k` in the ring of double forms; `k = 0` gives the unit.
    pub fn power(&self, k: usize) -> Result<Self> {
        let mut acc = Self::unit(self.n);
        for _ in 0..k {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// `g · ω`.
    pub fn metric_mul(&self) -> Result<Self> {
        Self::metric(self.n).wedge(self)
    }

    /// Contraction `(cω)(x, y) = Σ_m ω(e_m ∧ x, e_m ∧ y)`.
    pub fn contract(&self) -> Result<Self> {
        if self.p == 0 || self.q == 0 {
            return Err(Error::DegreeOutOfRange(format!(
                "cannot contract a ({},{}) form",
                self.p, self.q
            )));
        }
        let n = self.n;
        let b = basis(n);
        let mut out = Self::zero(n, self.p - 1, self.q - 1);
        for &i in b.subsets(self.p - 1) {
            for &j in b.subsets(self.q - 1) {
                let mut s = 0.0;
                for m in 0..n {
                    let bit = 1 << m;
                    if i & bit != 0 || j & bit != 0 {
                        continue;
                    }
                    s += insert_sign(m, i) * insert_sign(m, j) * self.at_masks(i | bit, j | bit);
                }
                out.add_at_masks(i, j, s);
            }
        }
        Ok(out)
    }

    /// `c^k ω`.
    pub fn contract_times(&self, k: usize) -> Result<Self> {
        let mut acc = self.clone();
        for _ in 0..k {
            acc = acc.contract()?;
        }
        Ok(acc)
    }

    /// Generalized Hodge star `D^{p,q} → D^{n−p,n−q}`, the form-level star
    /// `e^I ↦ ε(I, I^c) e^{I^c}` applied in each block. The frame ordering
    /// fixes the orientation.
    pub fn hodge_star(&self) -> Self {
        let n = self.n;
        let b = basis(n);
        let full = b.full();
        let mut out = Self::zero(n, n - self.p, n - self.q);
        for &k in b.subsets(n - self.p) {
            let kc = full & !k;
            let sk = merge_sign(kc, k);
            for &l in b.subsets(n - self.q) {
                let lc = full & !l;
                out.add_at_masks(k, l, sk * merge_sign(lc, l) * self.at_masks(kc, lc));
            }
        }
        out
    }

    /// Pointwise inner product: the coefficient dot product over increasing
    /// multi-indices in the orthonormal frame.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum())
    }

    /// Value of a `(0,0)` form.
    pub fn scalar_value(&self) -> Result<f64> {
        if self.p != 0 || self.q != 0 {
            return Err(Error::BidegreeMismatch(self.p, self.q, 0, 0));
        }
        Ok(self.coeffs[0])
    }

    /// `ω(A·, A·)`: evaluates the form on the images of basis vectors under
    /// `A`, where `A e_i = Σ_m A[(m, i)] e_m`. Used for changes of frame.
    pub fn pullback(&self, a: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() != self.n || a.ncols() != self.n {
            return Err(Error::DimensionMismatch(a.nrows(), self.n));
        }
        let cp = compound(a, self.p);
        let cq = if self.q == self.p {
            cp.clone()
        } else {
            compound(a, self.q)
        };
        let rows = cp.nrows();
        let cols = cq.nrows();
        let omega = DMatrix::from_row_slice(rows, cols, &self.coeffs);
        let res = cp.transpose() * omega * cq;
        let mut out = Self::zero(self.n, self.p, self.q);
        for r in 0..rows {
            for c in 0..cols {
                out.coeffs[r * cols + c] = res[(r, c)];
            }
        }
        Ok(out)
    }

    /// Derivation extension of an endomorphism in both blocks:
    /// `Σ_s ω(…, A x_s, …; y) + Σ_t ω(x; …, A y_t, …)`.
    pub fn derivation(&self, a: &DMatrix<f64>) -> Result<Self> {
        if a.nrows() != self.n || a.ncols() != self.n {
            return Err(Error::DimensionMismatch(a.nrows(), self.n));
        }
        let n = self.n;
        let b = basis(n);
        let left = derivation_matrix(a, self.p);
        let right = if self.q == self.p {
            left.clone()
        } else {
            derivation_matrix(a, self.q)
        };
        let rows = b.count(self.p);
        let cols = b.count(self.q);
        let omega = DMatrix::from_row_slice(rows, cols, &self.coeffs);
        let res = left.transpose() * &omega + omega * right;
        let mut out = Self::zero(n, self.p, self.q);
        for r in 0..rows {
            for c in 0..cols {
                out.coeffs[r * cols + c] = res[(r, c)];
            }
        }
        Ok(out)
    }

    /// Debug dump: one line `I J value` per nonzero coefficient, indices
    /// 1-based, lexicographic order, `-` for the empty index.
    pub fn dump(&self) -> String {
        let b = basis(self.n);
        let cols = self.cols();
        let mut out = String::new();
        for (r, &i) in b.subsets(self.p).iter().enumerate() {
            for (c, &j) in b.subsets(self.q).iter().enumerate() {
                let v = self.coeffs[r * cols + c];
                if v != 0.0 {
                    let _ = writeln!(
                        out,
                        "{} {} {:.12e}",
                        MultiIndex::from_mask(i),
                        MultiIndex::from_mask(j),
                        v
                    );
                }
            }
        }
        out
    }
}

fn nonzero_entries(form: &DoubleForm, b: &Basis) -> Vec<(Mask, Mask, f64)> {
    let cols = b.count(form.q);
    let mut out = Vec::new();
    for (r, &k) in b.subsets(form.p).iter().enumerate() {
        for (c, &l) in b.subsets(form.q).iter().enumerate() {
            let v = form.coeffs[r * cols + c];
            if v != 0.0 {
                out.push((k, l, v));
            }
        }
    }
    out
}

/// `p`-th compound matrix: entry `(K, I)` is `det A[K, I]`.
pub fn compound(a: &DMatrix<f64>, p: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let b = basis(n);
    let subs = b.subsets(p);
    let m = subs.len();
    let mut out = DMatrix::zeros(m, m);
    let idx: Vec<Vec<usize>> = subs.iter().map(|&s| indices(s).collect()).collect();
    for (r, rk) in idx.iter().enumerate() {
        for (c, ci) in idx.iter().enumerate() {
            out[(r, c)] = if p == 0 {
                1.0
            } else {
                DMatrix::from_fn(p, p, |x, y| a[(rk[x], ci[y])]).determinant()
            };
        }
    }
    out
}

/// Matrix of the derivation extension of `A` on `Λ^p`: column `I` holds the
/// coefficients of `Σ_s e_{i_1} ∧ … ∧ A e_{i_s} ∧ … ∧ e_{i_p}`.
fn derivation_matrix(a: &DMatrix<f64>, p: usize) -> DMatrix<f64> {
    let n = a.nrows();
    let b = basis(n);
    let m = b.count(p);
    let mut out = DMatrix::zeros(m, m);
    for (c, &i) in b.subsets(p).iter().enumerate() {
        for s in indices(i) {
            let rest = i & !(1 << s);
            let sign_s = insert_sign(s, rest);
            for t in 0..n {
                let coef = a[(t, s)];
                if coef == 0.0 {
                    continue;
                }
                if t == s {
                    out[(c, c)] += coef;
                } else if rest & (1 << t) == 0 {
                    let k = rest | (1 << t);
                    out[(b.rank(k), c)] += coef * sign_s * insert_sign(t, rest);
                }
            }
        }
    }
    out
}

/// `g^m / m!`-free metric power `g^m` in dimension `n`.
pub fn metric_power(n: usize, m: usize) -> DoubleForm {
    // g^m(e_I, e_J) = m! δ_IJ.
    let f = factorial(m);
    DoubleForm::from_fn(n, m.min(n), m.min(n), |i, j| {
        if i == j && m <= n {
            f
        } else {
            0.0
        }
    })
}

impl Add for &DoubleForm {
    type Output = DoubleForm;
    fn add(self, rhs: &DoubleForm) -> DoubleForm {
        assert_eq!(
            (self.n, self.p, self.q),
            (rhs.n, rhs.p, rhs.q),
            "shape mismatch in add"
        );
        DoubleForm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            ..self.clone()
        }
    }
}

impl Sub for &DoubleForm {
    type Output = DoubleForm;
    fn sub(self, rhs: &DoubleForm) -> DoubleForm {
        assert_eq!(
            (self.n, self.p, self.q),
            (rhs.n, rhs.p, rhs.q),
            "shape mismatch in sub"
        );
        DoubleForm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            ..self.clone()
        }
    }
}

impl Add for DoubleForm {
    type Output = DoubleForm;
    fn add(self, rhs: DoubleForm) -> DoubleForm {
        &self + &rhs
    }
}

impl Sub for DoubleForm {
    type Output = DoubleForm;
    fn sub(self, rhs: DoubleForm) -> DoubleForm {
        &self - &rhs
    }
}

impl AddAssign<&DoubleForm> for DoubleForm {
    fn add_assign(&mut self, rhs: &DoubleForm) {
        assert_eq!(
            (self.n, self.p, self.q),
            (rhs.n, rhs.p, rhs.q),
            "shape mismatch in add"
        );
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&DoubleForm> for DoubleForm {
    fn sub_assign(&mut self, rhs: &DoubleForm) {
        assert_eq!(
            (self.n, self.p, self.q),
            (rhs.n, rhs.p, rhs.q),
            "shape mismatch in sub"
        );
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Mul<f64> for &DoubleForm {
    type Output = DoubleForm;
    fn mul(self, s: f64) -> DoubleForm {
        self.scaled(s)
    }
}

impl Mul<f64> for DoubleForm {
    type Output = DoubleForm;
    fn mul(self, s: f64) -> DoubleForm {
        self.scaled(s)
    }
}

impl Neg for DoubleForm {
    type Output = DoubleForm;
    fn neg(self) -> DoubleForm {
        self.scaled(-1.0)
    }
}
