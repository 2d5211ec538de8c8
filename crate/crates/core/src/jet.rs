//! Second-order forward-mode jets: value, gradient and Hessian with respect
//! to up to [`MAX_DIM`] chart coordinates. Catalog metrics are written once
//! in terms of [`Jet`] arithmetic, which yields exact first and second
//! derivatives for the curvature computations.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use crate::MAX_DIM;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    n: u8,
    pub v: f64,
    pub d: [f64; MAX_DIM],
    pub h: [[f64; MAX_DIM]; MAX_DIM],
}

impl Jet {
    pub fn constant(n: usize, v: f64) -> Self {
        Self {
            n: n as u8,
            v,
            d: [0.0; MAX_DIM],
            h: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    /// The coordinate function `x_i` at value `v`.
    pub fn variable(n: usize, i: usize, v: f64) -> Self {
        let mut j = Self::constant(n, v);
        j.d[i] = 1.0;
        j
    }

    /// Seeds all coordinates of the point `x`.
    pub fn seed(x: &[f64]) -> Vec<Jet> {
        (0..x.len())
            .map(|i| Jet::variable(x.len(), i, x[i]))
            .collect()
    }

    /// Constant jets carrying only values.
    pub fn values(x: &[f64]) -> Vec<Jet> {
        x.iter().map(|&v| Jet::constant(x.len(), v)).collect()
    }

    pub fn dim(&self) -> usize {
        self.n as usize
    }

    /// Composition with a scalar function given its value and first two
    /// derivatives at `self.v`.
    #[inline]
    pub fn chain(&self, f: f64, f1: f64, f2: f64) -> Self {
        let n = self.dim();
        let mut out = Self::constant(n, f);
        for i in 0..n {
            out.d[i] = f1 * self.d[i];
        }
        for i in 0..n {
            for j in 0..n {
                out.h[i][j] = f1 * self.h[i][j] + f2 * self.d[i] * self.d[j];
            }
        }
        out
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(&self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn powi(&self, k: i32) -> Self {
        if k == 0 {
            return Self::constant(self.dim(), 1.0);
        }
        let kf = k as f64;
        self.chain(
            self.v.powi(k),
            kf * self.v.powi(k - 1),
            kf * (kf - 1.0) * self.v.powi(k - 2),
        )
    }

    pub fn scale(&self, s: f64) -> Self {
        let n = self.dim();
        let mut out = *self;
        out.v *= s;
        for i in 0..n {
            out.d[i] *= s;
            for j in 0..n {
                out.h[i][j] *= s;
            }
        }
        out
    }

    /// `self + s·other` in place.
    #[inline]
    pub fn add_scaled(&mut self, other: &Jet, s: f64) {
        let n = self.dim().max(other.dim());
        self.n = n as u8;
        self.v += s * other.v;
        for i in 0..n {
            self.d[i] += s * other.d[i];
            for j in 0..n {
                self.h[i][j] += s * other.h[i][j];
            }
        }
    }

    /// `self += a·b` in place.
    #[inline]
    pub fn add_product(&mut self, a: &Jet, b: &Jet) {
        let n = a.dim().max(b.dim()).max(self.dim());
        self.n = n as u8;
        self.v += a.v * b.v;
        for i in 0..n {
            self.d[i] += a.v * b.d[i] + b.v * a.d[i];
        }
        for i in 0..n {
            for j in 0..n {
                let cross = a.d[i] * b.d[j] + a.d[j] * b.d[i];
                self.h[i][j] += (a.v * b.h[i][j] + b.v * a.h[i][j]) + cross;
            }
        }
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self.add_scaled(&rhs, 1.0);
        self
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        self.add_scaled(&rhs, 1.0);
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: Jet) -> Jet {
        self.add_scaled(&rhs, -1.0);
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = Jet::constant(self.dim().max(rhs.dim()), 0.0);
        out.add_product(&self, &rhs);
        out
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(s)
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, s: f64) -> Jet {
        self.v += s;
        self
    }
}

impl Div for Jet {
    type Output = Jet;
    fn div(self, rhs: Jet) -> Jet {
        let inv = rhs.chain(
            1.0 / rhs.v,
            -1.0 / (rhs.v * rhs.v),
            2.0 / (rhs.v * rhs.v * rhs.v),
        );
        self * inv
    }
}
