//! Brute-force reference implementations used as test oracles. Everything
//! here works on raw index tuples and permutation sums, independent of the
//! bitmask machinery in the library.
#![allow(dead_code)]

use std::collections::HashMap;

use gbc_core::DoubleForm;
use itertools::Itertools;

/// Sign of the permutation sorting `t`, or `None` if `t` repeats an entry.
pub fn sort_sign(t: &[usize]) -> Option<(f64, Vec<usize>)> {
    let mut v = t.to_vec();
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return None;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    Some((sign, v))
}

/// A double form stored by its values on increasing index tuples.
#[derive(Debug, Clone)]
pub struct Dense {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub values: HashMap<(Vec<usize>, Vec<usize>), f64>,
}

impl Dense {
    pub fn from_fn(
        n: usize,
        p: usize,
        q: usize,
        mut f: impl FnMut(&[usize], &[usize]) -> f64,
    ) -> Self {
        let mut values = HashMap::new();
        for x in (0..n).combinations(p) {
            for y in (0..n).combinations(q) {
                values.insert((x.clone(), y.clone()), f(&x, &y));
            }
        }
        Self { n, p, q, values }
    }

    pub fn from_form(w: &DoubleForm) -> Self {
        Self::from_fn(w.n(), w.p(), w.q(), |x, y| w.eval_tuples(x, y))
    }

    /// Value on arbitrary tuples, by antisymmetry in each block.
    pub fn eval(&self, x: &[usize], y: &[usize]) -> f64 {
        match (sort_sign(x), sort_sign(y)) {
            (Some((sx, x)), Some((sy, y))) => sx * sy * self.values[&(x, y)],
            _ => 0.0,
        }
    }

    pub fn max_diff(&self, w: &DoubleForm) -> f64 {
        assert_eq!((self.n, self.p, self.q), (w.n(), w.p(), w.q()));
        self.values
            .iter()
            .map(|((x, y), v)| (v - w.eval_tuples(x, y)).abs())
            .fold(0.0, f64::max)
    }
}

fn perm_sign(perm: &[usize]) -> f64 {
    sort_sign(perm).map(|(s, _)| s).unwrap_or(0.0)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Exterior product by the full permutation sum
/// `(ω·θ)(x; y) = 1/(p! r! q! s!) Σ_{σ,τ} sgn σ sgn τ ω(x_σ; y_τ) θ(x_σ'; y_τ')`.
pub fn wedge(a: &Dense, b: &Dense) -> Dense {
    let (p, q) = (a.p + b.p, a.q + b.q);
    let n = a.n;
    let norm = factorial(a.p) * factorial(b.p) * factorial(a.q) * factorial(b.q);
    let perms_p: Vec<Vec<usize>> = (0..p).permutations(p).collect();
    let perms_q: Vec<Vec<usize>> = (0..q).permutations(q).collect();
    Dense::from_fn(n, p, q, |x, y| {
        let mut total = 0.0;
        for s in &perms_p {
            let xs: Vec<usize> = s.iter().map(|&i| x[i]).collect();
            let ss = perm_sign(s);
            for t in &perms_q {
                let ys: Vec<usize> = t.iter().map(|&i| y[i]).collect();
                total += ss
                    * perm_sign(t)
                    * a.eval(&xs[..a.p], &ys[..a.q])
                    * b.eval(&xs[a.p..], &ys[a.q..]);
            }
        }
        total / norm
    })
}

/// `cω(x; y) = Σ_m ω(e_m, x; e_m, y)`.
pub fn contract(a: &Dense) -> Dense {
    Dense::from_fn(a.n, a.p - 1, a.q - 1, |x, y| {
        (0..a.n)
            .map(|m| {
                let xm: Vec<usize> = std::iter::once(m).chain(x.iter().copied()).collect();
                let ym: Vec<usize> = std::iter::once(m).chain(y.iter().copied()).collect();
                a.eval(&xm, &ym)
            })
            .sum()
    })
}

/// `c^p ω` for a `(p,p)` form as a sum over every index tuple.
pub fn full_contraction(a: &Dense) -> f64 {
    assert_eq!(a.p, a.q);
    (0..a.p)
        .map(|_| 0..a.n)
        .multi_cartesian_product()
        .map(|m| a.eval(&m, &m))
        .sum()
}

/// The curvature tensor of constant sectional curvature `κ`:
/// `R(x₁,x₂; y₁,y₂) = κ(δ_{x₁y₁}δ_{x₂y₂} − δ_{x₁y₂}δ_{x₂y₁})`.
pub fn constant_curvature(n: usize, kappa: f64) -> Dense {
    let d = |a: usize, b: usize| f64::from(u8::from(a == b));
    Dense::from_fn(n, 2, 2, |x, y| {
        kappa * (d(x[0], y[0]) * d(x[1], y[1]) - d(x[0], y[1]) * d(x[1], y[0]))
    })
}

/// The metric as a `(1,1)` form.
pub fn metric(n: usize) -> Dense {
    Dense::from_fn(n, 1, 1, |x, y| f64::from(u8::from(x[0] == y[0])))
}

/// `ω(A e_{x₁}, …; A e_{y₁}, …)` by multilinear expansion.
pub fn pullback(a: &Dense, m: &nalgebra::DMatrix<f64>) -> Dense {
    let n = a.n;
    Dense::from_fn(n, a.p, a.q, |x, y| {
        let mut total = 0.0;
        for u in (0..a.p).map(|_| 0..n).multi_cartesian_product() {
            let cu: f64 = u.iter().zip(x).map(|(&ui, &xi)| m[(ui, xi)]).product();
            if cu == 0.0 {
                continue;
            }
            for v in (0..a.q).map(|_| 0..n).multi_cartesian_product() {
                let cv: f64 = v.iter().zip(y).map(|(&vi, &yi)| m[(vi, yi)]).product();
                total += cu * cv * a.eval(&u, &v);
            }
        }
        total
    })
}
