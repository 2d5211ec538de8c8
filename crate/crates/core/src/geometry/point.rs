use nalgebra::DMatrix;

use super::chart::{MetricChart, MetricJet};
use crate::double_forms::{CurvatureStructure, DoubleForm};
use crate::error::{Error, Result};

/// Levi-Civita data at one point of a chart.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    x: Vec<f64>,
    g: DMatrix<f64>,
    g_inv: DMatrix<f64>,
    /// `gamma[a][(m, i)] = Γ^m_{a i}`: the connection matrix in direction `∂_a`.
    gamma: Vec<DMatrix<f64>>,
    /// `dgamma[b][a][(m, i)] = ∂_b Γ^m_{a i}`.
    dgamma: Vec<Vec<DMatrix<f64>>>,
    /// Columns are the orthonormal frame vectors in coordinates.
    frame: DMatrix<f64>,
    coframe: DMatrix<f64>,
    sqrt_det: f64,
}

/// Orthonormal frame by Gram–Schmidt of the coordinate basis in the given
/// order, plus `√det g`.
pub fn orthonormal_frame(
    g: &DMatrix<f64>,
    order: Option<&[usize]>,
    x: &[f64],
) -> Result<(DMatrix<f64>, f64)> {
    let n = g.nrows();
    let identity: Vec<usize> = (0..n).collect();
    let order = order.unwrap_or(&identity);
    let permuted = DMatrix::from_fn(n, n, |i, j| g[(order[i], order[j])]);
    let chol = permuted
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite { point: x.to_vec() })?;
    let l = chol.l();
    let sqrt_det = l.diagonal().product();
    let lt_inv = l
        .transpose()
        .solve_upper_triangular(&DMatrix::identity(n, n))
        .ok_or_else(|| Error::NotPositiveDefinite { point: x.to_vec() })?;
    let mut frame = DMatrix::zeros(n, n);
    for (r, &o) in order.iter().enumerate() {
        frame.set_row(o, &lt_inv.row(r));
    }
    Ok((frame, sqrt_det))
}

impl PointGeometry {
    pub fn from_jet(x: &[f64], jet: MetricJet, order: Option<&[usize]>) -> Result<Self> {
        let n = x.len();
        let MetricJet { g, dg, ddg } = jet;
        let (frame, sqrt_det) = orthonormal_frame(&g, order, x)?;
        let coframe = frame
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::NotPositiveDefinite { point: x.to_vec() })?;
        let g_inv = &frame * frame.transpose();

        // Γ_{l,ai} = ½(∂_a g_li + ∂_i g_la − ∂_l g_ai) and its derivatives.
        let lower = |d: &dyn Fn(usize, usize, usize) -> f64, a: usize| {
            DMatrix::from_fn(n, n, |l, i| 0.5 * (d(a, l, i) + d(i, l, a) - d(l, a, i)))
        };
        let first = |a: usize, i: usize, j: usize| dg[a][(i, j)];
        let lower_gamma: Vec<DMatrix<f64>> = (0..n).map(|a| lower(&first, a)).collect();
        let gamma: Vec<DMatrix<f64>> = lower_gamma.iter().map(|lg| &g_inv * lg).collect();

        let dgamma = (0..n)
            .map(|b| {
                let second = |a: usize, i: usize, j: usize| ddg[b][a][(i, j)];
                let dg_inv = -(&g_inv * &dg[b] * &g_inv);
                (0..n)
                    .map(|a| &dg_inv * &lower_gamma[a] + &g_inv * lower(&second, a))
                    .collect()
            })
            .collect();

        Ok(Self {
            x: x.to_vec(),
            g,
            g_inv,
            gamma,
            dgamma,
            frame,
            coframe,
            sqrt_det,
        })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn point(&self) -> &[f64] {
        &self.x
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn inverse_metric(&self) -> &DMatrix<f64> {
        &self.g_inv
    }

    /// `Γ^m_{ij}`.
    pub fn christoffel(&self, m: usize, i: usize, j: usize) -> f64 {
        self.gamma[i][(m, j)]
    }

    /// Matrix `(m, i) ↦ Γ^m_{a i}`.
    pub fn connection(&self, a: usize) -> &DMatrix<f64> {
        &self.gamma[a]
    }

    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn coframe(&self) -> &DMatrix<f64> {
        &self.coframe
    }

    /// `√det g`, the Riemannian density in chart coordinates.
    pub fn volume_density(&self) -> f64 {
        self.sqrt_det
    }

    /// Coordinate components to orthonormal-frame coefficients.
    pub fn to_frame(&self, coordinate_form: &DoubleForm) -> Result<DoubleForm> {
        coordinate_form.pullback(&self.frame)
    }

    pub fn to_coordinates(&self, frame_form: &DoubleForm) -> Result<DoubleForm> {
        frame_form.pullback(&self.coframe)
    }

    /// A symmetric coordinate matrix `h_ij` as a frame `(1,1)` form.
    pub fn symmetric_to_frame(&self, h: &DMatrix<f64>) -> DoubleForm {
        DoubleForm::from_matrix(&(self.frame.transpose() * h * &self.frame))
    }

    /// Curvature matrix `F_ij = ∂_iΓ_j − ∂_jΓ_i + [Γ_i, Γ_j]`, so that
    /// `(F_ij)_{m l} = R^m_{ijl}`.
    fn curvature_matrix(&self, i: usize, j: usize) -> DMatrix<f64> {
        let (gi, gj) = (&self.gamma[i], &self.gamma[j]);
        &self.dgamma[i][j] - &self.dgamma[j][i] + gi * gj - gj * gi
    }

    /// Riemann tensor as a `(2,2)` form in coordinate components:
    /// `R(∂_i∧∂_j, ∂_k∧∂_l) = g_{km} R^m_{ijl}`, positive on spheres.
    pub fn riemann_coordinates(&self) -> DoubleForm {
        let n = self.dim();
        let mut blocks = vec![None; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                blocks[i * n + j] = Some(&self.g * self.curvature_matrix(i, j));
            }
        }
        DoubleForm::from_fn(n, 2, 2, |a, b| {
            let (i, j) = (a.entries()[0], a.entries()[1]);
            let (k, l) = (b.entries()[0], b.entries()[1]);
            blocks[i * n + j].as_ref().map_or(0.0, |m| m[(k, l)])
        })
    }

    /// Riemann curvature structure in the orthonormal frame.
    pub fn riemann(&self) -> Result<CurvatureStructure> {
        CurvatureStructure::symmetrize(&self.to_frame(&self.riemann_coordinates())?)
    }
}

/// Christoffel symbols `Γ^k_ij` at `x`, indexed `[k][i][j]`.
pub fn christoffel(chart: &MetricChart, x: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let p = chart.point(x)?;
    let n = p.dim();
    Ok((0..n)
        .map(|k| {
            (0..n)
                .map(|i| (0..n).map(|j| p.christoffel(k, i, j)).collect())
                .collect()
        })
        .collect())
}

/// Riemann curvature in the orthonormal frame at `x`.
pub fn riemann(chart: &MetricChart, x: &[f64]) -> Result<CurvatureStructure> {
    chart.point(x)?.riemann()
}
