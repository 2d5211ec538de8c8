use super::curvature::CurvatureStructure;
use super::form::{metric_power, DoubleForm};
use crate::error::{Error, Result};

/// `ω = Σ_j g^j · ω_j` with every `ω_j` traceless; `ω_j` has bidegree
/// `(p−j, p−j)` and `ω_p` is a scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveDecomposition {
    components: Vec<DoubleForm>,
}

impl PrimitiveDecomposition {
    pub fn components(&self) -> &[DoubleForm] {
        &self.components
    }

    /// The component multiplying `g^j`.
    pub fn component(&self, j: usize) -> &DoubleForm {
        &self.components[j]
    }

    /// The traceless component of bidegree `(d, d)`.
    pub fn component_of_degree(&self, d: usize) -> &DoubleForm {
        let p = self.components.len() - 1;
        &self.components[p - d]
    }

    /// The summand `g^j ω_j`.
    pub fn summand(&self, j: usize) -> Result<DoubleForm> {
        let c = &self.components[j];
        metric_power(c.n(), j).wedge(c)
    }

    pub fn reassemble(&self) -> Result<DoubleForm> {
        let mut acc = self.summand(0)?;
        for j in 1..self.components.len() {
            acc += &self.summand(j)?;
        }
        Ok(acc)
    }
}

/// `c^j(g^j ω) / ω` for traceless `ω` of degree `r` in dimension `n`, from
/// `c(g^k ω) = g^k cω + k(n − 2r − k + 1) g^{k−1} ω`.
fn trace_factor(n: usize, r: usize, j: usize) -> f64 {
    (1..=j)
        .map(|s| s as f64 * (n as f64 + 1.0 - 2.0 * r as f64 - s as f64))
        .product()
}

/// Splits `ω ∈ C^p` into metric multiples of traceless parts. Requires
/// `n ≥ 2p`, where the splitting is unique. The top scalar is read off
/// `c^p ω`; each lower component comes from `c^j` of the remainder.
pub fn primitive_decompose(omega: &CurvatureStructure) -> Result<PrimitiveDecomposition> {
    let n = omega.n();
    let p = omega.degree();
    if n < 2 * p {
        return Err(Error::DecompositionRange { n, p });
    }
    let mut rest = omega.form().clone();
    let mut components = vec![DoubleForm::zero(n, 0, 0); p + 1];
    for j in (0..=p).rev() {
        let r = p - j;
        let factor = trace_factor(n, r, j);
        let comp = rest.contract_times(j)?.scaled(1.0 / factor);
        rest -= &metric_power(n, j).wedge(&comp)?;
        components[j] = comp;
    }
    Ok(PrimitiveDecomposition { components })
}
