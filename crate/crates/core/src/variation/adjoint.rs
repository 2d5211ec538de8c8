use serde::Serialize;

use super::quadrature::QuadratureAtlas;
use crate::error::{Error, Result};
use crate::geometry::{hessian_operator, FirstOrder, FormField};

/// `⟨A ω₁, ω₂⟩_{L²}` against `σ ⟨ω₁, B ω₂⟩_{L²}`.
#[derive(Debug, Clone, Serialize)]
pub struct AdjointReport {
    pub pair: String,
    pub bidegree: (usize, usize),
    pub lhs: f64,
    pub rhs: f64,
    pub sign: f64,
    pub abs_err: f64,
    /// `‖Aω₁‖ ‖ω₂‖ + ‖ω₁‖ ‖Bω₂‖` in `L²`.
    pub scale: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Both `L²` pairings accumulated at every node.
fn pairings(
    atlas: &QuadratureAtlas,
    pair: &str,
    bidegree: (usize, usize),
    sign: f64,
    tolerance: f64,
    eval: impl Fn(&[f64]) -> Result<[f64; 6]> + Sync,
) -> Result<AdjointReport> {
    let rows = atlas.map_nodes(|x| {
        let density = atlas.density(x)?;
        Ok(eval(x)?.map(|v| v * density))
    })?;
    let column = |i: usize| atlas.weighted_sum(&rows.iter().map(|r| r[i]).collect::<Vec<_>>());
    let (lhs, rhs) = (column(0), column(1));
    let scale = (column(2) * column(3)).sqrt() + (column(4) * column(5)).sqrt();
    let abs_err = (lhs - sign * rhs).abs();
    let rel_err = if scale > 0.0 {
        abs_err / scale
    } else {
        abs_err
    };
    Ok(AdjointReport {
        pair: pair.to_string(),
        bidegree,
        lhs,
        rhs,
        sign,
        abs_err,
        scale,
        rel_err,
        tolerance,
        pass: rel_err <= tolerance,
    })
}

/// Sign `σ` with `⟨Dω₁, ω₂⟩ = σ⟨ω₁, δω₂⟩` and `⟨D̃ω₁, ω₂⟩ = σ⟨ω₁, δ̃ω₂⟩`.
pub const FIRST_ORDER_ADJOINT_SIGN: f64 = -1.0;

/// Checks that `δ` (or `δ̃`) is the formal adjoint of `D` (or `D̃`) up to
/// `FIRST_ORDER_ADJOINT_SIGN`. `ω₁` has bidegree `(p, q)`; `ω₂` has the
/// bidegree of `Dω₁` (or `D̃ω₁`).
pub fn verify_first_order_adjoint(
    atlas: &QuadratureAtlas,
    tilde: bool,
    omega1: &FormField,
    omega2: &FormField,
    tolerance: f64,
) -> Result<AdjointReport> {
    let chart = atlas.chart();
    let n = chart.dim();
    let (p, q) = omega1.bidegree();
    let (forward, backward, name) = if tilde {
        (FirstOrder::DTilde, FirstOrder::DeltaTilde, "D̃ / δ̃")
    } else {
        (FirstOrder::D, FirstOrder::Delta, "D / δ")
    };
    if forward.image(n, p, q) != Some(omega2.bidegree()) {
        return Err(Error::DegreeOutOfRange(format!(
            "{name}: ω₂ has bidegree {:?}, expected the image of ({p},{q})",
            omega2.bidegree()
        )));
    }
    pairings(
        atlas,
        name,
        (p, q),
        FIRST_ORDER_ADJOINT_SIGN,
        tolerance,
        |x| {
            let geom = chart.point(x)?;
            let (w1, w2) = (omega1.eval(&geom)?, omega2.eval(&geom)?);
            let a = forward.apply(chart, omega1, x)?;
            let b = backward.apply(chart, omega2, x)?;
            Ok([
                a.inner(&w2)?,
                w1.inner(&b)?,
                a.inner(&a)?,
                w2.inner(&w2)?,
                w1.inner(&w1)?,
                b.inner(&b)?,
            ])
        },
    )
}

/// Sign `σ` with `⟨(DD̃ + D̃D)ω₁, ω₂⟩ = σ⟨ω₁, (δ̃δ + δδ̃)ω₂⟩`.
pub const HESSIAN_ADJOINT_SIGN: f64 = 1.0;

/// Checks that `δ̃δ + δδ̃` is the formal adjoint of `DD̃ + D̃D`, up to
/// `HESSIAN_ADJOINT_SIGN`. `ω₁` has bidegree `(p, q)` with `p, q < n` and
/// `ω₂` has bidegree `(p + 1, q + 1)`.
pub fn verify_hessian_adjoint(
    atlas: &QuadratureAtlas,
    omega1: &FormField,
    omega2: &FormField,
    tolerance: f64,
) -> Result<AdjointReport> {
    let chart = atlas.chart();
    let n = chart.dim();
    let (p, q) = omega1.bidegree();
    if p >= n || q >= n {
        return Err(Error::DegreeOutOfRange(format!(
            "adjoint of DD̃ + D̃D needs p, q < n, got ({p},{q})"
        )));
    }
    if omega2.bidegree() != (p + 1, q + 1) {
        return Err(Error::DegreeOutOfRange(format!(
            "ω₂ has bidegree {:?}, expected ({}, {})",
            omega2.bidegree(),
            p + 1,
            q + 1
        )));
    }
    let delta = FirstOrder::Delta.field(chart, omega2)?;
    let delta_tilde = FirstOrder::DeltaTilde.field(chart, omega2)?;
    pairings(
        atlas,
        "DD̃ + D̃D / δ̃δ + δδ̃",
        (p, q),
        HESSIAN_ADJOINT_SIGN,
        tolerance,
        |x| {
            let geom = chart.point(x)?;
            let (w1, w2) = (omega1.eval(&geom)?, omega2.eval(&geom)?);
            let a = hessian_operator(chart, omega1, x)?;
            let b = FirstOrder::DeltaTilde.apply(chart, &delta, x)?
                + FirstOrder::Delta.apply(chart, &delta_tilde, x)?;
            Ok([
                a.inner(&w2)?,
                w1.inner(&b)?,
                a.inner(&a)?,
                w2.inner(&w2)?,
                w1.inner(&w1)?,
                b.inner(&b)?,
            ])
        },
    )
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::geometry::Manifold;

    fn torus_atlas(n: usize) -> QuadratureAtlas {
        QuadratureAtlas::new(Manifold::flat_torus(&vec![2.0 * PI; n]).chart(), 4).unwrap()
    }

    #[test]
    fn first_order_pairs_in_two_and_three_dimensions() {
        for n in 2..=3 {
            let atlas = torus_atlas(n);
            for p in 0..n {
                for q in 0..=n {
                    for tilde in [false, true] {
                        let (w1, w2) = if tilde {
                            (
                                FormField::random_trig(n, q, p, 1),
                                FormField::random_trig(n, q, p + 1, 2),
                            )
                        } else {
                            (
                                FormField::random_trig(n, p, q, 1),
                                FormField::random_trig(n, p + 1, q, 2),
                            )
                        };
                        let r = verify_first_order_adjoint(&atlas, tilde, &w1, &w2, 1e-9).unwrap();
                        assert!(r.pass, "{r:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn first_order_pairing_is_not_trivially_zero() {
        let atlas = torus_atlas(3);
        let w1 = FormField::random_trig(3, 1, 1, 5);
        let noise = FormField::random_trig(3, 2, 1, 6);
        let w2 = FirstOrder::D
            .field(atlas.chart(), &w1)
            .unwrap()
            .add(&noise)
            .unwrap();
        let r = verify_first_order_adjoint(&atlas, false, &w1, &w2, 1e-9).unwrap();
        assert!(r.pass && r.lhs.abs() > 0.1 * r.scale, "{r:?}");
        // The opposite sign fails.
        assert!((r.lhs + FIRST_ORDER_ADJOINT_SIGN * r.rhs).abs() > 0.1 * r.scale);
    }

    #[test]
    fn second_order_pair() {
        let atlas = torus_atlas(3);
        for (p, q) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (1, 2)] {
            let w1 = FormField::random_trig(3, p, q, 7);
            let w2 = FormField::random_trig(3, p + 1, q + 1, 8);
            let r = verify_hessian_adjoint(&atlas, &w1, &w2, 1e-9).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn mismatched_bidegrees_are_rejected() {
        let atlas = torus_atlas(2);
        let w = FormField::random_trig(2, 1, 1, 1);
        assert!(verify_first_order_adjoint(&atlas, false, &w, &w, 1e-9).is_err());
        assert!(verify_hessian_adjoint(&atlas, &w, &w, 1e-9).is_err());
    }
}
