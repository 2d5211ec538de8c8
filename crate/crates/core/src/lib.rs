//! Double forms, curvature structures and Gauss–Bonnet curvatures.
//!
//! The crate is layered:
//!
//! * [`double_forms`]: pointwise algebra on `Λ^p ⊗ Λ^q` in an orthonormal frame.
//! * [`invariants`]: Gauss–Bonnet curvatures `h_2k`, Einstein–Lovelock tensors
//!   `T_2k`, `(p,q)`-curvature tensors and generalized-Einstein deviation.
//! * [`geometry`]: metrics given on coordinate charts, Levi-Civita data,
//!   curvature, covariant derivatives and the second Bianchi operators.
//! * [`variation`]: quadrature on closed manifolds and numerical checks of the
//!   first-variation formulas for `H_2k = ∫ h_2k μ_g`.

pub mod basis;
pub mod double_forms;
pub mod error;
pub mod geometry;
pub mod invariants;
pub mod jet;
pub mod sampling;
pub mod variation;

/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

pub use double_forms::{CurvatureStructure, DoubleForm, MultiIndex, PrimitiveDecomposition};
pub use error::{Error, Result};
