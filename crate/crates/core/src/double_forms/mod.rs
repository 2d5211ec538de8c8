//! Fiberwise algebra of double forms over a single inner-product space:
//! products, contraction, Hodge star, inner product, `F_h`, and the
//! primitive splitting of curvature structures.

mod curvature;
mod form;
mod identities;
mod multi_index;
mod primitive;

pub use curvature::{
    f_h, first_bianchi_residual, sectional_value, BianchiFlag, CurvatureStructure, STRUCTURE_TOL,
};
pub use form::{compound, metric_power, DoubleForm};
pub(crate) use identities::Tally;
pub use identities::{fiber_identity_suite, IdentityCheck, FIBER_TOL};
pub use multi_index::{sort_tuple, MultiIndex};
pub use primitive::{primitive_decompose, PrimitiveDecomposition};
