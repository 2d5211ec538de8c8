//! Riemannian geometry on coordinate charts.

mod catalog;
mod chart;
mod field;
mod operators;
mod point;

pub use catalog::{
    AmbientField, AmbientPolynomial, AmbientScalar, CatalogSpec, ConstantScalar, Embedding,
    Manifold, ProductField, PulledBackField, ScaledField, ShiftedScalar, SumField,
};
pub use chart::{
    Axis, AxisKind, DerivativeScheme, MetricChart, MetricJet, ParamBox, ScalarField, StepRule,
    SymmetricField,
};
pub use field::{sample_scalar, sample_symmetric, FormField};
pub use operators::{
    alternate_first, alternate_second, bianchi_d, bianchi_d_tilde, covariant_derivative, d_d_tilde,
    d_d_tilde_from_second, d_from_nabla, d_tilde_d, d_tilde_d_from_second, d_tilde_from_nabla,
    delta_from_nabla, delta_ops, delta_tilde_from_nabla, hessian_operator,
    second_covariant_derivative, star_route_sign, CovariantDerivative, DeltaOps, FirstOrder,
    JetStencil, SecondCovariantDerivative,
};
pub use point::{christoffel, orthonormal_frame, riemann, PointGeometry};

#[cfg(test)]
mod tests;
