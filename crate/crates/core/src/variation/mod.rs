//! Integration of curvature invariants and first-variation checks.

mod adjoint;
mod conformal;
mod derivative;
mod einstein;
mod functional;
mod gauss_bonnet;
mod grid;
mod operator_suite;
mod quadrature;

pub use adjoint::{
    verify_first_order_adjoint, verify_hessian_adjoint, AdjointReport, FIRST_ORDER_ADJOINT_SIGN,
    HESSIAN_ADJOINT_SIGN,
};
pub use conformal::{
    conformal_prediction, verify_conformal_variation, verify_zero_mean_conformal, ConformalReport,
    ZeroMeanReport,
};
pub use derivative::{
    curvature_derivative, verify_curvature_derivative, CurvatureDerivativeReport,
};
pub use einstein::{
    einstein_case, einstein_examples_suite, EinsteinCase, EinsteinSuite, Expectation,
};
pub use functional::*;
pub use gauss_bonnet::{gauss_bonnet_order, verify_gb_invariance, GaussBonnetReport};
pub use grid::{default_order, first_variation_grid, DirectionSpec, GridCase};
pub use operator_suite::{operator_suite, OperatorCheck, ADJOINT_TOL, OPERATOR_TOL};
pub use quadrature::QuadratureAtlas;
