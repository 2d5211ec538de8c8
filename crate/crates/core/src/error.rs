use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("dimension {0} outside supported range 1..={max}", max = crate::MAX_DIM)]
    UnsupportedDimension(usize),

    #[error("bidegree mismatch: ({0},{1}) vs ({2},{3})")]
    BidegreeMismatch(usize, usize, usize, usize),

    #[error("degree out of range: {0}")]
    DegreeOutOfRange(String),

    #[error("invalid multi-index {entries:?} in dimension {n}")]
    InvalidMultiIndex { entries: Vec<usize>, n: usize },

    #[error("input is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("vectors span a degenerate plane (rank deficiency)")]
    RankDeficient,

    #[error("primitive decomposition needs n >= 2p (n = {n}, p = {p})")]
    DecompositionRange { n: usize, p: usize },

    #[error("dual routes disagree for {what}: {first} vs {second}")]
    DualRouteMismatch {
        what: &'static str,
        first: f64,
        second: f64,
    },

    #[error("metric not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },

    #[error("point {point:?} leaves the chart domain (stencil margin {margin:.3e})")]
    OutOfDomain { point: Vec<f64>, margin: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("at node {point:?}: {source}")]
    AtNode { point: Vec<f64>, source: Box<Error> },
}

impl Error {
    /// The innermost error, skipping node-location wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtNode { source, .. } => source.root(),
            other => other,
        }
    }

    /// Attaches a node location unless the error already carries a point.
    pub fn at_node(self, point: &[f64]) -> Error {
        match self {
            e @ (Error::NotPositiveDefinite { .. }
            | Error::OutOfDomain { .. }
            | Error::AtNode { .. }) => e,
            e => Error::AtNode {
                point: point.to_vec(),
                source: Box::new(e),
            },
        }
    }

    /// Loss of positive definiteness or another breakdown of the numerics,
    /// as opposed to invalid input.
    pub fn is_numerical_breakdown(&self) -> bool {
        matches!(
            self.root(),
            Error::NotPositiveDefinite { .. }
                | Error::DualRouteMismatch { .. }
                | Error::RankDeficient
        )
    }
}
