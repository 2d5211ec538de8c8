//! Run manifests: what to compute, on which manifold, with which numerics.

use std::path::PathBuf;

use gbc_core::geometry::CatalogSpec;
use gbc_core::variation::DirectionSpec;
use serde::{Deserialize, Serialize};

/// The five commands; also the `operation` field of a manifest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Operation {
    Invariants,
    VerifyIdentities,
    Variation,
    GaussBonnet,
    Einstein,
}

impl Operation {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Invariants => "invariants",
            Self::VerifyIdentities => "verify-identities",
            Self::Variation => "variation",
            Self::GaussBonnet => "gauss-bonnet",
            Self::Einstein => "einstein",
        }
    }

    fn uses_orders(self) -> bool {
        matches!(self, Self::Invariants | Self::Variation | Self::Einstein)
    }
}

/// Tolerance overrides per family of checks; unset entries use the
/// library defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauss_bonnet: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub einstein: Option<f64>,
}

impl Tolerances {
    /// The entry governing the main check of `op`.
    pub fn slot(&mut self, op: Operation) -> &mut Option<f64> {
        match op {
            Operation::Invariants | Operation::VerifyIdentities => &mut self.identity,
            Operation::Variation => &mut self.variation,
            Operation::GaussBonnet => &mut self.gauss_bonnet,
            Operation::Einstein => &mut self.einstein,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Numeric {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Random samples per dimension for identity and equivalence suites.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Perturbation amplitude for Gauss–Bonnet invariance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    /// Number of perturbed metrics for Gauss–Bonnet invariance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbations: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    /// Report file; standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifold: Option<CatalogSpec>,
    #[serde(default)]
    pub k: Vec<usize>,
    pub operation: Operation,
    #[serde(default)]
    pub numeric: Numeric,
    /// Deformation direction for `variation`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<DirectionSpec>,
    #[serde(default)]
    pub output: Output,
}

/// Largest tensor-product quadrature grid a run may request.
pub const MAX_NODES: f64 = 4.0e6;
/// Largest per-axis quadrature order.
pub const MAX_ORDER: usize = 64;

impl Manifest {
    pub fn new(operation: Operation) -> Self {
        Self {
            manifold: None,
            k: Vec::new(),
            operation,
            numeric: Numeric::default(),
            direction: None,
            output: Output::default(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.numeric.seed.unwrap_or(0)
    }

    pub fn dim(&self) -> Option<usize> {
        self.manifold.as_ref().map(CatalogSpec::dim)
    }

    /// Fills defaults that the report should echo: the seed and `k = [1]`.
    pub fn with_defaults(mut self) -> Self {
        self.numeric.seed.get_or_insert(0);
        if self.k.is_empty() && self.operation.uses_orders() && self.manifold.is_some() {
            self.k.push(1);
        }
        self
    }

    /// Every problem with the manifest, in a stable order.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        let op = self.operation;
        match &self.manifold {
            Some(spec) => errs.extend(spec.validate()),
            None if op != Operation::Einstein => {
                errs.push(format!("{} needs a manifold", op.as_str()))
            }
            None => {}
        }
        let n = self.dim();
        if op.uses_orders() {
            if let Some(n) = n {
                for &k in &self.k {
                    if k == 0 {
                        errs.push("k must be at least 1".into());
                    } else if 2 * k > n {
                        errs.push(format!("2k exceeds n (k = {k}, n = {n})"));
                    }
                }
            } else if !self.k.is_empty() {
                errs.push("k given without a manifold".into());
            }
        } else if !self.k.is_empty() {
            errs.push(format!("{} does not take k", op.as_str()));
        }
        if op == Operation::GaussBonnet {
            match &self.manifold {
                Some(CatalogSpec::Sphere { n, r }) => {
                    if *n != 2 && *n != 4 {
                        errs.push(format!(
                            "gauss-bonnet supports spheres of dimension 2 or 4, got {n}"
                        ));
                    }
                    if *r != 1.0 {
                        errs.push(
                            "gauss-bonnet compares against the unit sphere; use r = 1".into(),
                        );
                    }
                }
                Some(_) => errs.push("gauss-bonnet needs a sphere manifold".into()),
                None => {}
            }
            if let Some(a) = self.numeric.amplitude {
                if !(a.is_finite() && (0.0..=0.5).contains(&a)) {
                    errs.push("amplitude must lie in [0, 0.5]".into());
                }
            }
            if let Some(p) = self.numeric.perturbations {
                if !(1..=16).contains(&p) {
                    errs.push("perturbations must lie in 1..=16".into());
                }
            }
        } else {
            if self.numeric.amplitude.is_some() {
                errs.push(format!("{} does not take numeric.amplitude", op.as_str()));
            }
            if self.numeric.perturbations.is_some() {
                errs.push(format!(
                    "{} does not take numeric.perturbations",
                    op.as_str()
                ));
            }
        }
        if self.direction.is_some() && op != Operation::Variation {
            errs.push(format!("{} does not take a direction", op.as_str()));
        }
        if let Some(t) = self.numeric.fd_step {
            if !(t.is_finite() && t > 0.0 && t < 0.1) {
                errs.push(format!("fd_step must lie in (0, 0.1), got {t}"));
            }
        }
        if let Some(q) = self.numeric.quad_order {
            if !(1..=MAX_ORDER).contains(&q) {
                errs.push(format!("quad_order must lie in 1..={MAX_ORDER}, got {q}"));
            } else if let Some(n) = n {
                if (q as f64).powi(n as i32) > MAX_NODES {
                    errs.push(format!(
                        "quad_order {q} in dimension {n} exceeds {MAX_NODES:.0} nodes"
                    ));
                }
            }
        }
        if let Some(t) = self.numeric.trials {
            if !(1..=10_000).contains(&t) {
                errs.push(format!("trials must lie in 1..=10000, got {t}"));
            }
        }
        let tol = &self.numeric.tolerances;
        for (name, value) in [
            ("identity", tol.identity),
            ("variation", tol.variation),
            ("gauss_bonnet", tol.gauss_bonnet),
            ("einstein", tol.einstein),
        ] {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    errs.push(format!("tolerances.{name} must be positive, got {v}"));
                }
            }
        }
        errs
    }
}

/// Parses and validates a JSON manifest, collecting all problems.
pub fn parse_manifest(text: &str) -> Result<Manifest, Vec<String>> {
    let manifest: Manifest =
        serde_json::from_str(text).map_err(|e| vec![format!("manifest: {e}")])?;
    let manifest = manifest.with_defaults();
    let errs = manifest.validate();
    if errs.is_empty() {
        Ok(manifest)
    } else {
        Err(errs)
    }
}
