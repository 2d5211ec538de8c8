//! Command-line flags and their translation into a manifest.

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gbc_core::geometry::CatalogSpec;
use gbc_core::variation::DirectionSpec;

use crate::manifest::{parse_manifest, Format, Manifest, Operation};

#[derive(Debug, Parser)]
#[command(
    name = "gbc",
    version,
    about = "Gauss-Bonnet curvatures, Lovelock tensors and their variational checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate h_2k and cross-check the pointwise invariants.
    Invariants(CommonArgs),
    /// Run the randomized double-form and curvature identity suites in dimension n.
    VerifyIdentities(CommonArgs),
    /// Compare the finite-difference derivative of H_2k with its gradient formula.
    Variation(CommonArgs),
    /// Check that H_n of a sphere is unchanged by metric perturbations (n = 2 or 4).
    GaussBonnet(CommonArgs),
    /// Measure the (2k)-Einstein condition, or run the built-in examples without a manifold.
    Einstein(CommonArgs),
}

impl Command {
    pub fn split(self) -> (Operation, CommonArgs) {
        match self {
            Self::Invariants(a) => (Operation::Invariants, a),
            Self::VerifyIdentities(a) => (Operation::VerifyIdentities, a),
            Self::Variation(a) => (Operation::Variation, a),
            Self::GaussBonnet(a) => (Operation::GaussBonnet, a),
            Self::Einstein(a) => (Operation::Einstein, a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ManifoldKind {
    Sphere,
    FlatTorus,
    PerturbedSphere,
    ConformalFlat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionKind {
    Metric,
    Conformal,
    Random,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON manifest; inline flags below override its numeric and output fields.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Catalog manifold built from --n, --r, --amplitude and --periods.
    #[arg(long, value_enum)]
    pub manifold: Option<ManifoldKind>,
    /// Dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Orders k, comma separated or repeated.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Sphere radius.
    #[arg(long)]
    pub r: Option<f64>,
    /// Flat torus periods, comma separated (default 2π on every axis).
    #[arg(long, value_delimiter = ',')]
    pub periods: Vec<f64>,
    /// Metric perturbation amplitude (perturbed-sphere, conformal-flat, gauss-bonnet).
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Number of perturbed metrics for gauss-bonnet.
    #[arg(long)]
    pub perturbations: Option<usize>,
    /// Master seed for every random stream (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Random samples per dimension for the identity and equivalence suites.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Quadrature nodes per axis (default depends on n).
    #[arg(long)]
    pub quad_order: Option<usize>,
    /// Finite-difference step in the deformation parameter t.
    #[arg(long)]
    pub fd_step: Option<f64>,
    /// Tolerance for the main check of the command.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Deformation direction for variation (seeded by --seed).
    #[arg(long, value_enum)]
    pub direction: Option<DirectionKind>,
    /// Report file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report format (default json).
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl CommonArgs {
    fn has_manifold_flags(&self) -> bool {
        self.manifold.is_some() || self.n.is_some() || self.r.is_some() || !self.periods.is_empty()
    }

    fn inline_manifold(&self, op: Operation, errs: &mut Vec<String>) -> Option<CatalogSpec> {
        if !self.has_manifold_flags() {
            return None;
        }
        let Some(n) = self.n.or(if self.periods.is_empty() {
            None
        } else {
            Some(self.periods.len())
        }) else {
            errs.push("--n is required to build a manifold".into());
            return None;
        };
        let r = self.r.unwrap_or(1.0);
        // For gauss-bonnet the amplitude belongs to the invariance check.
        let amplitude = if op == Operation::GaussBonnet {
            None
        } else {
            self.amplitude
        };
        Some(match self.manifold.unwrap_or(ManifoldKind::Sphere) {
            ManifoldKind::Sphere => CatalogSpec::Sphere { n, r },
            ManifoldKind::FlatTorus => CatalogSpec::FlatTorus {
                periods: if self.periods.is_empty() {
                    vec![2.0 * PI; n]
                } else {
                    self.periods.clone()
                },
            },
            ManifoldKind::PerturbedSphere => CatalogSpec::PerturbedSphere {
                n,
                r,
                amplitude: amplitude.unwrap_or(0.2),
                seed: self.seed.unwrap_or(0),
            },
            ManifoldKind::ConformalFlat => CatalogSpec::ConformalFlat {
                n,
                amplitude: amplitude.unwrap_or(0.2),
                seed: self.seed.unwrap_or(0),
            },
        })
    }

    /// The manifest for `op`: the file given by `--manifest` (if any) with
    /// inline flags applied, validated with all problems collected.
    pub fn to_manifest(&self, op: Operation) -> Result<Manifest, Vec<String>> {
        let mut errs = Vec::new();
        let mut manifest = match &self.manifest {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| vec![format!("{}: {e}", path.display())])?;
                let m = parse_manifest(&text)?;
                if m.operation != op {
                    errs.push(format!(
                        "manifest operation {} does not match command {}",
                        m.operation.as_str(),
                        op.as_str()
                    ));
                }
                if self.has_manifold_flags() {
                    errs.push(
                        "--manifold, --n, --r and --periods cannot be combined with --manifest"
                            .into(),
                    );
                }
                m
            }
            None => {
                let mut m = Manifest::new(op);
                m.manifold = self.inline_manifold(op, &mut errs);
                m
            }
        };
        if !self.k.is_empty() {
            manifest.k = self.k.clone();
        }
        let numeric = &mut manifest.numeric;
        numeric.seed = self.seed.or(numeric.seed);
        numeric.trials = self.trials.or(numeric.trials);
        numeric.quad_order = self.quad_order.or(numeric.quad_order);
        numeric.fd_step = self.fd_step.or(numeric.fd_step);
        numeric.perturbations = self.perturbations.or(numeric.perturbations);
        if op == Operation::GaussBonnet {
            numeric.amplitude = self.amplitude.or(numeric.amplitude);
        }
        if let Some(t) = self.tol {
            *numeric.tolerances.slot(op) = Some(t);
        }
        if let Some(d) = self.direction {
            let seed = manifest.numeric.seed.unwrap_or(0);
            manifest.direction = Some(match d {
                DirectionKind::Metric => DirectionSpec::Metric,
                DirectionKind::Conformal => DirectionSpec::Conformal { seed },
                DirectionKind::Random => DirectionSpec::RandomSymmetric { seed },
            });
        }
        if let Some(path) = &self.out {
            manifest.output.path = Some(path.clone());
        }
        if let Some(f) = self.format {
            manifest.output.format = match f {
                FormatArg::Json => Format::Json,
                FormatArg::Csv => Format::Csv,
            };
        }
        let manifest = manifest.with_defaults();
        errs.extend(manifest.validate());
        if errs.is_empty() {
            Ok(manifest)
        } else {
            Err(errs)
        }
    }
}
