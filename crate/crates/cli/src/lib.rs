//! Command-line front end: scenario files, verification commands and JSON reports.

pub mod checks;
pub mod config;
pub mod mesh_cmd;
pub mod report;
pub mod solve;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use semisym_core::closed_forms::{RGeneral, SphereL};
use semisym_core::{CompactForm, EnvelopeMap, GeomError, HypersurfaceMap, Scalar, SolutionParams};

pub use config::Scenario;
pub use report::{Record, Report, Verdict};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// A report plus the optional text artifact (CSV field or OBJ mesh).
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Report,
    pub artifact: Option<String>,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The closed-form hypersurface: the compact form when `b != 0`, the
/// envelope construction otherwise.
#[derive(Clone, Copy, Debug)]
pub enum Hypersurface {
    Compact(CompactForm),
    Envelope(EnvelopeMap<SphereL, RGeneral>),
}

impl Hypersurface {
    pub fn new(p: SolutionParams) -> Self {
        match CompactForm::new(p) {
            Ok(c) => Hypersurface::Compact(c),
            Err(_) => Hypersurface::Envelope(EnvelopeMap { l: SphereL(p), r: RGeneral(p) }),
        }
    }
}

impl HypersurfaceMap for Hypersurface {
    fn eval<S: Scalar>(&self, x: S, y: S, w: S) -> semisym_core::Result<[S; 4]> {
        match self {
            Hypersurface::Compact(c) => c.eval(x, y, w),
            Hypersurface::Envelope(e) => e.eval(x, y, w),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "semisym", version, about = "Checks and solvers for bi-umbilical semi-symmetric hypersurfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Overrides the default tolerance of the primary checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Relative threshold below which a principal curvature counts as zero.
    #[arg(long, global = true)]
    pub zero_tol: Option<f64>,
    /// Number of random sample points.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Residual, metric, curvature and eigenvalue checks of the closed forms.
    VerifyClosedForm {
        /// Perturb the support function off the solution family.
        #[arg(long)]
        tamper: bool,
    },
    /// Finite-difference solve of the support-function system.
    SolveR {
        /// CSV of the solved field.
        #[arg(long)]
        field_out: Option<PathBuf>,
    },
    /// ODE construction of the support function.
    SolveRConstructive {
        #[arg(long)]
        field_out: Option<PathBuf>,
    },
    /// Gauss-Newton solve of the unit isothermal surface system.
    SolveL,
    /// Semi-symmetry and nullity at random regular points.
    CheckSemisymmetry,
    /// Reflection pair and characteristic polynomial.
    CharPoly,
    /// OBJ export of w-slices.
    Mesh {
        #[arg(long)]
        obj: Option<PathBuf>,
    },
}

impl Cli {
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let mut s = match &self.config {
            Some(path) => Scenario::load(path)?,
            None => Scenario::default(),
        };
        s.seed = self.seed.or(s.seed);
        s.tol = self.tol.or(s.tol);
        s.samples = self.samples.or(s.samples);
        s.zero_tol = self.zero_tol.or(s.zero_tol);
        if !(s.zero_tol() > 0.0 && s.zero_tol() < 1.0) {
            return Err(CliError::Config("zero_tol must lie in (0, 1)".into()));
        }
        if s.samples == Some(0) {
            return Err(CliError::Config("samples must be positive".into()));
        }
        Ok(s)
    }

    /// Where the command's artifact goes, if anywhere.
    pub fn artifact_path(&self) -> Option<&PathBuf> {
        match &self.command {
            Command::SolveR { field_out } | Command::SolveRConstructive { field_out } => field_out.as_ref(),
            Command::Mesh { obj } => obj.as_ref(),
            _ => None,
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let s = cli.scenario()?;
    let bare = |report| Outcome { report, artifact: None };
    match &cli.command {
        Command::VerifyClosedForm { tamper } => {
            checks::verify_closed_form(&s, checks::VerifyOptions { tamper: *tamper }).map(bare)
        }
        Command::SolveR { .. } => solve::solve_r(&s),
        Command::SolveRConstructive { .. } => solve::solve_r_constructive_cmd(&s),
        Command::SolveL => solve::solve_l(&s),
        Command::CheckSemisymmetry => checks::check_semisymmetry(&s).map(bare),
        Command::CharPoly => checks::char_poly_check(&s).map(bare),
        Command::Mesh { .. } => mesh_cmd::mesh(&s),
    }
}

/// Runs the command and writes its outputs; returns the process exit code.
pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    let outcome = run(cli)?;
    if let (Some(path), Some(text)) = (cli.artifact_path(), &outcome.artifact) {
        std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    let json = outcome.report.to_json();
    match &cli.out {
        Some(path) => std::fs::write(path, &json).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => println!("{json}"),
    }
    Ok(if outcome.report.passed() { 0 } else { 1 })
}
