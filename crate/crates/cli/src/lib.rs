//! Batch front end: parses a [`RunManifest`], runs one command and produces a
//! JSON [`Report`] (plus CSV for trajectories).
//!
//! Exit status: 0 when every required check is within tolerance, 1 when a
//! check fails, 2 when inputs cannot be read or parsed.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod inputs;
pub mod report;

pub use report::{Check, Report};

/// Environment variable holding a global tolerance multiplier.
pub const TOL_OVERRIDE_VAR: &str = "RMATRIX_TOL_OVERRIDE";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {0}: {1}")]
    Read(PathBuf, std::io::Error),
    #[error("cannot parse {0}: {1}")]
    Parse(PathBuf, serde_json::Error),
    #[error("cannot write {0}: {1}")]
    Write(PathBuf, std::io::Error),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] rmatrix::Error),
}

#[derive(Debug, Clone, Parser)]
#[command(name = "rmatrix", version, about = "r-matrix certificates, Lax flows and factorisation solvers")]
pub struct RunManifest {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for random states and random scans.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Multiplier applied to every tolerance, on top of RMATRIX_TOL_OVERRIDE.
    #[arg(long, global = true)]
    pub tol_scale: Option<f64>,
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

impl RunManifest {
    /// Parse command-line words, the first being the program name.
    pub fn from_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        Self::try_parse_from(args)
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Modified Yang-Baxter, R-bracket Jacobi and involution checks for an endomorphism r-matrix.
    Verify(VerifyArgs),
    /// Classify a tensor r-matrix and check its cocycle and double.
    VerifyBialgebra(VerifyBialgebraArgs),
    /// Integrate a Toda flow and write the trajectory as CSV.
    Flow(FlowArgs),
    /// Factor a group element as g = g₊ g₋⁻¹.
    Factorise(FactoriseArgs),
    /// Compare RK4 against the factorisation solution.
    Compare(CompareArgs),
    /// Open, Cartan-coordinate or periodic Toda run with a JSON state dump.
    Toda(TodaArgs),
    /// Load an algebra and check its structure constants.
    Algebra(AlgebraArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Verify(_) => "verify",
            Self::VerifyBialgebra(_) => "verify-bialgebra",
            Self::Flow(_) => "flow",
            Self::Factorise(_) => "factorise",
            Self::Compare(_) => "compare",
            Self::Toda(_) => "toda",
            Self::Algebra(_) => "algebra",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub algebra: Option<PathBuf>,
    #[arg(long)]
    pub r_matrix: PathBuf,
    /// Constant in the modified Yang-Baxter equation.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub c: f64,
    /// Random tridiagonal states for the involution scan.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExpectedClass {
    Triangular,
    QuasiTriangular,
    Factorisable,
    None,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyBialgebraArgs {
    #[arg(long)]
    pub algebra: Option<PathBuf>,
    #[arg(long)]
    pub r: PathBuf,
    /// Fail unless the classification matches.
    #[arg(long, value_enum)]
    pub expect: Option<ExpectedClass>,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Number of bonds N (N+1 sites). Inferred from --a/--b when given.
    #[arg(long)]
    pub n: Option<usize>,
    /// Diagonal entries, comma separated. Random (from --seed) when omitted.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Option<Vec<f64>>,
    /// Off-diagonal entries, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub b: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct StepArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t_end: f64,
    /// Record every k-th step (the final time is always recorded).
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlowSystem {
    /// Skew/upper split, H = ½ tr L².
    Toda,
    /// Triangular split, H = tr L².
    TodaCartan,
}

#[derive(Debug, Clone, Args)]
pub struct FlowArgs {
    #[arg(long, value_enum, default_value_t = FlowSystem::Toda)]
    pub system: FlowSystem,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub steps: StepArgs,
    /// Trajectory CSV destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Qr,
    Ldu,
}

impl From<KindArg> for rmatrix::factorization::SplitKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Qr => Self::Qr,
            KindArg::Ldu => Self::Ldu,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FactoriseArgs {
    /// JSON square matrix: a bare array of rows or {"rows": [...]}.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Qr)]
    pub kind: KindArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompareSystem {
    Toda,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[arg(long, value_enum, default_value_t = CompareSystem::Toda)]
    pub system: CompareSystem,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub steps: StepArgs,
    /// qr: skew/upper flow against QR; ldu: triangular flow against LDU.
    #[arg(long, value_enum, default_value_t = KindArg::Qr)]
    pub kind: KindArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TodaVariant {
    Open,
    Cartan,
    Periodic,
}

#[derive(Debug, Clone, Args)]
pub struct TodaArgs {
    #[arg(long, value_enum)]
    pub variant: TodaVariant,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[command(flatten)]
    pub steps: StepArgs,
    /// Cartan variant: diagonal of Y (positive, product 1). Defaults to ones.
    #[arg(long, value_delimiter = ',')]
    pub eta: Option<Vec<f64>>,
    /// Cartan variant: first superdiagonal of W₊.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub omega_plus: Option<Vec<f64>>,
    /// Cartan variant: first subdiagonal of W₋.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub omega_minus: Option<Vec<f64>>,
    /// Periodic variant: number of sites when --a/--b are omitted.
    #[arg(long)]
    pub sites: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct AlgebraArgs {
    #[arg(long)]
    pub algebra: PathBuf,
    /// Include the structure constants c^k_ij as data[i][j][k].
    #[arg(long)]
    pub dump_structure: bool,
}

/// Report plus an optional CSV body for `flow`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub csv: Option<String>,
}

/// Product of `RMATRIX_TOL_OVERRIDE` (default 1) and `--tol-scale` (default 1).
pub fn tolerance_scale(manifest: &RunManifest) -> Result<f64, CliError> {
    let env = match std::env::var(TOL_OVERRIDE_VAR) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("{TOL_OVERRIDE_VAR}={v:?} is not a number")))?,
        Err(_) => 1.0,
    };
    let scale = env * manifest.tol_scale.unwrap_or(1.0);
    if !(scale.is_finite() && scale > 0.0) {
        return Err(CliError::Usage(format!("tolerance scale must be positive, got {scale}")));
    }
    Ok(scale)
}

/// Run one command without touching the filesystem beyond its inputs.
pub fn run(manifest: &RunManifest) -> Result<Outcome, CliError> {
    let scale = tolerance_scale(manifest)?;
    commands::dispatch(manifest, scale)
}

/// Write `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let err = |e| CliError::Write(path.to_path_buf(), e);
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(contents).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

/// Run, emit outputs and return the process exit code.
pub fn execute(manifest: &RunManifest) -> i32 {
    match execute_inner(manifest) {
        Ok(pass) => {
            if pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute_inner(manifest: &RunManifest) -> Result<bool, CliError> {
    let outcome = run(manifest)?;
    let mut json = serde_json::to_string_pretty(&outcome.report).expect("report serialises");
    json.push('\n');
    match &manifest.report {
        Some(path) => write_atomic(path, json.as_bytes())?,
        None => print!("{json}"),
    }
    if let (Some(csv), Command::Flow(args)) = (&outcome.csv, &manifest.command) {
        if let Some(path) = &args.out {
            write_atomic(path, csv.as_bytes())?;
        }
    }
    for c in outcome.report.failures() {
        let at = c.location.as_deref().map(|l| format!(" at {l}")).unwrap_or_default();
        eprintln!("FAIL {}: {:.3e} exceeds {:.3e}{at}", c.name, c.value, c.tolerance);
    }
    Ok(outcome.report.pass)
}

/// Parse arguments (including the program name) and execute.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match RunManifest::from_args(args) {
        Ok(m) => execute(&m),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
