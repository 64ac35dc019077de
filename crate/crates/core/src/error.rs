use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis is not closed under the commutator: [e_{i}, e_{j}] leaves the span (defect {defect:.3e})")]
    NotClosed { i: usize, j: usize, defect: f64 },
    #[error("basis matrices are linearly dependent (rank {rank} < {dim})")]
    DependentBasis { rank: usize, dim: usize },
    #[error("basis matrices must be non-empty, square and of equal size")]
    BadBasis,
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("matrix leaves the span of the basis (defect {defect:.3e})")]
    ProjectionLoss { defect: f64 },
    #[error("trace pairing is degenerate on this algebra")]
    DegeneratePairing,
    #[error("span of g_{which} is not a subalgebra (defect {defect:.3e})")]
    NotSubalgebra { which: &'static str, defect: f64 },
    #[error("subspaces do not form a direct-sum decomposition of the algebra")]
    NotComplementary,
    #[error("endomorphism does not satisfy mCYBE with c = 1 (residual {residual:.3e})")]
    NotMCYBE { residual: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("symmetric part of r is not ad-invariant (residual {residual:.3e})")]
    SymPartNotInvariant { residual: f64 },
    #[error("tensor is not antisymmetric (residual {residual:.3e})")]
    NotAntisymmetric { residual: f64 },
    #[error("symmetric part of r is singular")]
    SingularSymmetricPart,
    #[error("dual bracket fails the Jacobi identity (residual {residual:.3e})")]
    DualJacobiFails { residual: f64 },
    #[error("matrix exponential argument norm {norm:.3e} exceeds bound {bound:.3e}")]
    Overflow { norm: f64, bound: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("pivot {index} = {pivot:.3e} is not positive; outside the factorisation domain")]
    OutsideFactorisationDomain { index: usize, pivot: f64 },
    #[error("integration step {dt:.3e} is below 1e-12")]
    StepUnderflow { dt: f64 },
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("invalid size: {0}")]
    BadSize(String),
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("eta entries must be strictly positive")]
    NonPositiveEta,
    #[error("periodic lattice needs at least 2 sites, got {0}")]
    BadPeriod(usize),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
