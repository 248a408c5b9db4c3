use thiserror::Error;

/// Failures raised by the geometry kernel, the closed forms and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("unknown analytic family `{0}`")]
    UnknownFamily(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("explicit coordinate functions need b != 0; use the envelope constructor instead")]
    NeedsNonzeroB,
    #[error("grid node ({i}, {j}) is not an interior node for this stencil")]
    BoundaryNode { i: usize, j: usize },
    #[error("grid spacing is not uniform")]
    NonUniformGrid,
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("degenerate jet: EG - F^2 = {0:e}")]
    DegenerateJet(f64),
    #[error("first fundamental form coefficient E = {0:e} is below tolerance")]
    SmallMetric(f64),
    #[error("vectors are linearly dependent (relative cross-product norm {0:e})")]
    LinearlyDependent(f64),
    #[error("jet is not isothermal: |E - G| = {e_minus_g:e}, |F| = {f:e}")]
    NotIsothermal { e_minus_g: f64, f: f64 },
    #[error("singular metric at a focal or degenerate point (det g = {0:e})")]
    DegenerateMetric(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("step count {steps} too small: estimated error {estimate:e} exceeds {tol:e}")]
    StepCountTooSmall { steps: usize, estimate: f64, tol: f64 },
    #[error("least-squares system is rank deficient")]
    RankDeficient,
    #[error("iterative solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("Gauss-Newton diverged: no decrease after maximal damping at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error("fit is ambiguous: data spans fewer than three dimensions")]
    FitAmbiguous,
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
