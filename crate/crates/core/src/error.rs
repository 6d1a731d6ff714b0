use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot parse real input: {0}")]
    Parse(String),

    #[error("expansion too short to bracket k = {k} (largest computed b_n = {largest_scale})")]
    ScaleOutOfRange { k: u64, largest_scale: f64 },

    #[error("quadrature unstable: |P_k| vanished at node {node}")]
    QuadratureUnstable { node: f64 },

    #[error("energy {energy} coincides with an atom of the measure")]
    SingularNode { energy: f64 },

    #[error("discriminant depends on the phase (spread {spread:e})")]
    ThetaDependenceDetected { spread: f64 },

    #[error("expected {expected} band edges, found {found}")]
    RootCountMismatch { expected: usize, found: usize },

    #[error("m-iteration left the upper half plane at step {step}")]
    LeftHalfConvergence { step: usize },

    #[error("Im m = {im:e} too small for the conjugation")]
    DegenerateM { im: f64 },

    #[error("angle jump {jump} at grid node {index} exceeds 1/2")]
    BranchUnwrapFailure { index: usize, jump: f64 },

    #[error("small divisors below threshold at modes {modes:?} (residual {residual:e})")]
    SmallDivisorOverflow { modes: Vec<i64>, residual: f64 },

    #[error("inverse iteration stalled (residual {residual:e})")]
    InverseIterationStall { residual: f64 },

    #[error("energy within {distance:e} of a window eigenvalue")]
    NearSingularWindow { distance: f64 },

    #[error("no exponential decay detected (r² = {r2})")]
    NoDecayDetected { r2: f64 },

    #[error("sine factor vanishes at index {index}")]
    DegenerateNode { index: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("nodes {i} and {j} have coincident cosines")]
    CoincidentNodes { i: usize, j: usize },

    #[error("eigenvector decay too slow (slope {slope})")]
    InsufficientDecay { slope: f64 },

    #[error("empty range: {0}")]
    EmptyRange(String),
}
