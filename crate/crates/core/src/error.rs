use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
    #[error("normal {0:?} is not primitive")]
    NonPrimitiveNormal(Vec<i64>),
    #[error("zero vector has no primitive representative")]
    ZeroVector,
    #[error("{0} facets exceed the exhaustive-search limit of {1}")]
    TooManyFacets(usize, usize),
    #[error("no generic perturbation found after {0} attempts")]
    PerturbationFailed(usize),
    #[error("degenerate torus parameter: {0}")]
    DegenerateParameter(String),
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("fit failed: {0}")]
    FitFailure(String),
    #[error("insufficient samples: need {need}, got {got}")]
    InsufficientSamples { need: usize, got: usize },
    #[error("polytope has parallel facets {0} and {1}")]
    ParallelFacets(usize, usize),
    #[error("no sign assignment balances the facet data")]
    NoConsistentSigning,
    #[error("{0} essentially distinct sign assignments balance the facet data")]
    AmbiguousSigning(usize),
    #[error("balance violated: residual norm {0:e}")]
    BalanceViolation(f64),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("line search could not keep every facet nonempty")]
    EmptyIntermediate,
    #[error("truncation too coarse: {0}")]
    TruncationTooCoarse(String),
    #[error("ill-conditioned extrapolation: {0}")]
    IllConditioned(String),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code, printed by the CLI on stderr.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidPolytope(_) => "INVALID_POLYTOPE",
            Error::NonPrimitiveNormal(_) => "NON_PRIMITIVE_NORMAL",
            Error::ZeroVector => "ZERO_VECTOR",
            Error::TooManyFacets(..) => "TOO_MANY_FACETS",
            Error::PerturbationFailed(_) => "PERTURBATION_FAILED",
            Error::DegenerateParameter(_) => "DEGENERATE_PARAMETER",
            Error::IndexOutOfRange { .. } => "INDEX_OUT_OF_RANGE",
            Error::ShapeMismatch(_) => "SHAPE_MISMATCH",
            Error::FitFailure(_) => "FIT_FAILURE",
            Error::InsufficientSamples { .. } => "INSUFFICIENT_SAMPLES",
            Error::ParallelFacets(..) => "PARALLEL_FACETS",
            Error::NoConsistentSigning => "NO_CONSISTENT_SIGNING",
            Error::AmbiguousSigning(_) => "AMBIGUOUS_SIGNING",
            Error::BalanceViolation(_) => "BALANCE_VIOLATION",
            Error::DegenerateInput(_) => "DEGENERATE_INPUT",
            Error::NonConvergence { .. } => "NON_CONVERGENCE",
            Error::EmptyIntermediate => "EMPTY_INTERMEDIATE",
            Error::TruncationTooCoarse(_) => "TRUNCATION_TOO_COARSE",
            Error::IllConditioned(_) => "ILL_CONDITIONED",
            Error::MissingInput(_) => "MISSING_INPUT",
            Error::Parse(_) => "PARSE",
        }
    }

    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::EmptyIntermediate | Error::IllConditioned(_)
        )
    }
}
