use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular series: denominator factor vanishes at term {term}")]
    SingularSeries { term: usize },

    #[error("degenerate parameters: condition {condition} violated ({detail})")]
    DegenerateParams {
        condition: &'static str,
        detail: String,
    },

    #[error("solver failure: {0}")]
    SolverFailure(String),

    #[error("ambiguous solution: {count} distinct admissible root sets")]
    AmbiguousSolution { count: usize },

    #[error("no admissible solution matches level {level}")]
    NoMatchingLevel { level: usize },

    #[error("kind mismatch: expected {expected} roots")]
    KindMismatch { expected: &'static str },

    #[error("interpolation nodes collide")]
    InterpolationDegenerate,

    #[error("root extraction failed (relative residual {residual:e})")]
    RootExtractionFailure { residual: f64 },

    #[error("unexpected rank {found}, expected {expected}")]
    RankDeficiencyUnexpected { expected: usize, found: usize },

    #[error("operation requires spin 1/2, got 2s = {two_s}")]
    SpinMismatch { two_s: usize },

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn degenerate(condition: &'static str, detail: impl Into<String>) -> Self {
        Error::DegenerateParams {
            condition,
            detail: detail.into(),
        }
    }
}
