use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures reported by the evaluation and search routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported range: {0}")]
    UnsupportedRange(String),

    /// The two recurrences disagreed, or a near-tie could not be settled.
    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    #[error("ambiguous tie at lambda = {lambda}: candidates {candidates:?}")]
    AmbiguousTie { lambda: f64, candidates: Vec<usize> },

    /// A bracket that theory guarantees failed its sign test.
    #[error("bracket failure for k = {k}: {detail}")]
    BracketFailure { k: usize, detail: String },

    #[error("inconsistent root for k = {k}: {detail}")]
    InconsistentRoot { k: usize, detail: String },

    #[error("possible multi-way tie for k = {k} at lambda = {lambda}: n = {first} and n = {second} reach 1 within {gap:e}")]
    PossibleTie {
        k: usize,
        lambda: f64,
        first: usize,
        second: usize,
        gap: f64,
    },

    #[error("unresolved mode transition for k = {k} near lambda = {lambda} (modes {left} -> {right})")]
    UnresolvedTransition {
        k: usize,
        lambda: f64,
        left: usize,
        right: usize,
    },

    #[error("data integrity: {0}")]
    DataIntegrity(String),

    #[error("degenerate fit input: {0}")]
    DegenerateFit(String),
}

impl Error {
    /// True for failures caused by numerical resolution rather than bad input.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::PrecisionLoss(_)
                | Error::AmbiguousTie { .. }
                | Error::BracketFailure { .. }
                | Error::InconsistentRoot { .. }
                | Error::PossibleTie { .. }
                | Error::UnresolvedTransition { .. }
        )
    }
}
