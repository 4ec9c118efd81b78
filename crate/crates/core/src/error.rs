use thiserror::Error;

/// Errors produced by the analysis, simulation and sweep routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter violates a model invariant (e.g. `l > n`, `c <= 0`).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The model is well formed but the requested quantity diverges,
    /// e.g. followers never complete a write within one slot.
    #[error("degenerate model: {0}")]
    ModelDegenerate(String),

    /// A follower was queried before any update was applied to it.
    #[error("follower state is uninitialized")]
    UninitializedFollower,

    #[error("sweep range is empty: {0}")]
    EmptyRange(String),

    #[error("every sweep point was skipped")]
    AllPointsSkipped,

    #[error("need at least {needed} points to classify, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("unknown figure id `{0}` (expected fig2, fig3, fig4 or fig5)")]
    UnknownFigure(String),

    #[error("cannot parse distribution `{0}` (expected exp:RATE, uniform:B or det:D)")]
    ParseDistribution(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
