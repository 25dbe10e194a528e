use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid layout: {0}")]
    Layout(String),

    #[error("unknown system label `{0}`")]
    UnknownLabel(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invariant violated ({invariant}): {detail}")]
    Invariant {
        invariant: &'static str,
        detail: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ill-conditioned input: eigenvalue spread {0:.3e} exceeds 1e12")]
    IllConditioned(f64),

    #[error("SDP solver did not converge after {iterations} iterations (gap {gap:.3e}, primal infeasibility {pinf:.3e}, dual infeasibility {dinf:.3e})")]
    SolverNonConvergence {
        iterations: usize,
        gap: f64,
        pinf: f64,
        dinf: f64,
    },

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("outside exhaustive regime: {0}; use Monte-Carlo mode")]
    RegimeExceeded(String),

    #[error("register `{0}` is not classical")]
    NotClassical(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invariant(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            invariant,
            detail: detail.into(),
        }
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
