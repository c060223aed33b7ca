use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed graph spec `{spec}`: {reason}")]
    Spec { spec: String, reason: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{what} exceeds budget ({requested} > {limit})")]
    Budget {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("defect-side weights cannot be normalized: {0}")]
    DegenerateWeights(String),

    #[error("{0} requires floating-point arithmetic")]
    NeedsFloat(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn spec(spec: &str, reason: impl Into<String>) -> Self {
        Error::Spec {
            spec: spec.to_string(),
            reason: reason.into(),
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_budget(what: &'static str, requested: u64, limit: u64) -> Result<()> {
    if requested > limit {
        Err(Error::Budget {
            what,
            requested,
            limit,
        })
    } else {
        Ok(())
    }
}
