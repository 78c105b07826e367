use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A brute-force enumeration or census would exceed its size guard.
    #[error("size guard exceeded: {what} (limit {limit})")]
    Guard { what: String, limit: u128 },

    /// The net exponent has no zero (the implicit threshold equation no root)
    /// inside the validity bracket for this delta.
    #[error("no transition in range at delta = {delta}")]
    NoTransition { delta: f64 },

    /// An iterative solver hit its iteration cap.
    #[error("no convergence after {iterations} iterations ({detail})")]
    NonConvergence { iterations: usize, detail: String },

    /// A model descriptor that cannot be used for the requested operation.
    #[error("invalid model: {0}")]
    Model(String),

    /// A lower-level error annotated with the delta sample that raised it.
    #[error("at delta = {delta}: {source}")]
    AtDelta {
        delta: f64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
