use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Inconsistent construction input: duplicate mode names, wrong region tags, bad parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// An argument outside the operation's domain (unknown mode, empty keep set, ...).
    #[error("argument error: {0}")]
    Argument(String),

    /// The Unruh substitution is only defined for Minkowski occupations 0 and 1.
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// A requested build exceeds the memory budget or the truncation cap.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error(
        "series did not converge after {terms} terms (achieved relative tail bound {achieved:e})"
    )]
    Convergence { terms: u64, achieved: f64 },

    /// A density operator handed to a metric still carries inaccessible modes.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
