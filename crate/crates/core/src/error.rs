use thiserror::Error;

/// Errors reported by the library.
///
/// `Domain` and `Infeasible` mark mathematically invalid input; the message
/// names the violated condition. The remaining variants are usage or I/O
/// problems.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible input: {0}")]
    Infeasible(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parity error: half-edge total {0} is odd")]
    Parity(u64),

    #[error("state error: {0}")]
    State(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by mathematically invalid input, as opposed to
    /// usage or I/O failures.
    pub fn is_infeasible_input(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Infeasible(_) | Error::Parity(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
