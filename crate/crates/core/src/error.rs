use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point t = {t} lies outside the knot range [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("basis construction system is singular for |alpha*h| = {alpha_h} (condition estimate {condition:.3e})")]
    SingularBasis { alpha_h: f64, condition: f64 },

    #[error("stacked least-squares system is rank deficient: numerical rank {rank} < {cols} columns (min/max |R_ii| = {ratio:.3e})")]
    RankDeficient { rank: usize, cols: usize, ratio: f64 },

    #[error("training diverged at epoch {epoch}: loss became non-finite")]
    Divergence { epoch: usize },

    #[error("every candidate fit failed; last error: {0}")]
    SearchFailed(Box<Error>),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures of the numerics (as opposed to bad arguments or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularBasis { .. }
                | Error::RankDeficient { .. }
                | Error::Divergence { .. }
                | Error::SearchFailed(_)
        )
    }
}
