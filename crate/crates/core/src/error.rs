use thiserror::Error;

/// Errors raised by the geometry kernel, the metric and the experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point not interior")]
    NotInterior,

    #[error("point not on boundary")]
    NotOnBoundary,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("points are not collinear")]
    NonCollinear,

    #[error("ordering violated: expected 0 < s <= t < 1, got s = {s}, t = {t}")]
    OrderViolated { s: f64, t: f64 },

    #[error("numeric non-convergence: {0}")]
    NonConvergence(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Geometric preconditions (interiority, boundary membership, degeneracy)
    /// as opposed to malformed input.
    pub fn is_geometric(&self) -> bool {
        matches!(
            self,
            Error::NotInterior
                | Error::NotOnBoundary
                | Error::Degenerate(_)
                | Error::NonCollinear
                | Error::OrderViolated { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
