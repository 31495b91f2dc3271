use thiserror::Error;

/// Errors produced anywhere in the pipeline.
///
/// Variants are split so the CLI can map them onto exit codes: anything that
/// points at bad input is an input error, the rest are numerical failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("right-hand side has mean {mean:.3e} relative to its size; it is outside the solvable class")]
    NonZeroMean { mean: f64 },

    #[error("linear system is numerically singular (pivot ratio {pivot_ratio:.3e})")]
    SingularSystem { pivot_ratio: f64 },

    #[error("solve residual {residual:.3e} exceeds tolerance")]
    Residual { residual: f64 },

    #[error(
        "target point too close to the boundary (distance {distance:.3e}, need > {required:.3e})"
    )]
    TargetTooClose { distance: f64, required: f64 },

    #[error("insufficient order: {0}")]
    InsufficientOrder(String),

    #[error("physically inconsistent tensors: {0}")]
    Inconsistent(String),

    #[error("polygon is not simple: {0}")]
    NotSimple(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True when the error is caused by user-supplied input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidCurve(_)
                | Error::InvalidParameter(_)
                | Error::LengthMismatch { .. }
                | Error::NotSimple(_)
                | Error::Parse(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
