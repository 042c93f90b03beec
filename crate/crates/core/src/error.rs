use alloc::string::String;

/// Errors raised by the reconstruction core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A symmetric factorization met a non-positive pivot.
    #[error("matrix is not positive definite: pivot {pivot} has value {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    /// No pixel of the reference cube has a nonzero spectrum.
    #[error("no evaluable pixels: every reference spectrum is zero")]
    NoEvaluablePixels,

    /// A broken internal invariant.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! invalid {
    ($($arg:tt)*) => {
        $crate::error::Error::InvalidArgument(alloc::format!($($arg)*))
    };
}
pub(crate) use invalid;
