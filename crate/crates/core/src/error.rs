use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported weight {0}: even weight only")]
    UnsupportedWeight(i64),

    #[error("compact quotients (no cusps) are not supported")]
    CompactQuotient,

    #[error("unsupported cusp '{0}'")]
    UnsupportedCusp(String),

    #[error("point is not in the upper half-plane (y = {0})")]
    NotInUpperHalfPlane(f64),

    #[error("insufficient order: tail estimate {tail:.3e} exceeds tolerance {tol:.3e}; about {required} coefficients needed")]
    InsufficientOrder { tail: f64, tol: f64, required: usize },

    #[error("series diverges: Re(s) = {re_s} but the sum needs Re(s) > {bound}")]
    Divergent { re_s: f64, bound: f64 },

    #[error("weight {0} is outside the region of absolute convergence (k >= 4 required)")]
    WeightTooSmall(i64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series has a constant term; antiderivative needs a cuspidal series")]
    NotCuspidal,

    #[error("cannot invert a series with zero leading coefficient")]
    ZeroSeries,

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("index out of range: {0}")]
    IndexRange(String),

    #[error("arithmetic overflow in exact mode")]
    Overflow,

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
