use core::fmt;

/// Errors raised by the decomposition routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A length or dimension did not match what the operation requires.
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// Dimension list is unusable (wrong arity, zero-sized party, ...).
    BadDims(&'static str),
    /// Generator weights are unusable.
    BadWeights(&'static str),
    /// Tolerances must lie strictly between zero and one.
    BadTolerance,
    /// A matrix or amplitude entry was NaN or infinite.
    NonFinite,
    NotSquare {
        rows: usize,
        cols: usize,
    },
    /// `max |A - A†|` exceeded the reconstruction tolerance.
    NotHermitian {
        deviation: f64,
    },
    /// `max |U†U - I|` exceeded the reconstruction tolerance.
    NotUnitary {
        deviation: f64,
    },
    /// Squared norm differs from one by `deviation`.
    NotNormalized {
        deviation: f64,
    },
    ZeroVector,
    /// Jacobi iteration did not converge within the sweep budget.
    NoConvergence {
        sweeps: usize,
    },
    /// Construction was asked to factor a slice that is not a product vector.
    RankNotOne {
        slice: usize,
        rank: usize,
    },
    /// The pivot spectrum is degenerate and no product slicing could be
    /// found or ruled out.
    Indeterminate {
        max_residual: f64,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::BadDims(why) => write!(f, "bad dimensions: {why}"),
            Error::BadWeights(why) => write!(f, "bad weights: {why}"),
            Error::BadTolerance => f.write_str("tolerances must satisfy 0 < tol < 1"),
            Error::NonFinite => f.write_str("non-finite entry"),
            Error::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, expected square"),
            Error::NotHermitian { deviation } => {
                write!(f, "matrix is not Hermitian (max deviation {deviation:e})")
            }
            Error::NotUnitary { deviation } => {
                write!(f, "matrix is not unitary (max deviation {deviation:e})")
            }
            Error::NotNormalized { deviation } => {
                write!(f, "state is not normalized (squared norm off by {deviation:e})")
            }
            Error::ZeroVector => f.write_str("vector is zero"),
            Error::NoConvergence { sweeps } => {
                write!(f, "Jacobi iteration did not converge in {sweeps} sweeps")
            }
            Error::RankNotOne { slice, rank } => {
                write!(f, "slice {slice} has Schmidt rank {rank}, expected 1")
            }
            Error::Indeterminate { max_residual } => {
                write!(f, "degenerate pivot spectrum could not be resolved (max residual {max_residual:e})")
            }
        }
    }
}

impl core::error::Error for Error {}
