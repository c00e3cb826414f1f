use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Laguerre parameter: {0}")]
    InvalidParam(String),

    #[error("recurrence overflowed at degree {degree} (x = {x})")]
    Overflow { degree: usize, x: f64 },

    /// e^{-x/2} would underflow; the value must come from a local expansion.
    #[error("x = {x} is beyond the direct-evaluation range; use the Taylor path")]
    UseTaylorPath { x: f64 },

    #[error("Taylor expansion centred at x = 0 is singular")]
    SingularCenter,

    #[error("Newton did not converge for root {index} after {iterations} iterations (trace: {trace:?})")]
    NoConvergence {
        index: usize,
        iterations: usize,
        trace: Vec<f64>,
    },

    #[error("predictor passed the largest-root bound {bound}; no further roots")]
    NoFurtherRoots { bound: f64 },

    #[error("non-finite intermediate in {stage} at index {index}")]
    NonFinite { stage: &'static str, index: usize },

    #[error("{family} needs at least {min} points, got {npts}")]
    TooFewPoints {
        family: &'static str,
        min: usize,
        npts: usize,
    },

    #[error("{stage} underflows to zero at index {index}")]
    Underflow { stage: &'static str, index: usize },

    #[error("zero Laguerre-function derivative at simple root {index}")]
    ZeroDerivative { index: usize },

    #[error("derivative order {order} exceeds the exponential range; largest safe generating degree is {max_safe_n}")]
    RangeLimit { order: usize, max_safe_n: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is singular at pivot {pivot}")]
    Singular { pivot: usize },

    #[error("QR iteration did not converge within {iterations} iterations")]
    EigenNoConvergence { iterations: usize },

    #[error("eigenvalue {value} has imaginary part {imag}")]
    ComplexEigenvalue { value: f64, imag: f64 },
}
