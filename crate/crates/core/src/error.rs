use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("quadrature did not converge: estimated error {achieved:.3e} exceeds tolerance {tolerance:.3e} after {panels} panels")]
    Quadrature {
        achieved: f64,
        tolerance: f64,
        panels: usize,
    },

    #[error("bisection failed on bracket [{lo}, {hi}] (f = {f_lo:.3e}, {f_hi:.3e}) after {iterations} iterations")]
    Bisection {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
        iterations: usize,
    },

    #[error("start point ({0}, {1}) is not strictly inside the region")]
    StartOutside(f64, f64),

    #[error("point ({0}, {1}) is outside the region")]
    PointOutside(f64, f64),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("statistics: {0}")]
    Statistics(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
