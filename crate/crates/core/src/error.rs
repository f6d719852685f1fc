use thiserror::Error;

/// Errors produced by the numerical layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid quantum numbers n={n}, l={l}, m={m}: need n >= 1, 0 <= l <= n-1, |m| <= l")]
    InvalidState { n: i64, l: i64, m: i64 },

    #[error("<r^-{power}> diverges for l={l}; the closed form needs l >= {min_l}")]
    DivergentMoment { power: u32, l: u32, min_l: u32 },

    #[error("first-order correction diverges for l={l}: vanishing factor(s) {factors}")]
    DivergentCorrection { l: u32, factors: String },

    #[error("quadrature did not converge: best estimate {estimate:e} with error {error:e} after {panels} panels")]
    NonConvergence {
        estimate: f64,
        error: f64,
        panels: usize,
    },

    #[error("series acceleration failed: {0}")]
    Acceleration(String),

    #[error("discretized operator has a non-positive eigenvalue {0:e}")]
    NonPositiveEigenvalue(f64),

    #[error("eigen-solver did not converge for index {0}")]
    EigenNoConvergence(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
