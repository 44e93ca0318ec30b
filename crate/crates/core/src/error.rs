use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A bound formula needs a moment that was neither supplied nor filled
    /// by a complementary bound.
    #[error("moment unavailable: {quantity} is required by {formula}")]
    MomentUnavailable {
        quantity: String,
        formula: &'static str,
    },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("invalid exponent {eta}: must lie in (0, {alpha}]")]
    InvalidExponent { eta: f64, alpha: f64 },

    #[error("bound does not reach the target within n <= {ceiling}")]
    InfeasibleWithinCeiling { ceiling: u64 },

    #[error("optimization failed: {0}")]
    OptimizationFailed(String),

    #[error("no convergence after {iterations} iterations in {routine}")]
    Convergence {
        routine: &'static str,
        iterations: usize,
    },

    #[error("inadmissible small set: {0}")]
    InadmissibleSmallSet(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The retrospective bell probability exceeded one, so the model's
    /// densities do not satisfy its own minorization.
    #[error("model violates minorization at x = {x}, y = {y}: bell probability {ratio}")]
    MinorizationViolated { x: f64, y: f64, ratio: f64 },

    #[error("model `{0}` does not provide the densities needed for regeneration")]
    MissingDensity(&'static str),

    #[error("insufficient data: {have} blocks, at least {need} required")]
    InsufficientData { have: usize, need: usize },

    #[error("model error: {0}")]
    Model(String),

    #[error("construction invalid: {0}")]
    ConstructionInvalid(String),

    #[error("data file error: {0}")]
    Data(String),
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        })
    }
}
