use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("algebra mismatch: expected {expected} coordinates, got {got}")]
    AlgebraMismatch { expected: usize, got: usize },

    #[error("class {0} is not supported (the group law is tabulated up to class 5)")]
    ClassTooLarge(usize),

    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("vector must have unit norm, got {0}")]
    NotUnit(f64),

    #[error("scale {0} is not an integer power of the grid ratio")]
    OffGridScale(f64),

    #[error("defect below {0:e} across the fit window: numerically invariant")]
    NumericallyInvariant(f64),

    #[error("small-r tail diverges: {0}")]
    DivergentTail(String),

    #[error("quadratic form on level {level} is not positive definite")]
    NotPositiveDefinite { level: usize },

    #[error("Monte Carlo standard error {stderr:e} above target {target:e}")]
    McBudget { stderr: f64, target: f64 },

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("point leaves the domain: {0}")]
    NearBoundary(String),

    #[error("window leakage too large: {0}")]
    Leakage(String),

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
