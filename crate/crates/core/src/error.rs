use thiserror::Error;

/// Errors raised by state conversions, solvers and verification drivers.
#[derive(Debug, Error)]
pub enum Error {
    /// Input lies outside the chart or formula's domain of definition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Configuration the library deliberately does not handle.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// Requested time lies beyond the maximal existence interval.
    #[error("time {t} is outside the existence interval{}", fmt_blowup(*.blowup))]
    OutOfDomain { t: f64, blowup: Option<f64> },

    /// Input is on (or numerically next to) a singular locus of f, g or the tensors.
    #[error("singular locus: {0}")]
    Singular(String),

    #[error("CFL condition violated: dt = {dt:e} exceeds limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("root finding failed: {0}")]
    Root(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_blowup(b: Option<f64>) -> String {
    match b {
        Some(ts) => format!(" (blow-up at t = {ts:.12})"),
        None => String::new(),
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
