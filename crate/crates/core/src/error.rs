use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// The sampled profile is not the restriction of a smooth even function.
    #[error("parity error: odd/unresolved component at the origin (residual {residual:.3e})")]
    Parity { residual: f64 },

    #[error("capability error: {0}")]
    Capability(String),

    /// A profile does not decay inside the computational window.
    #[error("truncation: {0}")]
    Truncation(String),

    #[error("accuracy: {0}")]
    Accuracy(String),

    /// The spectral symbol vanishes for some real spectral parameter.
    #[error("resonant symbol: {0}")]
    ResonantSymbol(String),

    #[error("operator not in the invariant algebra: {0}")]
    NotInvariant(String),

    #[error("extrapolation beyond r_max = {r_max} (r = {r})")]
    Extrapolation { r: f64, r_max: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
