use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the physical domain of the quantity.
    #[error("domain error in `{param}`: {reason}")]
    Domain { param: &'static str, reason: String },

    /// Zero photon flow or zero linewidth where a non-degenerate beam is required.
    #[error("degenerate problem: {0}")]
    Degenerate(String),

    /// The coherence 4Ṅ/ℓ was requested for a beam with zero linewidth.
    #[error("coherence is infinite (zero linewidth)")]
    InfiniteCoherence,

    #[error("configuration error in `{param}`: {reason}")]
    Config { param: &'static str, reason: String },

    #[error("fit-domain error: {0}")]
    FitDomain(String),

    #[error("number-basis truncation insufficient: deficit {deficit:e} exceeds {limit:e} at n_max = {n_max}")]
    Truncation { deficit: f64, limit: f64, n_max: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn domain(param: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain { param, reason: reason.into() }
    }

    pub(crate) fn config(param: &'static str, reason: impl Into<String>) -> Self {
        Error::Config { param, reason: reason.into() }
    }

    /// True for errors caused by the caller's input rather than by the numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. } | Error::Degenerate(_) | Error::InfiniteCoherence | Error::Config { .. }
        )
    }
}
