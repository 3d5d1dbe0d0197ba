use alloc::string::String;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid domain or grid: {0}")]
    InvalidGrid(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("point lies outside the domain")]
    OutsideDomain,
    #[error("cube does not fit inside the grid")]
    CubeOutOfBounds,
    #[error("exponent field is not admissible: {0}")]
    InvalidExponent(String),
    #[error("exponent range is unbounded; operation needs a bounded closed form")]
    UnboundedExponent,
    #[error("non-finite sample encountered in {0}")]
    NonFinite(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("kernel certification failed: {0}")]
    CertificationFailed(String),
    #[error("no admissible scaling factor found in the search range")]
    NoAdmissibleScaling,
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
