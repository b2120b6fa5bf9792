use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("total dimension {total} exceeds the cap of {cap}")]
    DimensionCap { total: usize, cap: usize },

    #[error("stationary-phase regime not reached: |action gap| = {gap:.6e} is below {threshold:.6e}")]
    StationaryPhaseRegime { gap: f64, threshold: f64 },

    #[error("no decoherence: degenerate actions")]
    NoDecoherence,

    #[error("degenerate: all positions extremal")]
    ConstantPotential,
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures that mean "the requested physical regime was not
    /// reached" rather than malformed input.
    pub fn is_regime(&self) -> bool {
        matches!(
            self,
            Error::StationaryPhaseRegime { .. } | Error::NoDecoherence | Error::ConstantPotential
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
