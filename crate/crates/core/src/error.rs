use thiserror::Error;

/// Errors produced by the group, lattice and filter-bank routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("operands live on different groups")]
    GroupMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operation not supported on the {0} backend")]
    UnsupportedBackend(&'static str),

    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("filter bank has no analysis filters")]
    EmptyBank,

    #[error("filter bank has no synthesis filters")]
    MissingSynthesis,

    #[error("analysis bank is not a frame (lower bound {lower_bound:e})")]
    NotAFrame { lower_bound: f64 },

    #[error("bank is not maximally decimated: {channels} channels, lattice index {index}")]
    NotMaximallyDecimated { channels: usize, index: usize },

    #[error(
        "canonical dual is not finitely supported (det of the Gram polyphase matrix is not a monomial); \
         embed the filters in a finite group instead"
    )]
    NonFirDual,

    #[error("size {size} exceeds the cap of {cap}")]
    SizeCap { size: usize, cap: usize },

    #[error("{what} violated: residual {residual:e}")]
    IdentityViolation { what: &'static str, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
