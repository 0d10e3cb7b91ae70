use alloc::string::String;

use thiserror::Error;

use crate::sdp::SdpStatus;

/// Errors raised by the real-radical pipeline and its building blocks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degree overflow: operation needs degree {needed}, moment sequence has {available}")]
    DegreeOverflow { needed: u32, available: u32 },

    #[error("dimension mismatch: expected {expected} variables, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("moment sequence is not numerically PSD: <p,p> = {value:e} at monomial {monomial}")]
    NegativeSquare { monomial: String, value: f64 },

    #[error("rank profile never stabilizes; raise the relaxation order")]
    NoFlatness,

    #[error("elimination ideal is not principal: {0}")]
    EliminationFailure(String),

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("provider mismatch: {0}")]
    ProviderMismatch(String),

    #[error("degree exhausted at d = {d_max} without certification")]
    DegreeExhausted { d_max: u32, diagnostics: String },

    #[error("solver failed with status {status:?} at relaxation order {order}")]
    Solver { status: SdpStatus, order: u32 },
}

pub type Result<T> = core::result::Result<T, Error>;
