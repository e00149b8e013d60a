//! Error type shared by the whole crate.

use crate::word::FactorId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A word or piece referenced a factor id that is not part of the product.
    #[error("unknown factor id {0}")]
    UnknownFactor(FactorId),

    /// Two marked points of a piece coincide.
    #[error("marked points of piece {piece} coincide")]
    MarkedPointsEqual { piece: usize },

    /// Consecutive pieces violate admissibility (same factor, or commuting factors).
    #[error("pieces {left} and {right} are not admissible: {reason}")]
    Inadmissible {
        left: usize,
        right: usize,
        reason: String,
    },

    /// An exploration exceeded its configured size cap.
    #[error("size cap of {cap} exceeded while {context}")]
    CapExceeded { cap: usize, context: String },

    /// An operation that needs a nontrivial element received the identity.
    #[error("element is trivial")]
    TrivialElement,

    /// A provider does not expose the capability an operation requires.
    #[error("factor {factor} lacks capability: {capability}")]
    MissingCapability { factor: FactorId, capability: String },

    /// A point does not belong to the required domain.
    #[error("point {point} outside domain: {context}")]
    PointOutsideDomain { point: String, context: String },

    /// Invalid argument (bad modulus, bad ray index, non-monotone table, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The sparse-support probe could not be run on the supplied action.
    #[error("probe inapplicable: {0}")]
    ProbeInapplicable(String),

    /// The sparse-support probe failed to construct a witness structure.
    #[error("probe construction failed at index {index}: {reason}")]
    ProbeConstruction { index: usize, reason: String },

    /// Configuration errors surfaced by the CLI layer, with a field path.
    #[error("config error at `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
