use thiserror::Error;

/// Errors raised by the library.
///
/// Structural problems (wrong row lengths, out-of-range positions) are kept
/// apart from interlacing failures: the latter are answered by
/// [`Configuration::validate`](crate::lattice::Configuration::validate)
/// returning `false`, never by an error.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed configuration: {0}")]
    Structural(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sector bounds violated: {0}")]
    SectorBounds(String),

    #[error("configuration does not satisfy the interlacing constraints")]
    InvalidConfiguration,

    #[error("no particle with row {row} and label {label}")]
    InvalidParticle { row: u32, label: u32 },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("sector violation: {0}")]
    SectorViolation(String),

    #[error("configurations belong to different sectors")]
    MismatchedSectors,

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("enumeration refused: candidate bound {bound} exceeds cap {cap}")]
    CapExceeded { bound: u128, cap: u128 },

    #[error("frozen state: no move has positive rate")]
    FrozenState,

    #[error("particle {row}:{label} has no admissible predecessor")]
    MissingPredecessor { row: u32, label: u32 },

    #[error("face path step {index} does not join adjacent faces")]
    NonAdjacentStep { index: usize },

    #[error("empty state list")]
    EmptyStates,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
