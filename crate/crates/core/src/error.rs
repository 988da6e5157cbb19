use thiserror::Error;

use crate::rational::ParseRationalError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a partition needs at least one atom")]
    EmptyPartition,
    #[error("{0} atoms exceed the hard limit of {max}", max = crate::algebra::MAX_ATOMS)]
    TooManyAtoms(usize),
    #[error("duplicate atom label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown atom label {0:?}")]
    UnknownLabel(String),
    #[error("event over {found} atoms used with a partition of {expected} atoms")]
    PartitionMismatch { expected: usize, found: usize },
    #[error("atom index {index} out of range for {atoms} atoms")]
    AtomOutOfRange { index: usize, atoms: usize },
    #[error("invalid base probability: {0}")]
    InvalidProbability(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("{atoms} atoms exceed the enumeration cap of {cap} (set NLUM_MAX_ATOMS to raise it)")]
    EnumerationCap { atoms: usize, cap: usize },
    #[error("malformed linear program: {0}")]
    MalformedProgram(String),
    #[error("model is not a horizontal barrier model ({0})")]
    NotHorizontalBarrier(String),
    #[error("upper probability is not subadditive; the structure results do not apply")]
    NotSubadditive,
    #[error("interval is not reachable: {0}")]
    Unreachable(String),
    #[error("field {field}: {source}")]
    Field {
        field: String,
        #[source]
        source: ParseRationalError,
    },
    #[error("field {field}: {message}")]
    Document { field: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
