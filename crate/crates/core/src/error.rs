use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("element {value} is not in a field of order {order}")]
    ForeignElement { value: u64, order: u64 },

    #[error("zero has no multiplicative inverse")]
    NotInvertible,

    #[error("invalid code parameters: {0}")]
    InvalidParams(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{erased} nodes erased but the code corrects at most {max}")]
    TooManyErasures { erased: usize, max: usize },

    #[error("known cells are inconsistent with the code (nonzero syndrome)")]
    Inconsistent,

    /// A linear system that the code structure guarantees to be solvable turned out singular.
    #[error("singular system: {0}")]
    Singular(String),

    #[error("invalid repair plan: {0}")]
    InvalidPlan(String),

    #[error("read of node {node} coordinate {coord} is not part of the repair plan")]
    MissingRead { node: usize, coord: usize },

    #[error("access outside the repair plan: node {node} coordinate {coord}")]
    AccessViolation { node: usize, coord: usize },

    #[error("work estimate {estimate} exceeds budget {budget}")]
    OverBudget { estimate: u128, budget: u128 },

    #[error("{0}")]
    Unsupported(String),

    #[error("{path}: bad magic")]
    BadMagic { path: PathBuf },

    #[error("{path}: unsupported chunk version {found}")]
    VersionMismatch { path: PathBuf, found: u8 },

    #[error("{path}: header checksum mismatch (stored {stored:08x}, computed {computed:08x})")]
    HeaderCrc {
        path: PathBuf,
        stored: u32,
        computed: u32,
    },

    #[error("{path}: truncated ({detail})")]
    Truncated { path: PathBuf, detail: String },

    #[error("{path}: {detail}")]
    Corrupt { path: PathBuf, detail: String },

    #[error("only {present} chunks available, need {needed}")]
    InsufficientChunks { present: usize, needed: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}
