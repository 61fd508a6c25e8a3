use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("unknown symbol {symbol:?} at position {position}")]
    UnknownSymbol { symbol: String, position: usize },
    #[error("length mismatch: expected {expected} symbols, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("k-mers belong to different Hamming instances")]
    InstanceMismatch,
    #[error("vertex set is empty")]
    EmptySet,
    #[error("polynomial ring dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("input is not a Groebner basis: an S-polynomial has nonzero remainder")]
    NotAGroebnerBasis,
    #[error("instance too large: {vertices} vertices exceed the cap of {cap}")]
    InstanceTooLarge { vertices: u128, cap: u128 },
    #[error("random-normal objective requires a seed")]
    MissingSeed,
    #[error("vector is not a witness: {0}")]
    NotAWitness(String),
    #[error("malformed model: {0}")]
    MalformedModel(String),
    #[error("operation requires a binary alphabet (a = 2)")]
    NotBinary,
    #[error("form C requires the all-ones k-mer in the set")]
    MissingAllOnes,
    #[error("Groebner certification over {0} variables is long-running; pass --long-running to proceed")]
    LongRunning(usize),
    #[error("input set does not resolve the graph")]
    InputNotResolving,
    #[error("bad subset size {size} for a set of {len} elements")]
    BadSize { size: usize, len: usize },
    #[error("could not fill the {label} quota after {draws} draws")]
    QuotaUnreachable { label: &'static str, draws: usize },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
