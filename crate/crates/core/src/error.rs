//! Error type shared by all modules of the crate.

use std::fmt;

#[derive(Debug)]
pub enum Error {
    /// `q` is not a prime power.
    NotPrimePower(u64),
    /// `q = 2` has no progression structure of interest here.
    QTooSmall(u64),
    /// `q^n` does not fit the supported index range.
    SpaceTooLarge { q: u64, n: u32 },
    /// Extension-field tables are only built for moderate `q`.
    ExtensionFieldTooLarge(u64),
    /// Operation requires a larger field characteristic.
    CharTooSmall { required: u64, actual: u64 },
    /// Sets passed to a multi-set operation live in different ambients.
    AmbientMismatch,
    /// Δ(H, τ) is undefined on a hypergraph without edges.
    EmptyHypergraph,
    /// Refusing to materialize an edge list this large.
    EdgeListTooLarge { estimated: u64, limit: u64 },
    /// Instance exceeds the hard size limit of an exact routine.
    TooLarge { size: usize, limit: usize },
    /// Node budget ran out; carries the best independent-set size found.
    BudgetExhausted { best_size: u64, nodes: u64 },
    /// Argument outside the mathematical domain of a formula.
    DomainError(String),
    /// Parameters outside the admissible range of a theorem.
    RangeError(String),
    /// A theorem precondition does not hold for these inputs.
    PreconditionFailed(String),
    /// Every annulus shell had an empty preimage.
    DegenerateShell,
    /// Additive energy would exceed 64 bits.
    EnergyOverflow { cardinality: usize },
    /// Pipeline parameters give a degenerate expected output size.
    TooSmall(String),
    /// Malformed ground-set file.
    Parse { line: usize, msg: String },
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotPrimePower(q) => write!(f, "{} is not a prime power", q),
            Error::QTooSmall(q) => write!(f, "q = {} is too small (need q >= 3)", q),
            Error::SpaceTooLarge { q, n } => {
                write!(f, "{}^{} does not fit in 63 bits", q, n)
            }
            Error::ExtensionFieldTooLarge(q) => {
                write!(f, "extension field tables not supported for q = {} (> 256)", q)
            }
            Error::CharTooSmall { required, actual } => write!(
                f,
                "operation needs characteristic >= {}, space has characteristic {}",
                required, actual
            ),
            Error::AmbientMismatch => write!(f, "sets live in different ambients"),
            Error::EmptyHypergraph => write!(f, "hypergraph has no edges"),
            Error::EdgeListTooLarge { estimated, limit } => write!(
                f,
                "estimated {} edges exceeds the {} edge limit",
                estimated, limit
            ),
            Error::TooLarge { size, limit } => {
                write!(f, "instance size {} exceeds limit {}", size, limit)
            }
            Error::BudgetExhausted { best_size, nodes } => write!(
                f,
                "node budget exhausted after {} nodes (incumbent size {})",
                nodes, best_size
            ),
            Error::DomainError(msg) => write!(f, "domain error: {}", msg),
            Error::RangeError(msg) => write!(f, "range error: {}", msg),
            Error::PreconditionFailed(msg) => write!(f, "precondition failed: {}", msg),
            Error::DegenerateShell => write!(f, "every annulus shell preimage is empty"),
            Error::EnergyOverflow { cardinality } => write!(
                f,
                "additive energy of a {}-element set may overflow 64 bits",
                cardinality
            ),
            Error::TooSmall(msg) => write!(f, "parameters too small: {}", msg),
            Error::Parse { line, msg } => write!(f, "parse error at line {}: {}", line, msg),
            Error::Io(e) => write!(f, "io error: {}", e),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
