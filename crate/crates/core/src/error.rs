use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the analysis toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("register of {requested} qubits exceeds the cap of {cap}")]
    TooManyQubits { requested: usize, cap: usize },

    #[error("assignment has {found} bits but the circuit has {expected} variables")]
    AssignmentLength { expected: usize, found: usize },

    #[error("circuit is invalid: {0}")]
    InvalidCircuit(String),

    #[error("circuit is not a formula")]
    NotFormula,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid {field}: {message}")]
    Field { field: String, message: String },

    #[error("restriction is not total: variable x{0} is unassigned")]
    RestrictionNotTotal(usize),

    #[error("gate at step {step} straddles the two qubit sets")]
    StraddlingGate { step: usize },

    #[error("postponement hypothesis violated at step {step}: {reason}")]
    PostponeHypothesis { step: usize, reason: String },

    #[error("path {path} is too short to squeeze (m = {len})")]
    PathTooShort { path: usize, len: usize },

    #[error("path {path}: companion qubit {qubit} is labeled by a variable")]
    VariableCompanion { path: usize, qubit: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{what} exceeds the enumeration cap ({limit})")]
    CapExceeded { what: String, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Field {
            field: field.into(),
            message: message.into(),
        }
    }
}
