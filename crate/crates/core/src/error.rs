use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("basis index exceeds register: index {index} on {num_qubits} qubits")]
    BasisIndexOutOfRange { index: usize, num_qubits: usize },

    #[error("qubit {qubit} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("qubit {0} used more than once in a gate")]
    DuplicateQubit(usize),

    #[error("qubit {0} is used both as target and control")]
    OverlappingQubits(usize),

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("amplitude length {len} is not a power of two")]
    InvalidLength { len: usize },

    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },

    #[error("register of {requested} qubits exceeds the {cap}-qubit limit")]
    TooManyQubits { requested: usize, cap: usize },

    #[error("invalid qubit subset: {0}")]
    InvalidSubset(String),

    #[error("shots must be at least 1")]
    ZeroShots,

    #[error("reference state is not an eigenstate within tolerance (residual {residual:e})")]
    NotEigenstate { residual: f64 },

    #[error("residual entanglement between ancillas and system (ancilla purity {purity})")]
    ResidualEntanglement { purity: f64 },

    #[error("perpendicular state is not orthogonal to the target eigenstate (overlap {overlap:e})")]
    NotOrthogonal { overlap: f64 },

    #[error("evolution time causes phase wrap")]
    PhaseWrap,

    #[error("base not coprime: gcd({a}, {modulus}) = {gcd}")]
    NotCoprime { a: u64, modulus: u64, gcd: u64 },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed circuit document: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
