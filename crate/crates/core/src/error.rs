use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("value {value} does not fit in {bits} bits")]
    ValueOutOfRange { value: u64, bits: usize },
    #[error("register of {requested} qubits exceeds the simulator limit of {limit}")]
    RegisterTooLarge { requested: usize, limit: usize },
    #[error("invalid qubit indices {qubits:?} for a {num_qubits}-qubit register")]
    QubitIndexError {
        qubits: Vec<usize>,
        num_qubits: usize,
    },
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(
        "state is not a basis state within tolerance {tol} (max probability {max_probability})"
    )]
    NotABasisState { tol: f64, max_probability: f64 },
    #[error("carry ancillas not restored to zero (probability of clean ancillas {probability})")]
    AncillaNotRestored { probability: f64 },
    #[error("gate {index} ({kind}) is not diagonal and cannot be reordered")]
    NonCommutingGates { index: usize, kind: &'static str },
    #[error("invalid rotation order k = {0}; k must be at least 1")]
    InvalidRotationOrder(u32),
    #[error("invalid register layout: {0}")]
    InvalidLayout(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
