use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("register {index} out of range for a state with {count} registers")]
    InvalidRegister { index: usize, count: usize },

    #[error("measurement basis is not orthonormal (deviation {deviation:e})")]
    InvalidBasis { deviation: f64 },

    #[error("operator is not unitary (deviation {deviation:e})")]
    NonUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("non-finite amplitude in state")]
    NonFinite,

    #[error("Hermitian eigensolver did not converge after {sweeps} sweeps")]
    EigenNoConvergence { sweeps: usize },

    #[error("invalid protocol parameters: {0}")]
    InvalidParams(String),

    #[error("prover refuses: private key already used {uses} times")]
    UsageExhausted { uses: usize },

    #[error("register handle {id} was already delivered; quantum registers cannot be cloned")]
    NoCloning { id: u64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("transport error: {0}")]
    Transport(String),
}
