use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("{rows}x{cols} matrix needs {expected} entries, found {found}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        expected: usize,
        found: usize,
    },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("operator is not Hermitian: |H - H^dagger|_F = {residual:e} exceeds {tol:e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("the zero vector does not represent a physical state")]
    ZeroVector,

    #[error("state is not unit norm (norm = {norm})")]
    NotUnitNorm { norm: f64 },

    #[error("{0} is not an eigenvalue of the observable")]
    UnknownEigenvalue(f64),

    #[error("cannot collapse onto eigenvalue {eigenvalue}: outcome probability {probability:e} is zero")]
    ZeroProbability { eigenvalue: f64, probability: f64 },

    #[error("operator '{0}' is singular and cannot drive time evolution")]
    SingularOperator(String),

    #[error("operator '{label}' is {class}, the standard engine requires a unitary")]
    NonUnitaryOperator { label: String, class: String },

    #[error("epsilon must lie strictly inside (0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("bit must be 0 or 1, got {0}")]
    InvalidBit(u8),

    #[error("site {site} out of range for {n_qubits} qubits")]
    SiteOutOfRange { site: usize, n_qubits: usize },

    #[error("{0} qubits exceeds the register limit of {max}", max = crate::composite::MAX_QUBITS)]
    TooManyQubits(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numeric contract violated: {0}")]
    NumericContract(String),
}
