use thiserror::Error;

/// Errors raised by the diagram, coefficient and evolution routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("enumeration size {n} outside the supported range 0..={max}")]
    EnumerationBound { n: usize, max: usize },

    #[error("invalid set partition: {0}")]
    InvalidPartition(String),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("cannot parse diagram `{input}`: {reason}")]
    DiagramParse { input: String, reason: String },

    #[error("unsupported render format `{0}` (expected `text` or `svg`)")]
    UnsupportedFormat(String),

    #[error("truncation dimension {dim} too small for a word with {ladder_ops} ladder operators (need at least {required})")]
    TruncationTooSmall {
        dim: usize,
        ladder_ops: usize,
        required: usize,
    },

    #[error("word length {len} exceeds the limit of {max}")]
    WordTooLong { len: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coefficient family is not Hermitian: {identity} violated by {residual:.3e}")]
    NonHermitian { identity: String, residual: f64 },

    #[error("damping constant must have positive real part, got gamma = {gamma}")]
    NonPositiveDamping { gamma: f64 },

    #[error("1 + i kappa E11 is singular (smallest singular value {smallest:.3e})")]
    SingularScattering { smallest: f64 },

    #[error("scattering series diverges: ||kappa E11|| = {norm} >= 1")]
    SeriesDivergence { norm: f64 },

    #[error("Xi bound requires A < 0 (the condition ||kappa E11|| < 1), got A = {a}")]
    XiDomain { a: f64 },

    #[error("invalid step function: {0}")]
    InvalidStepFunction(String),

    #[error("step function breakpoint {breakpoint} is not aligned with slot width {dt}")]
    Misaligned { breakpoint: f64, dt: f64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
