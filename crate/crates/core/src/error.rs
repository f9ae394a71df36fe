use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix or vector has non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (max |M - M^dag| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max |U^dag U - I| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("state vector has zero norm")]
    ZeroNorm,

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("degenerate point at lambda = {lambda}: both fields vanish")]
    DegeneratePoint { lambda: f64 },

    #[error(
        "gauge potential undefined: levels {m} and {n} are degenerate (omega = {omega:e}) but coupled by the derivative"
    )]
    GaugeUndefined { m: usize, n: usize, omega: f64 },

    #[error("spectral function has empty support (all weights below threshold)")]
    EmptySupport,

    #[error("spectral function contains a zero-frequency line")]
    ZeroFrequency,

    #[error("kernel is singular at omega = 0 without regularization")]
    SingularKernel,

    #[error("target level {index} is degenerate at lambda = {lambda} (gap {gap:e})")]
    DegenerateTarget { index: usize, lambda: f64, gap: f64 },

    #[error("target level {index} out of range for dimension {dim}")]
    TargetOutOfRange { index: usize, dim: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "config{}: key `{key}`: {message}",
        line.map(|l| format!(" line {l}")).unwrap_or_default()
    )]
    Config {
        line: Option<usize>,
        key: String,
        message: String,
    },

    #[error("gate IR line {line}: {message}")]
    GateIr { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
