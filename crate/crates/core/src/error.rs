use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("action count {0} is not a power of two")]
    ArmsNotPowerOfTwo(u32),
    #[error("action {action} of unit {unit} is outside 1..={arms}")]
    ActionOutOfRange { unit: usize, action: u32, arms: u32 },
    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("mask width {mask} does not match vector length {vector}")]
    WidthMismatch { mask: usize, vector: usize },
    #[error("{what} needs {requested} entries, above the cap of {cap}")]
    CapExceeded { what: &'static str, requested: u64, cap: u64 },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("coefficient for unit {unit} is not supported on its neighborhood")]
    OffSupport { unit: usize },
    #[error("design matrix entries must be -1 or +1")]
    NotSignMatrix,
    #[error("design is ill-conditioned (min eigenvalue of X'X/E = {min_eigenvalue:e})")]
    IllConditioned { min_eigenvalue: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{context}: {source}")]
    Context { context: String, source: alloc::boxed::Box<Error> },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: alloc::boxed::Box::new(self) }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
