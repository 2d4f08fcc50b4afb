use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An angular momentum label or (j, m) pair that cannot exist.
    #[error("invalid angular momentum label: {0}")]
    InvalidLabel(String),

    #[error("j = {twice_j}/2 exceeds the supported maximum of {max_twice_j}/2")]
    SpinTooLarge { twice_j: u32, max_twice_j: u32 },

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("expected a state in the {expected} basis")]
    WrongBasis { expected: &'static str },

    #[error("{name} = {value} is outside the allowed range {allowed}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        allowed: &'static str,
    },

    #[error("density matrix is invalid: {0}")]
    InvalidDensity(String),

    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),

    #[error("unequal masses ({0} and {1}) are not supported")]
    UnequalMasses(f64, f64),

    #[error("no phase-shift data for channel l = {l}, s = {s}")]
    MissingChannel { l: u32, s: u32 },

    #[error("q = {q} is outside the tabulated range [{min}, {max}] for channel l = {l}, s = {s}")]
    QOutOfRange {
        l: u32,
        s: u32,
        q: f64,
        min: f64,
        max: f64,
    },

    #[error("phase-shift table, line {line}: {message}")]
    Table { line: u64, message: String },

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
