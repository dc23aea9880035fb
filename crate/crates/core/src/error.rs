use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid frequency vector: {0}")]
    InvalidFrequency(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("{what} {requested} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("normalization fails: p(1) = {value}")]
    Normalization { value: f64 },

    #[error("probability out of range at composition {composition}: {value}")]
    OutOfRange { composition: String, value: f64 },

    #[error("addition rule fails at composition {composition}: residual {residual:e}")]
    AdditionRule { composition: String, residual: f64 },

    #[error("partition law of [{m}] has total mass {mass}")]
    Mass { m: usize, mass: f64 },

    #[error("ground sets differ: [{left}] vs [{right}]")]
    GroundSetMismatch { left: usize, right: usize },

    #[error("first frequency is zero; X is infinite almost surely")]
    UndefinedMass,

    #[error("improper frequencies (dust {dust}); a size-biased order is not defined")]
    Improper { dust: f64 },

    #[error("power iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("convergence profile ends at {last:e}, not below {threshold:e}")]
    AboveThreshold { last: f64, threshold: f64 },

    #[error("tail mass could not be certified below {tolerance:e} after {attempts} draws")]
    TailNotCertified { tolerance: f64, attempts: usize },

    #[error("exact evaluation requires a model with finite support")]
    NotFinite,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of a mathematical invariant, as opposed to bad input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Normalization { .. }
                | Error::OutOfRange { .. }
                | Error::AdditionRule { .. }
                | Error::Mass { .. }
                | Error::NotConverged { .. }
                | Error::AboveThreshold { .. }
        )
    }
}
