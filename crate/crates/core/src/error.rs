use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("bracket index {0} out of range (expected 1..=3)")]
    IndexOutOfRange(usize),

    #[error("dimension mismatch: model is {expected}D, state is {found}D")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("velocity {velocity} is outside the attainable range (supremum {supremum})")]
    NoRoot { velocity: f64, supremum: f64 },

    #[error("root finder did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("singular boost composition: combined rotation angle reaches or passes pi/2")]
    SingularComposition,

    #[error("velocity composition is singular (v' V = u^2)")]
    SingularVelocity,

    #[error("boost velocity {velocity} is not below the effective light speed {c_eff}")]
    Superluminal { velocity: f64, c_eff: f64 },

    #[error("integration left the model domain at step {step}: {source}")]
    IntegrationDomainExit {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("degenerate path: at least two samples are required, got {0}")]
    DegeneratePath(usize),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("conflicting parameters: {0}")]
    Conflict(String),

    #[error("malformed CSV row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by user input (configuration, CSV, files)
    /// rather than by the numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Validation { .. }
                | Error::Conflict(_)
                | Error::Csv { .. }
                | Error::Io(_)
        )
    }
}
