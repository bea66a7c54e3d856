use thiserror::Error;

/// Errors raised by the model, the configuration loader and the sweep runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("Gram matrix is rank deficient (condition number {condition:.3e})")]
    RankDeficient { condition: f64 },

    #[error("bound vacuous at K = {users}: interference term exceeds array gain")]
    VacuousBound { users: usize },

    #[error("pilot overhead tau*K = {pilots} exceeds the uplink share S*xi_ul = {capacity}")]
    Overhead { pilots: f64, capacity: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e}, trace {trace:.3e})")]
    NotPsd { eigenvalue: f64, trace: f64 },

    #[error("channel draw rejected {attempts} times in a row")]
    RetriesExhausted { attempts: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse grouping used to pick a process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numeric,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. } | Error::Invalid(_) => ErrorClass::Config,
            Error::Io(_) => ErrorClass::Io,
            _ => ErrorClass::Numeric,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
