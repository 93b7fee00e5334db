use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("usage: {0}")]
    Usage(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("pole at binding: factor {0} vanishes")]
    Pole(String),
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("not symmetric: swapping x{0} and x{1} changes the polynomial")]
    NotSymmetric(usize, usize),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Io(_) => 1,
            Error::Validation(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
