use su11_core::Error;

/// Failures mapped onto the exit-code contract: 2 usage, 3 numerical, 4 input.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Input(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Numerical(_) => 3,
            Self::Input(_) | Self::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidGroupElement(_)
            | Error::InvalidLabel(_)
            | Error::InvalidDegree(_)
            | Error::IndexOutOfRange { .. }
            | Error::UnknownGenerator(_)
            | Error::InvalidParameter(_) => Self::Usage(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
