/// Failure classes, each with its own process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or parameter values (exit 1).
    #[error("usage error: {0}")]
    Usage(String),
    /// Unreadable or malformed input data (exit 2).
    #[error("input error: {0}")]
    Input(String),
    /// A computation that did not succeed, e.g. a solver that failed to
    /// converge (exit 3). Outputs are still written before this is raised.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// File or stream failure (exit 2).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Standard output closed early, e.g. piped into `head`.
    pub fn is_broken_pipe(&self) -> bool {
        matches!(self, CliError::Io(e) if e.kind() == std::io::ErrorKind::BrokenPipe)
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<fourier_ratio::Error> for CliError {
    fn from(e: fourier_ratio::Error) -> Self {
        use fourier_ratio::Error as E;
        let msg = e.to_string();
        match e {
            E::InvalidParameter { .. } => CliError::Usage(msg),
            E::Degenerate(_) | E::GuardExceeded { .. } | E::QuantizationOverflow { .. } => {
                CliError::Numerical(msg)
            }
            _ => CliError::Input(msg),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => return CliError::Io(io),
                _ => unreachable!(),
            }
        }
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            return CliError::Io(e.into());
        }
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
