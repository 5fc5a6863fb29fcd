use std::path::PathBuf;

use trotter_core::CoreError;

pub type Result<T> = std::result::Result<T, HarnessError>;

#[derive(Debug)]
pub enum HarnessError {
    Core(CoreError),
    Config(String),
    Csv { path: PathBuf, line: usize, msg: String },
    Io { path: PathBuf, source: std::io::Error },
}

impl std::fmt::Display for HarnessError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HarnessError::Core(e) => write!(f, "{e}"),
            HarnessError::Config(msg) => write!(f, "invalid configuration: {msg}"),
            HarnessError::Csv { path, line, msg } => {
                write!(f, "csv error in {} line {line}: {msg}", path.display())
            }
            HarnessError::Io { path, source } => {
                write!(f, "i/o error on {}: {source}", path.display())
            }
        }
    }
}

impl std::error::Error for HarnessError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            HarnessError::Core(e) => Some(e),
            HarnessError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<CoreError> for HarnessError {
    fn from(e: CoreError) -> Self {
        HarnessError::Core(e)
    }
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    /// Process exit code: 2 for input or parse problems, 3 for numerical
    /// failures (cap exceeded, unconverged quadrature, diagnostics), 4 for
    /// filesystem trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Csv { .. } => 2,
            HarnessError::Io { .. } => 4,
            HarnessError::Core(e) => match e {
                CoreError::Parse { .. }
                | CoreError::InvalidArgument(_)
                | CoreError::InvalidPermutation(_)
                | CoreError::DimensionMismatch(_, _)
                | CoreError::UnsupportedOrder(_)
                | CoreError::InvalidDensityMatrix(_) => 2,
                CoreError::NotHermitian(_)
                | CoreError::NotUnitary(_)
                | CoreError::CapExceeded(_)
                | CoreError::Numerical(_) => 3,
            },
        }
    }
}
