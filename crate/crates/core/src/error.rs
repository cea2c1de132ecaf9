use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("container format error: {0}")]
    Format(String),

    #[error("container is missing required tensor `{0}`")]
    MissingTensor(String),

    #[error("tensor `{name}` has shape {actual:?}, expected {expected:?}")]
    Shape {
        name: String,
        expected: Vec<usize>,
        actual: Vec<usize>,
    },

    #[error("token id {id} out of range for vocabulary of size {vocab_size}")]
    TokenOutOfRange { id: u32, vocab_size: usize },

    #[error("numerical overflow{}", match .step { Some(t) => format!(" at time step {t}"), None => String::new() })]
    NumericalOverflow { step: Option<usize> },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("training became unstable at epoch {epoch} (loss {loss})")]
    TrainingInstability { epoch: usize, loss: f64 },

    #[error("every ensemble member failed: {0}")]
    EnsembleFailed(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Precondition(_) => 2,
            Error::Io { .. } => 3,
            Error::Format(_)
            | Error::MissingTensor(_)
            | Error::Shape { .. }
            | Error::TokenOutOfRange { .. } => 2,
            Error::NumericalOverflow { .. }
            | Error::Degenerate(_)
            | Error::Singular(_)
            | Error::TrainingInstability { .. }
            | Error::EnsembleFailed(_) => 4,
        }
    }
}
