use thiserror::Error;

#[derive(Debug, Error)]
pub enum AseaError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{file}:{line}: parse error: {msg}")]
    Parse { file: String, line: usize, msg: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("sequence length error: {0}")]
    Length(String),

    #[error("checkpoint format error: {0}")]
    Format(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl AseaError {
    /// Process exit code per the CLI contract: 2 usage, 3 data, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            AseaError::Config(_) | AseaError::Shape(_) => 2,
            AseaError::Parse { .. }
            | AseaError::Data(_)
            | AseaError::Length(_)
            | AseaError::Format(_)
            | AseaError::Io { .. } => 3,
            AseaError::Numeric(_) | AseaError::Contract(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, AseaError>;
