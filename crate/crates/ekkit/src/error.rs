use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EkError {
    #[error("degenerate lattice: {0}")]
    Degenerate(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("truncation radius {radius} exceeds cap (tail bound {tail_bound:e})")]
    Truncation { radius: f64, tail_bound: f64 },
    #[error("string is not composable")]
    NotComposable,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("missing generator {0}")]
    MissingGenerator(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for EkError {
    fn from(e: std::io::Error) -> Self {
        EkError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, EkError>;
