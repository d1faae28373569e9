//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid attribute set `{name}`: {reason}")]
    InvalidAttributeSet { name: String, reason: String },

    #[error("invalid distribution over `{set}`: {reason}")]
    InvalidDistribution { set: String, reason: String },

    #[error("attribute set mismatch: `{left}` vs `{right}`")]
    AttributeSetMismatch { left: String, right: String },

    #[error("{measure} requires an ordinal or binary attribute set; `{set}` is nominal with {arity} values")]
    OrdinalRequired {
        measure: &'static str,
        set: String,
        arity: usize,
    },

    #[error("binary attribute set required; `{set}` has {arity} values")]
    BinaryRequired { set: String, arity: usize },

    #[error("divergence undefined: achieved mass {achieved:.6} on `{value}` whose target probability is 0 and no smoothing is enabled")]
    ZeroTargetCell { value: String, achieved: f64 },

    #[error("unknown attribute value `{value}` in set `{set}`")]
    UnknownValue { set: String, value: String },

    #[error("bias score {0} outside [-1, 1]")]
    BiasOutOfRange(f64),

    #[error("negative per-intent gain {0}")]
    NegativeGain(f64),

    #[error("empty ranking prefix")]
    EmptyPrefix,

    #[error("invalid weights: {0}")]
    BadWeights(String),

    #[error("mean attention undefined: `{0}` has no membership mass in the ranking")]
    AttentionUndefined(String),

    #[error("invalid run `{tag}`: {reason}")]
    InvalidRun { tag: String, reason: String },

    #[error("statistics: {0}")]
    Stats(String),

    #[error("{file}:{line}: {message}")]
    Format {
        file: String,
        line: usize,
        message: String,
    },

    #[error("evaluation: {0}")]
    Eval(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn format(file: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            file: file.into(),
            line,
            message: message.into(),
        }
    }

    /// Exit code for the CLI: 1 for file-format errors, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Format { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
