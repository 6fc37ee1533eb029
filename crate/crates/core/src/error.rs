use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid sizes, enum values or hyperparameters.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    Index { index: usize, n_qubits: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("KL divergence undefined: p[{bin}] > 0 but q[{bin}] == 0")]
    UndefinedDivergence { bin: usize },

    #[error("training diverged: {0}")]
    Diverged(String),

    /// Malformed binary file; `offset` is the byte position where parsing failed.
    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
