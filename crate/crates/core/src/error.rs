use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "register capacity exceeded: dimension {requested} is beyond the {max}-dimensional cap"
    )]
    Capacity { requested: usize, max: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("matrix is not Hermitian: deviation {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    /// A parameter fell outside its legal range.
    #[error("{name} = {value} is outside the legal range [{lo}, {hi}]")]
    Domain {
        name: String,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A state stopped satisfying the density-matrix invariants mid-run.
    #[error("state integrity violated at step {step}: {detail}")]
    Integrity { step: usize, detail: String },

    #[error("config error ({location}): {message}")]
    Config { location: String, message: String },

    #[error("{0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn config_line(line: usize, msg: impl Into<String>) -> Self {
        Error::Config {
            location: format!("line {line}"),
            message: msg.into(),
        }
    }

    pub(crate) fn config_at(location: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            location: location.into(),
            message: msg.into(),
        }
    }
}
