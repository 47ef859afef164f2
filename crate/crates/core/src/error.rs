use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coupling graph is disconnected")]
    Disconnected,
    #[error("circuit needs {needed} qubits but device has {available}")]
    DeviceTooSmall { needed: usize, available: usize },
    #[error("gate {0} is not in the {{U3, CX}} basis")]
    NonBasisGate(&'static str),
    #[error("oracle supports at most {max} qubits, got {got}")]
    OracleTooLarge { got: usize, max: usize },
    #[error("fit failed: {0}")]
    FitFailed(String),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
