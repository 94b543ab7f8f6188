use thiserror::Error;

#[derive(Debug, Error)]
pub enum CtcError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no community: {0}")]
    NoCommunity(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("index file is malformed: {0}")]
    BadIndex(String),

    #[error("index does not match graph: {0}")]
    IndexMismatch(String),

    #[error("workload infeasible: {0} consecutive rejections")]
    WorkloadInfeasible(usize),

    #[error("input too large for oracle: {0} nodes (limit {1})")]
    OracleSizeGuard(usize, usize),

    #[error("snapshot index {0} out of range (have {1})")]
    SnapshotOutOfRange(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CtcError>;
