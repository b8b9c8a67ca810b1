use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("order {order} outside supported range 2..={max}")]
    OrderOutOfRange { order: usize, max: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("degenerate anchors: {0}")]
    DegenerateAnchor(String),
    #[error("size limit exceeded: {0}")]
    Size(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("ABC acceptance too low: {accepted} of {attempts} draws accepted; try a larger epsilon")]
    AbcAcceptance { accepted: usize, attempts: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
