use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("point ({u1}, {u2}) lies on the boundary of the unit square")]
    BoundaryPoint { u1: f64, u2: f64 },

    #[error("point ({u1}, {u2}) lies outside the quadrant [{q}, 1]^2")]
    OutsideQuadrant { u1: f64, u2: f64, q: f64 },

    #[error("column pair ({0}, {0}) is not a distinct pair")]
    SameColumn(usize),

    #[error("column index {index} out of range for {k} columns")]
    ColumnOutOfRange { index: usize, k: usize },

    #[error("no observations exceed q = {0}; level too extreme for the sample size")]
    EmptyExceedance(f64),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("degenerate clustering: {0}")]
    DegenerateClustering(String),

    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: line {line}: {msg}")]
    Data {
        path: String,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 config, 3 data, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter(_) => 2,
            Error::Data { .. } | Error::Io(_) | Error::InvalidInput(_) => 3,
            _ => 4,
        }
    }
}
