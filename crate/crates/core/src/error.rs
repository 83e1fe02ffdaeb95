use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numerical,
}

#[derive(Error, Debug)]
pub enum Error {
    #[error("index {index} out of range 0..{len}")]
    IndexOutOfRange { index: isize, len: usize },

    #[error("node {node} appears {count} times in a divided difference of order {order}; at most {max} allowed")]
    Multiplicity {
        node: f64,
        count: usize,
        order: usize,
        max: usize,
    },

    #[error("point {x} lies outside the domain [{a}, {b}]")]
    Domain { x: f64, a: f64, b: f64 },

    #[error("invalid knot vector: {0}")]
    InvalidKnots(String),

    #[error("degree {0} is not supported for this operation")]
    InvalidDegree(usize),

    #[error("Schoenberg-Whitney condition violated for basis indices {0:?}")]
    SchoenbergWhitney(Vec<isize>),

    #[error("singular value decomposition did not converge")]
    SvdFailed,

    #[error("sub-span [{lo}, {hi}) contains no samples")]
    EmptySubspan { lo: usize, hi: usize },

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("invalid signal: {0}")]
    InvalidSignal(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("missing data: {0}")]
    MissingData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) | Error::InvalidDegree(_) => ErrorKind::Config,
            Error::InvalidSignal(_)
            | Error::Data(_)
            | Error::MissingData(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_)
            | Error::Domain { .. } => ErrorKind::Data,
            Error::IndexOutOfRange { .. }
            | Error::Multiplicity { .. }
            | Error::InvalidKnots(_)
            | Error::SchoenbergWhitney(_)
            | Error::SvdFailed
            | Error::EmptySubspan { .. }
            | Error::Infeasible(_) => ErrorKind::Numerical,
        }
    }
}
