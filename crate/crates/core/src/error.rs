use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid term: {0}")]
    InvalidTerm(String),
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("problem too large: {0}")]
    TooLarge(String),
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("negative eigenvalue {0:.3e} of 4M")]
    NegativeMode(f64),
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("ambiguous: {0}")]
    Ambiguous(String),
    #[error("symmetry violated: {0}")]
    Symmetry(String),
    #[error("{0}")]
    Domain(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
