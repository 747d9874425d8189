use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error in `{field}`: {detail}")]
    Config { field: String, detail: String },

    #[error("time {t} lies outside [{lo}, {hi}]")]
    Domain { t: f64, lo: f64, hi: f64 },

    #[error("interval {interval}: Picard iteration did not converge in {iterations} iterations (last sup difference {last_diff:e})")]
    NonConvergence {
        interval: usize,
        iterations: usize,
        last_diff: f64,
    },

    #[error("control selected at t = {t} is not a member of Omega(v): {detail}")]
    Membership { t: f64, detail: String },

    #[error("history is not integrable: {0}")]
    NotIntegrable(String),

    #[error("hypothesis {hypothesis} violated: {detail}")]
    Hypothesis { hypothesis: String, detail: String },

    #[error("grid mismatch: {0}")]
    Grid(String),

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("empty solution family: {0}")]
    EmptyFamily(String),

    #[error("table parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            detail: detail.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
