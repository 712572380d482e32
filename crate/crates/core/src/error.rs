use thiserror::Error;

/// Errors raised by the numerical routines and the file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("extrapolation error: t = {t} lies outside the tabulated range [{lo}, {hi}]")]
    Extrapolation { t: f64, lo: f64, hi: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("capacity exceeded: requested order {requested}, ceiling is {ceiling}")]
    Capacity { requested: usize, ceiling: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("convention error: {0}")]
    Convention(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("insufficient support: {usable} usable indices, at least {required} required")]
    InsufficientSupport { usable: usize, required: usize },

    #[error("degenerate fit: {0}")]
    FitDegenerate(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(values: impl IntoIterator<Item = f64>, what: &str) -> Result<()> {
    for (i, v) in values.into_iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::Data(format!("{what}: non-finite value {v} at position {i}")));
        }
    }
    Ok(())
}
