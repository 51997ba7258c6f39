use std::path::PathBuf;

/// Errors raised by the numerical routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the range an operation supports.
    #[error("{name} = {value} is outside the supported range [{min}, {max}]")]
    OutOfBounds {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// An argument lies outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed argument combination (inverted bounds, empty grids, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A requested tolerance cannot be reached within the iteration cap.
    #[error("tolerance {tol:e} not reached: {detail}")]
    Convergence { tol: f64, detail: String },

    /// Evaluation outside the support of a sampled function.
    #[error("x = {x} lies outside the support of the sampled function (ends at {end})")]
    Support { x: f64, end: f64 },

    /// An improper integral that the tail model cannot close.
    #[error("divergent integral: {0}")]
    Divergence(String),

    /// Two evaluation paths that must agree did not.
    #[error("internal consistency violated: {what} (|{a} - {b}| > {tol:e})")]
    Consistency {
        what: &'static str,
        a: f64,
        b: f64,
        tol: f64,
    },

    #[error("malformed block file {path}: {reason}")]
    BlockFormat { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_range(name: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if value.is_nan() || value < min || value > max {
        Err(Error::OutOfBounds {
            name,
            value,
            min,
            max,
        })
    } else {
        Ok(())
    }
}
