use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error(
        "column {column} lost its norm during orthogonalization (relative norm {relative_norm:.3e}); \
         the samples are rank deficient, try a smaller k"
    )]
    RankDeficient { column: usize, relative_norm: f64 },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is singular (pivot {pivot:.3e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("operator is not positive definite: curvature {curvature:.3e} at iteration {iteration}")]
    Indefinite { iteration: usize, curvature: f64 },

    #[error("iteration diverged at step {iteration}; rescale the operator so its spectral norm is at most 1")]
    Divergence { iteration: usize },

    #[error("every residual entry is an outlier, chi-squared is undefined")]
    AllOutliers,

    #[error("all singular values fall below the cutoff {cutoff:.3e}")]
    NoSignificantSingularValues { cutoff: f64 },
}

impl Error {
    pub(crate) fn format(offset: u64, message: impl Into<String>) -> Self {
        Error::Format {
            offset,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }

    /// True for errors that come from malformed or unreadable files.
    pub fn is_format(&self) -> bool {
        matches!(self, Error::Format { .. } | Error::Io(_))
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            actual,
        });
    }
    Ok(())
}
