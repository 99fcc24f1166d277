use num_complex::Complex64;
use thiserror::Error;

use crate::contour::QuadratureError;
use crate::dense::LinalgError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    #[error("quadrature point {index} (z = {point}) hits the spectrum: zB - A is singular")]
    QuadraturePointHitsSpectrum { index: usize, point: Complex64 },

    #[error("moment stack has degree {available}, degree {needed} required")]
    InsufficientDegree { needed: usize, available: usize },

    #[error("numerical rank collapsed to zero")]
    RankCollapse,

    #[error("pencil is not Hermitian-definite (A Hermitian, B Hermitian positive definite required)")]
    NotHermitianDefinite,

    #[error("block Arnoldi breakdown at step {step}: column {column} became dependent")]
    ArnoldiBreakdown { step: usize, column: usize },

    #[error("pencil flag `{flag}` does not hold for the supplied matrices")]
    FlagMismatch { flag: &'static str },

    #[error("invalid problem specification: {0}")]
    BadSpec(String),

    #[error("B is singular and no ground truth is attached")]
    SingularBWithoutTruth,

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("{}: `{field}`: {message}", if *line == 0 { "command line".to_string() } else { format!("line {line}") })]
    Config { line: usize, field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error comes from user input rather than a numerical
    /// failure.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config { .. } | Error::InvalidConfig(_) | Error::BadSpec(_) | Error::Io(_) => true,
            Error::Quadrature(q) => !matches!(q, QuadratureError::PoleCollision { .. }),
            _ => false,
        }
    }
}
