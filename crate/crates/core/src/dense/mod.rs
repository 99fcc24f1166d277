//! Complex dense linear algebra: LU, Householder QR, one-sided Jacobi SVD,
//! and a Hessenberg/shifted-QR eigensolver.
//!
//! Everything here works on [`ComplexMatrix`] (column-major) and is a pure
//! function of its inputs.

mod eig;
mod lu;
mod matrix;
mod qr;
mod svd;

use thiserror::Error;

pub use eig::{eig_dense, eig_dense_select, eig_reduced_gep, eigvals_dense, EigPair, DENSE_CAP};
pub use lu::{lu_factor, lu_solve, lu_solve_adjoint, LuFactorization};
pub use matrix::{dotc, norm2, ComplexMatrix, C64, ONE, ZERO};
pub use qr::{householder_qr, qr_orthonormalize};
pub use svd::{svd, SvdResult, SVD_MAX_SWEEPS};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular: pivot in column {column} below threshold")]
    SingularMatrix { column: usize },

    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("QR requires rows >= cols, got {rows}x{cols}")]
    TooFewRows { rows: usize, cols: usize },

    #[error("rank deficient: R[{column},{column}] below threshold")]
    RankDeficient { column: usize },

    #[error("SVD did not converge after {sweeps} sweeps (off-diagonal residual {off_diagonal:e})")]
    SvdNoConvergence { sweeps: usize, off_diagonal: f64 },

    #[error("QR iteration stalled on eigenvalue index {index}")]
    EigNoConvergence { index: usize },

    #[error("reduced B is numerically singular (reciprocal condition {rcond:e})")]
    SingularReducedB { rcond: f64 },

    #[error("dimension {dim} exceeds the dense cap {cap}")]
    TooLarge { dim: usize, cap: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}
